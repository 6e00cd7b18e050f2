#pragma once

#include <stdexcept>
#include <string>

namespace stlam {

// Single exception type for input, precondition and numerical failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace stlam
