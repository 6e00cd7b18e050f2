#pragma once

#include <iosfwd>
#include <string>

#include "stlam/graph.hpp"

namespace stlam {

// SteinLib STP reader. Accepts SECTION Comment / Graph / Terminals blocks
// terminated by EOF; keywords are case-insensitive, '#' starts a line
// comment, unknown sections are skipped. Node ids are 1-based in the file.
// Throws Error with a line reference on malformed input.
Instance parse_stp(std::istream& in);
Instance parse_stp(const std::string& text);
Instance load_stp(const std::string& path);

// Canonical STP emission; integer costs are written without a decimal point.
// parse_stp(write_stp(g)) reproduces g field for field.
std::string write_stp(const Instance& g);

}  // namespace stlam
