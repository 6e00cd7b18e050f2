#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

// Runs the frontend with the given arguments, stderr merged into stdout.
RunResult run(const std::string& args) {
    const std::string cmd = std::string(STLAM_BIN) + " " + args + " 2>&1";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (size_t got = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string data(const std::string& name) {
    return std::string(STLAM_TEST_DATA_DIR) + "/" + name;
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("enumerate lists one family per line") {
    RunResult r = run("enumerate --b 3");
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 3);
    CHECK(r.out.find("((k1,k2),k3)") != std::string::npos);
    CHECK(r.out.find("((k1,k3),k2)") != std::string::npos);
    CHECK(r.out.find("(k1,(k2,k3))") != std::string::npos);

    CHECK(count_lines(run("enumerate --b 1").out) == 1);
    CHECK(count_lines(run("enumerate --b 5").out) == 105);
}

TEST_CASE("solve reports the documented json fields") {
    RunResult r = run("solve " + data("two_terminals.stp") + " --format json");
    REQUIRE(r.code == 0);
    json rep = json::parse(r.out);
    CHECK(rep["instance"] == "two_terminals");
    CHECK(rep["backend"] == "dp");
    CHECK(rep["root"] == 1);
    CHECK(rep["terminals"] == json::array({1, 3}));
    CHECK(rep["families_solved"] == 1);
    CHECK(rep["best_family"] == 0);
    CHECK(rep["optimal_cost"] == 5);
    REQUIRE(rep["tree_edges"].size() == 2);
    CHECK(rep.contains("total_time"));
    CHECK(rep["per_family_time_stats"].contains("mean"));
    CHECK(rep["per_family_time_stats"].contains("max"));
}

TEST_CASE("solve handles the mid-size fixtures") {
    RunResult r1 = run("solve " + data("lin01.stp") + " --format json");
    REQUIRE(r1.code == 0);
    json rep1 = json::parse(r1.out);
    CHECK(rep1["families_solved"] == 3);
    CHECK(rep1["optimal_cost"] == 72);

    RunResult r2 = run("solve " + data("lin02.stp") + " --format json");
    REQUIRE(r2.code == 0);
    json rep2 = json::parse(r2.out);
    CHECK(rep2["families_solved"] == 105);
}

TEST_CASE("solve is reproducible across worker counts") {
    const std::string base = "solve " + data("lin01.stp") + " --keep-all --format json";
    json one = json::parse(run(base + " --threads 1").out);
    json four = json::parse(run(base + " --threads 4").out);
    CHECK(one["optimal_cost"] == four["optimal_cost"]);
    CHECK(one["best_family"] == four["best_family"]);
    CHECK(one["tree_edges"] == four["tree_edges"]);
    CHECK(one["family_objectives"] == four["family_objectives"]);
}

TEST_CASE("solve accepts a root override and validates it") {
    RunResult ok = run("solve " + data("lin01.stp") + " --root 53 --format json");
    REQUIRE(ok.code == 0);
    json rep = json::parse(ok.out);
    CHECK(rep["root"] == 53);
    CHECK(rep["optimal_cost"] == 72);  // invariant under the root choice

    RunResult bad = run("solve " + data("lin01.stp") + " --root 1");
    CHECK(bad.code == 1);
    CHECK(bad.out.find("error:") != std::string::npos);
}

TEST_CASE("solve table format prints the summary lines") {
    RunResult r = run("solve " + data("two_terminals.stp") + " --format table");
    CHECK(r.code == 0);
    CHECK(r.out.find("optimal cost") != std::string::npos);
    CHECK(r.out.find("tree edges") != std::string::npos);
}

TEST_CASE("lp backend solves the small fixture from the command line") {
    RunResult r = run("solve " + data("two_terminals.stp") + " --backend lp --format json");
    REQUIRE(r.code == 0);
    json rep = json::parse(r.out);
    CHECK(rep["backend"] == "lp");
    CHECK(rep["optimal_cost"] == 5);
}

TEST_CASE("export-lp writes one file per family") {
    const fs::path dir = fs::temp_directory_path() / "stlam_export_test";
    fs::remove_all(dir);
    RunResult r = run("export-lp " + data("lin01.stp") + " --out " + dir.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("wrote 3 model files") != std::string::npos);
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) names.push_back(entry.path().filename());
    REQUIRE(names.size() == 3);
    // root defaults to terminal 21; families are ranked 0..2
    std::sort(names.begin(), names.end());
    CHECK(names[0] == "lin01_21_0.lp");
    CHECK(names[2] == "lin01_21_2.lp");
    std::ifstream in(dir / names[0]);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("Bounds") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("verify cross-checks all methods") {
    RunResult r = run("verify " + data("two_terminals.stp"));
    CHECK(r.code == 0);
    CHECK(r.out.find("driver-dp") != std::string::npos);
    CHECK(r.out.find("driver-lp") != std::string::npos);
    CHECK(r.out.find("dreyfus-wagner") != std::string::npos);
    CHECK(r.out.find("subset-mst") != std::string::npos);
    CHECK(r.out.find("agreement: OK") != std::string::npos);
}

TEST_CASE("bench walks a directory in name order") {
    RunResult r = run("bench " + std::string(STLAM_TEST_DATA_DIR));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("instance") != std::string::npos);
    const size_t p1 = r.out.find("lin01");
    const size_t p2 = r.out.find("lin02");
    const size_t p3 = r.out.find("two_terminals");
    REQUIRE(p1 != std::string::npos);
    REQUIRE(p2 != std::string::npos);
    REQUIRE(p3 != std::string::npos);
    CHECK(p1 < p2);
    CHECK(p2 < p3);
    CHECK(r.out.find("105") != std::string::npos);

    RunResult j = run("bench " + std::string(STLAM_TEST_DATA_DIR) + " --format json");
    REQUIRE(j.code == 0);
    json rows = json::parse(j.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0]["instance"] == "lin01");
    CHECK(rows[0]["families"] == 3);
    CHECK(rows[1]["families"] == 105);
}

TEST_CASE("usage errors exit with code 2, runtime errors with 1") {
    CHECK(run("solve " + data("lin01.stp") + " --no-such-flag").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("enumerate --b 99").code == 2);
    CHECK(run("").code == 2);  // a subcommand is required

    RunResult missing = run("solve /nonexistent/file.stp");
    CHECK(missing.code == 1);
    CHECK(missing.out.find("error:") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
    CHECK(run("--help").code == 0);
    CHECK(run("solve --help").code == 0);
}
