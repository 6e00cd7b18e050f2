// Command line front end: solve, enumerate, export-lp, verify, bench.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stlam/driver.hpp"
#include "stlam/error.hpp"
#include "stlam/laminar.hpp"
#include "stlam/lp_model.hpp"
#include "stlam/oracle.hpp"
#include "stlam/stp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::optional<int> root;  // 1-based external id
    std::string backend = "dp";
    int threads = 1;
    std::string format = "json";
    bool keep_all = false;
    double tol_feas = 1e-8;
    double tol_int = 1e-6;
};

void add_threads_flag(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--threads", opts.threads, "worker count for the family sweep")
        ->envname("STEINER_LAMINAR_THREADS")
        ->check(CLI::Range(1, 64));
}

void add_tol_flags(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--tol-feas", opts.tol_feas, "feasibility tolerance");
    cmd->add_option("--tol-int", opts.tol_int, "integrality tolerance");
}

stlam::SolveOptions to_solve_options(const stlam::Instance& g, const CommonOpts& opts) {
    stlam::SolveOptions so;
    if (opts.root) {
        const int r = *opts.root;
        if (r < 1 || r > g.node_count()) throw stlam::Error("root id out of range");
        so.root = r - 1;
    }
    so.backend = opts.backend == "lp" ? stlam::Backend::lp : stlam::Backend::dp;
    so.threads = opts.threads;
    so.keep_all = opts.keep_all;
    so.simplex.feasibility_tol = opts.tol_feas;
    so.simplex.integrality_tol = opts.tol_int;
    return so;
}

json cost_json(const stlam::Instance& g, double v) {
    if (g.integral_costs()) return json(static_cast<long long>(v));
    return json(v);
}

json report_json(const std::string& name, const stlam::Instance& g,
                 const stlam::SolveReport& report) {
    json tree_edges = json::array();
    for (int e : report.tree.edges) {
        const stlam::Edge& ed = g.edges()[static_cast<size_t>(e)];
        tree_edges.push_back({ed.u + 1, ed.v + 1, cost_json(g, ed.cost)});
    }
    json terminals = json::array();
    for (int t : g.terminals()) terminals.push_back(t + 1);
    json out{
        {"instance", name},
        {"root", report.root + 1},
        {"backend", report.backend == stlam::Backend::dp ? "dp" : "lp"},
        {"terminals", terminals},
        {"families_solved", report.families_solved},
        {"best_family", report.best_family},
        {"optimal_cost", cost_json(g, report.optimal_cost)},
        {"tree_edges", tree_edges},
        {"per_family_time_stats",
         {{"mean", report.mean_family_seconds}, {"max", report.max_family_seconds}}},
        {"total_time", report.total_seconds},
    };
    if (!report.family_objectives.empty()) out["family_objectives"] = report.family_objectives;
    return out;
}

void print_report_table(const std::string& name, const stlam::Instance& g,
                        const stlam::SolveReport& report) {
    std::printf("instance        %s\n", name.c_str());
    std::printf("root            %d\n", report.root + 1);
    std::printf("backend         %s\n", report.backend == stlam::Backend::dp ? "dp" : "lp");
    std::printf("families        %llu\n", static_cast<unsigned long long>(report.families_solved));
    std::printf("best family     %llu\n", static_cast<unsigned long long>(report.best_family));
    std::printf("optimal cost    %.10g\n", report.optimal_cost);
    std::printf("tree edges      ");
    for (size_t i = 0; i < report.tree.edges.size(); ++i) {
        const stlam::Edge& ed = g.edges()[static_cast<size_t>(report.tree.edges[i])];
        std::printf("%s(%d,%d)", i ? " " : "", ed.u + 1, ed.v + 1);
    }
    std::printf("\ntotal time      %.3fs\n", report.total_seconds);
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

int run_solve(const std::string& path, const CommonOpts& opts) {
    const stlam::Instance g = stlam::load_stp(path);
    const stlam::SolveReport report = stlam::solve_instance(g, to_solve_options(g, opts));
    if (opts.format == "table")
        print_report_table(stem_of(path), g, report);
    else
        std::cout << report_json(stem_of(path), g, report).dump(2) << "\n";
    return 0;
}

int run_enumerate(int b) {
    stlam::FamilyEnumerator en(b);
    while (auto fam = en.next()) std::cout << fam->to_string() << "\n";
    return 0;
}

int run_export_lp(const std::string& path, const CommonOpts& opts, const std::string& out_dir) {
    const stlam::Instance g = stlam::load_stp(path);
    int root = g.terminals().front();
    if (opts.root) {
        if (*opts.root < 1 || *opts.root > g.node_count())
            throw stlam::Error("root id out of range");
        root = *opts.root - 1;
    }
    const int b = static_cast<int>(g.terminals().size()) - 1;
    if (b < 1) throw stlam::Error("nothing to export for a single-terminal instance");
    fs::create_directories(out_dir);
    const stlam::BidirectedView view(g);
    stlam::FamilyEnumerator en(b);
    std::uint64_t count = 0;
    while (auto fam = en.next()) {
        const stlam::LpModel model = stlam::build_lp(view, root, *fam);
        const std::string file = stem_of(path) + "_" + std::to_string(root + 1) + "_" +
                                 std::to_string(fam->id()) + ".lp";
        std::ofstream out(fs::path(out_dir) / file);
        if (!out) throw stlam::Error("cannot write to '" + out_dir + "'");
        out << stlam::export_lp(model);
        ++count;
    }
    std::cout << "wrote " << count << " model files to " << out_dir << "\n";
    return 0;
}

int run_verify(const std::string& path, const CommonOpts& opts) {
    const stlam::Instance g = stlam::load_stp(path);
    struct Entry {
        std::string method;
        bool ran = false;
        double cost = 0.0;
        std::string note;
    };
    std::vector<Entry> entries;

    CommonOpts dp_opts = opts;
    dp_opts.backend = "dp";
    entries.push_back({"driver-dp", true,
                       stlam::solve_instance(g, to_solve_options(g, dp_opts)).optimal_cost, ""});
    CommonOpts lp_opts = opts;
    lp_opts.backend = "lp";
    entries.push_back({"driver-lp", true,
                       stlam::solve_instance(g, to_solve_options(g, lp_opts)).optimal_cost, ""});
    if (g.terminals().size() <= 12 && g.integral_costs()) {
        entries.push_back({"dreyfus-wagner", true, stlam::dreyfus_wagner(g).cost, ""});
    } else {
        entries.push_back({"dreyfus-wagner", false, 0.0, "skipped: caps"});
    }
    if (g.node_count() - static_cast<int>(g.terminals().size()) <= 16) {
        entries.push_back({"subset-mst", true, stlam::brute_force_subset_mst(g).cost, ""});
    } else {
        entries.push_back({"subset-mst", false, 0.0, "skipped: more than 16 non-terminals"});
    }

    bool agree = true;
    double reference = 0.0;
    bool have_ref = false;
    for (const Entry& e : entries) {
        if (!e.ran) continue;
        if (!have_ref) {
            reference = e.cost;
            have_ref = true;
        } else if (std::fabs(e.cost - reference) > 1e-6 * (1.0 + std::fabs(reference))) {
            agree = false;
        }
    }

    std::printf("%-16s %14s\n", "method", "cost");
    for (const Entry& e : entries) {
        if (e.ran)
            std::printf("%-16s %14.6g\n", e.method.c_str(), e.cost);
        else
            std::printf("%-16s %14s  (%s)\n", e.method.c_str(), "-", e.note.c_str());
    }
    std::printf("agreement: %s\n", agree ? "OK" : "MISMATCH");
    return agree ? 0 : 1;
}

int run_bench(const std::string& dir, const CommonOpts& opts) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".stp")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw stlam::Error("no .stp files in '" + dir + "'");

    const bool as_json = opts.format == "json";
    json rows = json::array();
    if (!as_json)
        std::printf("%-14s %6s %7s %5s %10s %14s %12s\n", "instance", "|V|", "|A|", "|R|",
                    "|L_b|", "mean sub (s)", "total (s)");
    for (const fs::path& file : files) {
        const stlam::Instance g = stlam::load_stp(file.string());
        CommonOpts solve_opts = opts;
        solve_opts.root.reset();
        const stlam::SolveReport report = stlam::solve_instance(g, to_solve_options(g, solve_opts));
        if (as_json) {
            rows.push_back({{"instance", file.stem().string()},
                            {"nodes", g.node_count()},
                            {"arcs", 2 * g.edge_count()},
                            {"terminals", g.terminals().size()},
                            {"families", report.families_solved},
                            {"mean_family_time", report.mean_family_seconds},
                            {"total_time", report.total_seconds}});
        } else {
            std::printf("%-14s %6d %7d %5zu %10llu %14.6f %12.3f\n", file.stem().string().c_str(),
                        g.node_count(), 2 * g.edge_count(), g.terminals().size(),
                        static_cast<unsigned long long>(report.families_solved),
                        report.mean_family_seconds, report.total_seconds);
        }
    }
    if (as_json) std::cout << rows.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact Steiner trees by laminar family decomposition"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string path, out_dir = ".";
    int enum_b = 0;

    CLI::App* solve = app.add_subcommand("solve", "solve an instance to optimality");
    solve->add_option("instance", path, "STP file")->required();
    solve->add_option("--root", opts.root, "root terminal (1-based id)");
    solve->add_option("--backend", opts.backend, "subproblem backend")
        ->check(CLI::IsMember({"dp", "lp"}));
    solve->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"json", "table"}));
    solve->add_flag("--keep-all", opts.keep_all, "retain every family objective");
    add_threads_flag(solve, opts);
    add_tol_flags(solve, opts);

    CLI::App* enumerate = app.add_subcommand("enumerate", "list laminar families");
    enumerate->add_option("--b", enum_b, "commodity count")->required()->check(CLI::Range(1, 12));

    CLI::App* export_lp = app.add_subcommand("export-lp", "write one LP file per family");
    export_lp->add_option("instance", path, "STP file")->required();
    export_lp->add_option("--root", opts.root, "root terminal (1-based id)");
    export_lp->add_option("--out", out_dir, "output directory");

    CLI::App* verify = app.add_subcommand("verify", "cross-check driver backends and oracles");
    verify->add_option("instance", path, "STP file")->required();
    add_threads_flag(verify, opts);
    add_tol_flags(verify, opts);

    CLI::App* bench = app.add_subcommand("bench", "solve every instance in a directory");
    bench->add_option("dir", path, "directory of .stp files")->required();
    bench->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"json", "table"}));
    add_threads_flag(bench, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (solve->parsed()) return run_solve(path, opts);
        if (enumerate->parsed()) return run_enumerate(enum_b);
        if (export_lp->parsed()) return run_export_lp(path, opts, out_dir);
        if (verify->parsed()) return run_verify(path, opts);
        if (bench->parsed()) {
            if (bench->count("--format") == 0) opts.format = "table";
            return run_bench(path, opts);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
