// conjscan: detects conjugate instants of linearized Dirichlet problems on
// shrinking 1D/radial domains, certifies crossing forms, verifies the Morse
// index identity, and confirms nonlinear bifurcation by shooting.

#include "conjscan/conjscan.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace conjscan;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolation = 2;

struct CommonOptions {
    std::string problem_path;
    std::string out_dir = ".";
    int grid_nodes = 2001;
    int samples = 256;
    double refine_tol = 1e-9;
    double tau = 1e-8;
    double r_min = 1e-3;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool needs_problem = true) {
    auto* p = cmd->add_option("--problem", opt.problem_path, "problem config file");
    if (needs_problem) p->required();
    cmd->add_option("--out", opt.out_dir, "output directory (default .)");
    cmd->add_option("--n", opt.grid_nodes, "grid node count (default 2001)");
    cmd->add_option("--samples", opt.samples, "scan samples in r (default 256)");
    cmd->add_option("--refine-tol", opt.refine_tol, "bracket refinement width (default 1e-9)");
    cmd->add_option("--tau", opt.tau, "kernel detection tolerance (default 1e-8)");
    cmd->add_option("--r-min", opt.r_min, "lower end of the scan window (default 1e-3)");
}

// Flags win over [scan] config values; config wins over defaults.
ScanParams resolve_params(const CLI::App* cmd, const CommonOptions& opt, const ConfigFile& cfg,
                          int& grid_nodes) {
    ScanParams params = scan_params_from_config(cfg);
    if (cmd->count("--samples")) params.r_samples = opt.samples;
    if (cmd->count("--refine-tol")) params.refine_tol = opt.refine_tol;
    if (cmd->count("--tau")) params.kernel_tau = opt.tau;
    if (cmd->count("--r-min")) params.r_min = opt.r_min;
    grid_nodes = cfg.get_int("scan", "n", opt.grid_nodes);
    if (cmd->count("--n")) grid_nodes = opt.grid_nodes;
    return params;
}

Problem load_problem(const std::string& path, ConfigFile& cfg) {
    cfg = ConfigFile::parse_file(path);
    return problem_from_config(cfg);
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw Error(ErrorCode::config_error, "cannot create output directory " + dir);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::config_error, "cannot write " + path);
    out << content;
}

int finish_scan_outputs(const ScanReport& report, const CommonOptions& opt) {
    ensure_out_dir(opt.out_dir);
    {
        std::ostringstream csv;
        write_scan_csv(report, csv);
        write_file(opt.out_dir + "/scan.csv", csv.str());
    }
    write_file(opt.out_dir + "/summary.json", summary_json(report).dump(2) + "\n");
    print_scan_table(report, std::cout);
    bool violated = report.any_theorem_violation || !report.smale_holds ||
                    !report.bound_satisfied || !report.stepwise_consistent;
    return violated ? kExitViolation : kExitOk;
}

int run_validate(const CommonOptions& opt) {
    ConfigFile cfg;
    Problem problem = load_problem(opt.problem_path, cfg);
    auto report = validate(problem);
    std::cout << report.to_text();
    return report.passed ? kExitOk : kExitUsage;
}

int run_morse(const CLI::App* cmd, const CommonOptions& opt, double r,
              const std::string& dump_prefix) {
    ConfigFile cfg;
    Problem problem = load_problem(opt.problem_path, cfg);
    int grid_nodes = opt.grid_nodes;
    resolve_params(cmd, opt, cfg, grid_nodes);
    Grid grid(grid_nodes);
    if (!dump_prefix.empty()) {
        std::optional<AngularMode> mode;
        if (std::holds_alternative<RadialProblem>(problem)) mode = AngularMode{0};
        auto pencil = assemble_operator(problem, mode, r, grid);
        std::ostringstream k, m;
        pencil.stiffness.dump_triplets(k);
        pencil.mass.dump_triplets(m);
        write_file(dump_prefix + ".K.txt", k.str());
        write_file(dump_prefix + ".M.txt", m.str());
    }
    std::cout << "morse index at r = " << fmt_real(r) << ": " << morse_index(problem, r, grid)
              << "\n";
    return kExitOk;
}

int run_scan(const CLI::App* cmd, const CommonOptions& opt) {
    ConfigFile cfg;
    Problem problem = load_problem(opt.problem_path, cfg);
    int grid_nodes = opt.grid_nodes;
    ScanParams params = resolve_params(cmd, opt, cfg, grid_nodes);
    auto report = scan_problem(problem, Grid(grid_nodes), params);
    return finish_scan_outputs(report, opt);
}

int run_certify(const CLI::App* cmd, const CommonOptions& opt, double r0, int nu) {
    ConfigFile cfg;
    Problem problem = load_problem(opt.problem_path, cfg);
    int grid_nodes = opt.grid_nodes;
    ScanParams params = resolve_params(cmd, opt, cfg, grid_nodes);
    Grid grid(grid_nodes);

    std::vector<CrossingReport> parts;
    if (std::holds_alternative<Interval1DProblem>(problem)) {
        parts.push_back(certify_conjugate_instant(problem, std::nullopt, r0, grid,
                                                  params.kernel_tau));
    } else if (nu >= 0) {
        parts.push_back(certify_conjugate_instant(problem, AngularMode{nu}, r0, grid,
                                                  params.kernel_tau));
    } else {
        const auto& radial = std::get<RadialProblem>(problem);
        auto counts = mode_negative_counts(radial, 1.0, grid);
        for (size_t m = 0; m < counts.size(); ++m) {
            try {
                parts.push_back(certify_conjugate_instant(
                    problem, AngularMode{static_cast<int>(m)}, r0, grid, params.kernel_tau));
            } catch (const Error& e) {
                if (e.code() != ErrorCode::no_crossing) throw;
            }
        }
        if (parts.empty())
            throw Error(ErrorCode::no_crossing,
                        "no mode has a kernel at r0 = " + std::to_string(r0));
    }
    auto merged = merge_crossing_reports(std::move(parts));

    ScanReport report;
    report.problem_digest = digest(problem);
    report.grid_nodes = grid_nodes;
    report.params = params;
    report.morse_index_at_1 = morse_index(problem, 1.0, grid);
    report.smale_lhs = report.morse_index_at_1;
    report.smale_rhs = merged.regular ? merged.multiplicity : 0;
    report.smale_holds = true; // a single certificate does not test the identity
    report.any_theorem_violation = merged.theorem_violated;
    report.crossings.push_back(std::move(merged));
    ensure_out_dir(opt.out_dir);
    std::ostringstream csv;
    write_scan_csv(report, csv);
    write_file(opt.out_dir + "/scan.csv", csv.str());
    write_file(opt.out_dir + "/summary.json", summary_json(report).dump(2) + "\n");

    const auto& c = report.crossings.front();
    std::cout << "r0 = " << fmt_real(c.r0) << ", multiplicity = " << c.multiplicity
              << ", signature = " << c.signature << ", regular = "
              << (c.regular ? "true" : "false") << "\n"
              << "gamma eigenvalues in [" << fmt_real(c.gamma_min_eig) << ", "
              << fmt_real(c.gamma_max_eig) << "], forms disagree by "
              << fmt_real(c.forms_rel_disagreement) << "\n";
    if (c.kernel_suspect)
        std::cout << to_string(ErrorCode::kernel_suspect)
                  << ": a kernel vector has a vanishing normal derivative\n";
    if (c.form_disagreement)
        std::cout << to_string(ErrorCode::form_disagreement)
                  << ": evaluations differ beyond 1e-2\n";
    if (c.theorem_violated) {
        std::cout << to_string(ErrorCode::theorem_violation)
                  << ": crossing form is not negative definite\n";
        return kExitViolation;
    }
    return kExitOk;
}

int run_matrix_lab(const CLI::App* cmd, const CommonOptions& opt, unsigned seed, int paths,
                   std::vector<int> dims, int samples) {
    if (!opt.problem_path.empty()) {
        auto cfg = ConfigFile::parse_file(opt.problem_path);
        cfg.reject_unknown(config_schema());
        if (!cmd->count("--seed"))
            seed = static_cast<unsigned>(cfg.get_int("matrix_lab", "seed", static_cast<int>(seed)));
        if (!cmd->count("--paths")) paths = cfg.get_int("matrix_lab", "paths", paths);
        if (!cmd->count("--samples")) samples = cfg.get_int("matrix_lab", "samples", samples);
        if (!cmd->count("--dims"))
            if (auto d = cfg.get("matrix_lab", "dims"))
                dims = ConfigFile::to_int_list(*d, "matrix_lab.dims");
    }
    if (paths < 1)
        throw Error(ErrorCode::parameter_out_of_range, "matrix-lab needs at least one path");
    ensure_out_dir(opt.out_dir);
    std::ostringstream csv;
    csv << "seed,d,n_crossings,lhs,rhs,holds\n";
    bool any_violation = false;
    int degenerate = 0;
    struct Row {
        unsigned seed;
        int d;
        MorseJumpReport report;
    };
    std::vector<Row> rows;
    for (int d : dims)
        for (int k = 0; k < paths; ++k) rows.push_back({seed + static_cast<unsigned>(k), d, {}});
    parallel_for(static_cast<int>(rows.size()), [&](int i) {
        auto path = make_random_trig_path(rows[i].seed, rows[i].d);
        rows[i].report = verify_morse_jump(path, 0.0, 1.0, samples);
    });
    for (const auto& row : rows) {
        const auto& r = row.report;
        csv << row.seed << ',' << row.d << ',' << r.crossings.size() << ',' << r.lhs << ','
            << r.rhs << ',' << (r.holds ? "true" : "false") << "\n";
        if (r.skipped_degenerate) ++degenerate;
        else if (!r.holds) any_violation = true;
    }
    write_file(opt.out_dir + "/matrix_lab.csv", csv.str());
    std::cout << csv.str();
    if (degenerate > 0)
        std::cout << "warning: " << degenerate
                  << " path(s) skipped with a degenerate crossing\n";
    std::cout << (any_violation ? "morse jump identity: VIOLATED\n"
                                : "morse jump identity: holds on all paths\n");
    return any_violation ? kExitViolation : kExitOk;
}

int run_bifurcate(const CLI::App* cmd, const CommonOptions& opt,
                  const std::string& schedule_text) {
    ConfigFile cfg;
    Problem problem = load_problem(opt.problem_path, cfg);
    int grid_nodes = opt.grid_nodes;
    ScanParams params = resolve_params(cmd, opt, cfg, grid_nodes);
    std::vector<double> schedule{1e-2, 1e-3, 1e-4};
    if (auto s = cfg.get("bifurcate", "s_schedule"))
        schedule = ConfigFile::to_real_list(*s, "bifurcate.s_schedule");
    if (cmd->count("--s-schedule"))
        schedule = ConfigFile::to_real_list(schedule_text, "--s-schedule");

    auto scan = scan_problem(problem, Grid(grid_nodes), params);
    auto verification = verify_bifurcation_theorem(problem, scan, schedule);

    ensure_out_dir(opt.out_dir);
    std::ostringstream csv;
    write_branch_csv(verification.samples, csv);
    write_file(opt.out_dir + "/bifurcate.csv", csv.str());
    std::cout << csv.str();
    std::cout << "conjugate instants:";
    for (const auto& c : scan.crossings) std::cout << ' ' << fmt_real(c.r0);
    std::cout << "\nbranch limits:";
    for (double r : verification.limit_radii) std::cout << ' ' << fmt_real(r);
    std::cout << "\n";
    for (const auto& note : verification.notes) std::cout << "note: " << note << "\n";
    bool ok = verification.instants_all_matched && verification.converse_ok &&
              verification.count_ok && verification.amplitudes_decreasing;
    if (!verification.converse_ok)
        std::cout << to_string(ErrorCode::converse_violation)
                  << ": a branch limit matches no conjugate instant\n";
    std::cout << (ok ? "bifurcation theorem: confirmed\n" : "bifurcation theorem: FAILED\n");
    return ok ? kExitOk : kExitViolation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"conjugate instants, crossing forms, and bifurcation for Dirichlet "
                 "problems on shrinking domains"};
    app.require_subcommand(1);

    CommonOptions opt;

    auto* validate_cmd = app.add_subcommand("validate", "check problem invariants");
    add_common(validate_cmd, opt);

    auto* morse_cmd = app.add_subcommand("morse", "Morse index at a given radius");
    add_common(morse_cmd, opt);
    double morse_r = 1.0;
    std::string dump_prefix;
    morse_cmd->add_option("--r", morse_r, "radius (default 1)");
    morse_cmd->add_option("--dump-pencil", dump_prefix,
                          "write K/M as 'i j value' triplets to PREFIX.K.txt / PREFIX.M.txt");

    auto* scan_cmd = app.add_subcommand("scan", "locate and certify all conjugate instants");
    add_common(scan_cmd, opt);

    auto* certify_cmd = app.add_subcommand("certify", "certify one conjugate instant");
    add_common(certify_cmd, opt);
    double r0 = 0.0;
    int certify_nu = -1;
    certify_cmd->add_option("--r0", r0, "instant to certify")->required();
    certify_cmd->add_option("--nu", certify_nu, "angular mode (radial; default: all modes)");

    auto* smale_cmd =
        app.add_subcommand("verify-smale", "scan and verify the Morse index identity");
    add_common(smale_cmd, opt);

    auto* lab_cmd = app.add_subcommand("matrix-lab",
                                       "Morse-index jump identity on random matrix paths");
    lab_cmd->add_option("--problem", opt.problem_path,
                        "optional config carrying a [matrix_lab] section");
    lab_cmd->add_option("--out", opt.out_dir, "output directory (default .)");
    unsigned lab_seed = 1;
    int lab_paths = 100;
    int lab_samples = 200;
    std::vector<int> lab_dims{4, 8, 16};
    lab_cmd->add_option("--seed", lab_seed, "base seed (default 1)");
    lab_cmd->add_option("--paths", lab_paths, "paths per dimension (default 100)");
    lab_cmd->add_option("--dims", lab_dims, "path dimensions (default 4 8 16)");
    lab_cmd->add_option("--samples", lab_samples, "samples along the path (default 200)");

    auto* bif_cmd = app.add_subcommand("bifurcate",
                                       "confirm nonlinear bifurcation at the conjugate instants");
    add_common(bif_cmd, opt);
    std::string schedule_text;
    bif_cmd->add_option("--s-schedule", schedule_text,
                        "initial slopes, comma separated (default 1e-2,1e-3,1e-4)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitUsage : kExitUsage;
    }

    try {
        if (validate_cmd->parsed()) return run_validate(opt);
        if (morse_cmd->parsed()) return run_morse(morse_cmd, opt, morse_r, dump_prefix);
        if (scan_cmd->parsed()) return run_scan(scan_cmd, opt);
        if (certify_cmd->parsed()) return run_certify(certify_cmd, opt, r0, certify_nu);
        if (smale_cmd->parsed()) return run_scan(smale_cmd, opt);
        if (lab_cmd->parsed())
            return run_matrix_lab(lab_cmd, opt, lab_seed, lab_paths, lab_dims, lab_samples);
        if (bif_cmd->parsed()) return run_bifurcate(bif_cmd, opt, schedule_text);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
            case ErrorCode::theorem_violation:
            case ErrorCode::smale_violation:
            case ErrorCode::converse_violation:
                return kExitViolation;
            default:
                return kExitUsage;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
