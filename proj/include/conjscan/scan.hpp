#ifndef CONJSCAN_SCAN_HPP
#define CONJSCAN_SCAN_HPP

#include "conjscan/crossing.hpp"
#include "conjscan/morse.hpp"
#include "conjscan/parallel.hpp"
#include "conjscan/problem.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace conjscan {

struct ScanParams {
    int r_samples = 256;      // >= 64
    double refine_tol = 1e-9; // bracket width target and cross-mode merge radius
    double kernel_tau = 1e-8;
    double r_min = 1e-3; // the scan covers (r_min, 1]

    void check() const {
        if (r_samples < 64)
            throw Error(ErrorCode::parameter_out_of_range, "r_samples must be >= 64");
        if (!(refine_tol > 0.0) || refine_tol > 1e-2)
            throw Error(ErrorCode::parameter_out_of_range, "refine_tol must lie in (0, 1e-2]");
        if (!(kernel_tau > 0.0) || kernel_tau > 1e-3)
            throw Error(ErrorCode::parameter_out_of_range, "kernel tau must lie in (0, 1e-3]");
        if (!(r_min > 0.0) || r_min >= 1.0)
            throw Error(ErrorCode::parameter_out_of_range, "r_min must lie in (0, 1)");
    }
};

/// Ordered conjugate instants with certificates, the Morse index at r = 1,
/// and the Smale-identity verdict.
struct ScanReport {
    std::string problem_digest;
    int grid_nodes = 0;
    ScanParams params;
    std::vector<CrossingReport> crossings; // strictly increasing in r0
    int morse_index_at_1 = 0;
    int smale_lhs = 0;
    int smale_rhs = 0;
    bool smale_holds = false;
    int bifurcation_lower_bound = 0;
    bool bound_satisfied = true;
    bool m1_nonzero = false;
    bool any_theorem_violation = false;
    bool stepwise_consistent = true;
    std::vector<std::pair<double, int>> morse_profile; // (r, Morse index) between crossings
    std::vector<std::string> warnings;
};

namespace detail {

struct RawCrossing {
    int mode_nu = -1; // -1 on the interval
    double r0 = 0.0;
    int jump = 0; // change of the negative count across the bracket
};

// Recursive count bisection: splits a bracket until each sign change of a
// tracked eigenvalue branch is localized to width <= refine_tol. A leaf where
// the count still changes by more than one is a coincident crossing; the
// certificate later cross-checks its kernel dimension.
template <typename CountFn>
void refine_bracket(CountFn&& count, double a, double b, int ca, int cb, double tol,
                    std::vector<std::pair<double, int>>& out) {
    if (b - a <= tol) {
        out.emplace_back(0.5 * (a + b), cb - ca);
        return;
    }
    double mid = 0.5 * (a + b);
    int cm = count(mid);
    if (cm != ca) refine_bracket(count, a, mid, ca, cm, tol, out);
    if (cm != cb) refine_bracket(count, mid, b, cm, cb, tol, out);
}

// Scans one mode (or the interval problem) for eigenvalue-branch zero
// crossings of the pencil along r.
inline std::vector<RawCrossing> scan_mode(const Problem& problem,
                                          std::optional<AngularMode> mode, const Grid& grid,
                                          const ScanParams& params,
                                          std::vector<std::string>& warnings) {
    auto count_at = [&](double r) {
        return negative_count(assemble_operator(problem, mode, r, grid));
    };
    int samples = params.r_samples;
    std::vector<double> rs;
    std::vector<int> counts;
    for (int attempt = 0;; ++attempt) {
        rs.resize(samples);
        counts.resize(samples);
        for (int i = 0; i < samples; ++i) {
            rs[i] = params.r_min + (1.0 - params.r_min) * i / (samples - 1);
            counts[i] = count_at(rs[i]);
        }
        bool multi = false;
        for (int i = 0; i + 1 < samples; ++i)
            if (std::abs(counts[i + 1] - counts[i]) >= 2) multi = true;
        if (!multi || attempt == 4) break;
        samples *= 2; // two branches crossed inside one unrefined bracket
    }
    if (counts.front() != 0)
        warnings.push_back("negative eigenvalues already present at r_min; crossings below "
                           "the scan window are not observed");

    std::vector<RawCrossing> found;
    for (int i = 0; i + 1 < samples; ++i) {
        if (counts[i + 1] == counts[i]) continue;
        std::vector<std::pair<double, int>> leaves;
        refine_bracket(count_at, rs[i], rs[i + 1], counts[i], counts[i + 1],
                       params.refine_tol, leaves);
        for (auto& [r0, jump] : leaves)
            found.push_back({mode ? mode->nu : -1, r0, jump});
    }
    return found;
}

inline int max_multiplicity(const std::vector<CrossingReport>& crossings) {
    int m = 0;
    for (const auto& c : crossings) m = std::max(m, c.multiplicity);
    return m;
}

} // namespace detail

/// Full pipeline: locate all conjugate instants in (r_min, 1), certify each
/// crossing, merge cross-mode coincidences, verify the Smale identity both
/// globally and stepwise, and evaluate the bifurcation-count lower bound.
inline ScanReport scan_problem(const Problem& problem, const Grid& grid,
                               const ScanParams& params = {}) {
    params.check();
    {
        auto v = validate(problem);
        if (!v.passed)
            throw Error(ErrorCode::config_error, "problem failed validation:\n" + v.to_text());
    }

    ScanReport report;
    report.problem_digest = digest(problem);
    report.grid_nodes = grid.node_count();
    report.params = params;

    const bool radial = std::holds_alternative<RadialProblem>(problem);
    std::vector<std::optional<AngularMode>> modes;
    if (!radial) {
        modes.push_back(std::nullopt);
        auto pencil = assemble_operator(problem, std::nullopt, 1.0, grid);
        report.morse_index_at_1 = negative_count(pencil);
        if (!kernel_basis(pencil, params.kernel_tau).empty()) report.m1_nonzero = true;
    } else {
        const auto& rp = std::get<RadialProblem>(problem);
        auto counts = mode_negative_counts(rp, 1.0, grid);
        for (size_t nu = 0; nu < counts.size(); ++nu) {
            modes.push_back(AngularMode{static_cast<int>(nu)});
            report.morse_index_at_1 +=
                AngularMode{static_cast<int>(nu)}.multiplicity_weight() * counts[nu];
        }
        for (const auto& mode : modes) {
            auto pencil = assemble_operator(problem, mode, 1.0, grid);
            if (!kernel_basis(pencil, params.kernel_tau).empty()) report.m1_nonzero = true;
        }
    }
    if (report.m1_nonzero)
        report.warnings.push_back(
            "M1_NONZERO: kernel at r = 1 is nontrivial; the identity sums only over r < 1");

    // per-mode eigenvalue-branch scans
    std::vector<std::vector<detail::RawCrossing>> per_mode(modes.size());
    std::vector<std::vector<std::string>> per_mode_warnings(modes.size());
    parallel_for(static_cast<int>(modes.size()), [&](int i) {
        per_mode[i] = detail::scan_mode(problem, modes[i], grid, params, per_mode_warnings[i]);
    });
    std::vector<detail::RawCrossing> raw;
    for (size_t i = 0; i < per_mode.size(); ++i) {
        raw.insert(raw.end(), per_mode[i].begin(), per_mode[i].end());
        for (auto& w : per_mode_warnings[i]) report.warnings.push_back(w);
    }

    // certify every raw crossing (per contributing mode)
    std::vector<CrossingReport> certified(raw.size());
    parallel_for(static_cast<int>(raw.size()), [&](int i) {
        std::optional<AngularMode> mode;
        if (raw[i].mode_nu >= 0) mode = AngularMode{raw[i].mode_nu};
        certified[i] = certify_conjugate_instant(problem, mode, raw[i].r0, grid,
                                                 params.kernel_tau);
        if (certified[i].contributions.front().radial_dim != std::abs(raw[i].jump))
            throw Error(ErrorCode::bracket_ambiguous,
                        "kernel dimension at r0 = " + std::to_string(raw[i].r0) +
                            " does not match the bracketed eigenvalue count change");
    });

    // merge cross-mode coincidences within refine_tol, ordered in r
    std::sort(certified.begin(), certified.end(),
              [](const CrossingReport& a, const CrossingReport& b) { return a.r0 < b.r0; });
    for (size_t i = 0; i < certified.size();) {
        size_t j = i + 1;
        while (j < certified.size() && certified[j].r0 - certified[j - 1].r0 <= params.refine_tol)
            ++j;
        std::vector<CrossingReport> group(certified.begin() + i, certified.begin() + j);
        report.crossings.push_back(merge_crossing_reports(std::move(group)));
        i = j;
    }

    // isolation radius per crossing: kernel must vanish at r0 +- delta and
    // r0 +- delta/2 (the discrete shadow of "regular crossings are isolated")
    const double spacing = (1.0 - params.r_min) / (params.r_samples - 1);
    for (size_t i = 0; i < report.crossings.size(); ++i) {
        auto& c = report.crossings[i];
        double gap = spacing;
        if (i > 0) gap = std::min(gap, 0.45 * (c.r0 - report.crossings[i - 1].r0));
        if (i + 1 < report.crossings.size())
            gap = std::min(gap, 0.45 * (report.crossings[i + 1].r0 - c.r0));
        gap = std::min({gap, 0.45 * (1.0 - c.r0), 0.45 * (c.r0 - params.r_min)});
        double delta = gap;
        const double floor = 10.0 * params.refine_tol;
        auto kernel_empty_everywhere = [&](double d) {
            for (double r : {c.r0 - d, c.r0 + d, c.r0 - 0.5 * d, c.r0 + 0.5 * d}) {
                for (const auto& mode : modes) {
                    auto pencil = assemble_operator(problem, mode, r, grid);
                    if (!kernel_basis(pencil, params.kernel_tau).empty()) return false;
                }
            }
            return true;
        };
        while (delta >= floor && !kernel_empty_everywhere(delta)) delta *= 0.5;
        if (delta < floor) {
            c.isolation_delta = 0.0;
            report.warnings.push_back("no isolation radius found for crossing at r0 = " +
                                      std::to_string(c.r0));
        } else {
            c.isolation_delta = delta;
        }
    }

    // Smale identity; degenerate crossings are excluded from the sum
    report.smale_lhs = report.morse_index_at_1;
    report.smale_rhs = 0;
    for (const auto& c : report.crossings) {
        if (c.regular) report.smale_rhs += c.multiplicity;
        else
            report.warnings.push_back("degenerate crossing at r0 = " + std::to_string(c.r0) +
                                      " excluded from the multiplicity sum");
        report.any_theorem_violation = report.any_theorem_violation || c.theorem_violated;
    }
    report.smale_holds = report.smale_lhs == report.smale_rhs;

    // stepwise profile: Morse index between consecutive crossings
    {
        std::vector<double> probes;
        double prev = params.r_min;
        for (const auto& c : report.crossings) {
            probes.push_back(0.5 * (prev + c.r0));
            prev = c.r0;
        }
        probes.push_back(0.5 * (prev + 1.0));
        std::vector<int> morse_at(probes.size());
        parallel_for(static_cast<int>(probes.size()), [&](int i) {
            morse_at[i] = morse_index(problem, probes[i], grid);
        });
        int expected = 0;
        for (size_t i = 0; i < probes.size(); ++i) {
            report.morse_profile.emplace_back(probes[i], morse_at[i]);
            if (morse_at[i] != expected) report.stepwise_consistent = false;
            if (i < report.crossings.size()) expected += report.crossings[i].multiplicity;
        }
        if (!report.stepwise_consistent)
            report.warnings.push_back(
                "Morse index profile does not step by the crossing multiplicities");
    }

    // Corollary bound; the crossing count must reach it
    int max_m = detail::max_multiplicity(report.crossings);
    report.bifurcation_lower_bound =
        (report.morse_index_at_1 > 0 && max_m > 0) ? report.morse_index_at_1 / max_m : 0;
    report.bound_satisfied =
        static_cast<int>(report.crossings.size()) >= report.bifurcation_lower_bound;
    return report;
}

/// Conjugate instants with multiplicities, as (r0, m) pairs.
inline std::vector<std::pair<double, int>> scan_conjugate_instants(const Problem& problem,
                                                                   const Grid& grid,
                                                                   const ScanParams& params = {}) {
    auto report = scan_problem(problem, grid, params);
    std::vector<std::pair<double, int>> out;
    for (const auto& c : report.crossings) out.emplace_back(c.r0, c.multiplicity);
    return out;
}

/// Runs the scan and returns the report whose smale_holds field carries the
/// verdict; callers distinguish SMALE_VIOLATION via that flag.
inline ScanReport verify_smale_identity(const Problem& problem, const Grid& grid,
                                        const ScanParams& params = {}) {
    return scan_problem(problem, grid, params);
}

/// floor(morse index / max multiplicity); zero when nothing crosses.
inline int bifurcation_lower_bound(const ScanReport& report) {
    return report.bifurcation_lower_bound;
}

} // namespace conjscan

#endif
