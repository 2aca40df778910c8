#ifndef CONJSCAN_REPORT_IO_HPP
#define CONJSCAN_REPORT_IO_HPP

#include "conjscan/scan.hpp"
#include "conjscan/shooting.hpp"

#include <json.hpp>

#include <cstdio>
#include <ostream>
#include <string>

namespace conjscan {

/// Reals serialize with 12 significant digits for reproducible goldens.
inline std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Parse-back of the 12-digit rounding, for JSON number fields.
inline double round_real(double v) { return std::strtod(fmt_real(v).c_str(), nullptr); }

inline constexpr const char* kScanCsvHeader =
    "r0,multiplicity,signature,regular,gamma_min_eig,gamma_max_eig,forms_rel_disagreement";

inline void write_scan_csv(const ScanReport& report, std::ostream& os) {
    os << kScanCsvHeader << "\n";
    for (const auto& c : report.crossings) {
        os << fmt_real(c.r0) << ',' << c.multiplicity << ',' << c.signature << ','
           << (c.regular ? "true" : "false") << ',' << fmt_real(c.gamma_min_eig) << ','
           << fmt_real(c.gamma_max_eig) << ',' << fmt_real(c.forms_rel_disagreement) << "\n";
    }
}

inline nlohmann::json summary_json(const ScanReport& report) {
    nlohmann::json j;
    j["problem"] = report.problem_digest;
    j["grid_nodes"] = report.grid_nodes;
    j["r_samples"] = report.params.r_samples;
    j["refine_tol"] = round_real(report.params.refine_tol);
    j["kernel_tau"] = round_real(report.params.kernel_tau);
    j["r_min"] = round_real(report.params.r_min);
    j["morse_index_at_1"] = report.morse_index_at_1;
    j["smale_lhs"] = report.smale_lhs;
    j["smale_rhs"] = report.smale_rhs;
    j["smale_holds"] = report.smale_holds;
    j["bifurcation_lower_bound"] = report.bifurcation_lower_bound;
    j["bound_satisfied"] = report.bound_satisfied;
    j["m1_nonzero"] = report.m1_nonzero;
    j["stepwise_consistent"] = report.stepwise_consistent;
    j["theorem_violation"] = report.any_theorem_violation;
    j["warnings"] = report.warnings;
    nlohmann::json crossings = nlohmann::json::array();
    for (const auto& c : report.crossings) {
        nlohmann::json jc;
        jc["r0"] = round_real(c.r0);
        jc["multiplicity"] = c.multiplicity;
        jc["signature"] = c.signature;
        jc["regular"] = c.regular;
        jc["condition"] = round_real(c.condition);
        jc["gamma_min_eig"] = round_real(c.gamma_min_eig);
        jc["gamma_max_eig"] = round_real(c.gamma_max_eig);
        jc["forms_rel_disagreement"] = round_real(c.forms_rel_disagreement);
        jc["isolation_delta"] = round_real(c.isolation_delta);
        jc["kernel_suspect"] = c.kernel_suspect;
        nlohmann::json contribs = nlohmann::json::array();
        for (const auto& m : c.contributions)
            contribs.push_back({{"nu", m.nu}, {"radial_dim", m.radial_dim}});
        jc["contributions"] = contribs;
        crossings.push_back(jc);
    }
    j["crossings"] = crossings;
    nlohmann::json profile = nlohmann::json::array();
    for (const auto& [r, mu] : report.morse_profile)
        profile.push_back({{"r", round_real(r)}, {"morse_index", mu}});
    j["morse_profile"] = profile;
    return j;
}

inline void print_scan_table(const ScanReport& report, std::ostream& os) {
    os << "problem: " << report.problem_digest << "\n";
    os << "grid nodes: " << report.grid_nodes << ", r samples: " << report.params.r_samples
       << ", refine tol: " << fmt_real(report.params.refine_tol) << "\n";
    if (report.crossings.empty()) {
        os << "no conjugate instants in the scan window\n";
    } else {
        os << "      r0        m  sig  regular  gamma_max_eig  forms_dev   iso_delta\n";
        for (const auto& c : report.crossings) {
            char line[160];
            std::snprintf(line, sizeof line, "%12.8f  %3d  %3d  %7s  %13.6g  %9.3g  %10.4g\n",
                          c.r0, c.multiplicity, c.signature, c.regular ? "yes" : "no",
                          c.gamma_max_eig, c.forms_rel_disagreement, c.isolation_delta);
            os << line;
        }
    }
    os << "morse index at r=1: " << report.morse_index_at_1 << "\n";
    os << "identity: mu_- = " << report.smale_lhs << ", sum m(r) = " << report.smale_rhs
       << " -> " << (report.smale_holds ? "holds" : to_string(ErrorCode::smale_violation))
       << "\n";
    os << "bifurcation lower bound: " << report.bifurcation_lower_bound << " ("
       << report.crossings.size() << " crossings found)\n";
    for (const auto& w : report.warnings) os << "warning: " << w << "\n";
    if (report.any_theorem_violation)
        os << to_string(ErrorCode::theorem_violation)
           << ": a crossing form failed its negativity certificate\n";
}

inline void write_branch_csv(const std::vector<BranchSample>& samples, std::ostream& os) {
    os << "s,k,r,amplitude\n";
    for (const auto& b : samples)
        os << fmt_real(b.s) << ',' << b.k << ',' << fmt_real(b.r) << ',' << fmt_real(b.amplitude)
           << "\n";
}

} // namespace conjscan

#endif
