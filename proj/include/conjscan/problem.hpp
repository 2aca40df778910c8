#ifndef CONJSCAN_PROBLEM_HPP
#define CONJSCAN_PROBLEM_HPP

#include "conjscan/coefficient.hpp"
#include "conjscan/errors.hpp"
#include "conjscan/expression.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace conjscan {

/// Nonlinearity g(x, xi) with g(x, 0) = 0 and its xi-derivative. The declared
/// linearized potential of a problem must match dg_dxi(., 0).
struct Nonlinearity {
    Expr g;
    Expr dg_dxi;
    double growth_exponent = 1.0;

    static Nonlinearity from_expr(Expr g, double alpha = 1.0) {
        Nonlinearity n;
        n.g = g;
        n.dg_dxi = g.derivative_xi();
        n.growth_exponent = alpha;
        return n;
    }
    static Nonlinearity parse(const std::string& text, double alpha = 1.0) {
        return from_expr(Expr::parse(text, /*allow_xi=*/true), alpha);
    }
};

/// Fourier index of the separated angular factor on the ball; nu = 0 is the
/// purely radial mode (weight 1), every nu >= 1 pairs cos/sin (weight 2).
struct AngularMode {
    int nu = 0;
    int multiplicity_weight() const { return nu == 0 ? 1 : 2; }
};

struct Interval1DProblem {
    CoefficientField a;
    CoefficientField f;
    std::optional<Nonlinearity> g;
};

struct RadialProblem {
    int dimension = 2;
    CoefficientField a; // of the radius
    CoefficientField f; // of the radius
    std::vector<AngularMode> modes;
};

using Problem = std::variant<Interval1DProblem, RadialProblem>;

inline const CoefficientField& diffusion_of(const Problem& p) {
    return std::holds_alternative<Interval1DProblem>(p)
               ? std::get<Interval1DProblem>(p).a
               : std::get<RadialProblem>(p).a;
}
inline const CoefficientField& potential_of(const Problem& p) {
    return std::holds_alternative<Interval1DProblem>(p)
               ? std::get<Interval1DProblem>(p).f
               : std::get<RadialProblem>(p).f;
}

inline std::string digest(const Problem& p) {
    if (std::holds_alternative<Interval1DProblem>(p)) {
        const auto& q = std::get<Interval1DProblem>(p);
        std::string d = "interval|a=" + q.a.digest() + "|f=" + q.f.digest();
        if (q.g) d += "|g=" + q.g->g.to_string();
        return d;
    }
    const auto& q = std::get<RadialProblem>(p);
    std::string d = "radial|n=" + std::to_string(q.dimension) + "|a=" + q.a.digest() +
                    "|f=" + q.f.digest() + "|nu=";
    for (size_t i = 0; i < q.modes.size(); ++i)
        d += (i ? "," : "") + std::to_string(q.modes[i].nu);
    return d;
}

// ---------------------------------------------------------------------------
// Validation

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail;
    std::vector<double> offending; // first few offending sample points
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool passed = true;

    std::string to_text() const {
        std::string out;
        for (const auto& c : checks) {
            out += c.passed ? "[ ok ] " : "[FAIL] ";
            out += c.name;
            if (!c.detail.empty()) out += ": " + c.detail;
            if (!c.offending.empty()) {
                out += " at";
                for (double x : c.offending) {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, " %.12g", x);
                    out += buf;
                }
            }
            out += "\n";
        }
        out += passed ? "validation: PASS\n" : "validation: FAIL\n";
        return out;
    }
};

namespace detail {

inline constexpr int kValidationSamples = 2001;

inline void check_positive(const CoefficientField& a, const char* name,
                           ValidationReport& report) {
    CheckResult c;
    c.name = name;
    for (int i = 0; i < kValidationSamples; ++i) {
        double x = static_cast<double>(i) / (kValidationSamples - 1);
        double v = a(x);
        if (!(v > 0.0) || !std::isfinite(v)) {
            c.passed = false;
            if (c.offending.size() < 5) c.offending.push_back(x);
        }
    }
    if (!c.passed) c.detail = std::string(to_string(ErrorCode::ellipticity_violation)) +
                              " (non-positive diffusion sample)";
    report.checks.push_back(std::move(c));
}

inline void check_nonlinearity(const Nonlinearity& g, const CoefficientField& f,
                               ValidationReport& report) {
    CheckResult trivial;
    trivial.name = "nonlinearity vanishes on the trivial branch";
    CheckResult match;
    match.name = "declared potential matches the linearization";
    for (int i = 0; i < kValidationSamples; ++i) {
        double x = static_cast<double>(i) / (kValidationSamples - 1);
        double g0 = g.g.eval(x, 0.0);
        if (!(std::fabs(g0) <= 1e-12)) {
            trivial.passed = false;
            if (trivial.offending.size() < 5) trivial.offending.push_back(x);
        }
        double dg = g.dg_dxi.eval(x, 0.0);
        double fx = f(x);
        double scale = std::max({std::fabs(dg), std::fabs(fx), 1.0});
        if (!(std::fabs(dg - fx) <= 1e-10 * scale)) {
            match.passed = false;
            if (match.offending.size() < 5) match.offending.push_back(x);
        }
    }
    if (!trivial.passed)
        trivial.detail = to_string(ErrorCode::trivial_branch_violation);
    if (!match.passed) match.detail = to_string(ErrorCode::linearization_mismatch);
    report.checks.push_back(std::move(trivial));
    report.checks.push_back(std::move(match));
}

} // namespace detail

/// Checks every type invariant of a problem; reports pass/fail per check
/// together with offending sample points. Deterministic for identical inputs.
inline ValidationReport validate(const Problem& problem) {
    ValidationReport report;
    if (std::holds_alternative<Interval1DProblem>(problem)) {
        const auto& p = std::get<Interval1DProblem>(problem);
        detail::check_positive(p.a, "diffusion a > 0 on [0,1]", report);
        if (p.g) detail::check_nonlinearity(*p.g, p.f, report);
        if (p.g) {
            CheckResult c;
            c.name = "growth exponent >= 1";
            c.passed = p.g->growth_exponent >= 1.0;
            report.checks.push_back(std::move(c));
        }
    } else {
        const auto& p = std::get<RadialProblem>(problem);
        CheckResult dim;
        dim.name = "dimension >= 2";
        dim.passed = p.dimension >= 2;
        report.checks.push_back(std::move(dim));
        detail::check_positive(p.a, "diffusion a > 0 on [0,1]", report);
        CheckResult modes;
        modes.name = "mode list strictly increasing, weights consistent";
        for (size_t i = 0; i < p.modes.size(); ++i) {
            if (p.modes[i].nu < 0) modes.passed = false;
            if (i > 0 && p.modes[i].nu <= p.modes[i - 1].nu) modes.passed = false;
        }
        if (p.modes.empty()) {
            modes.passed = false;
            modes.detail = "empty mode list";
        }
        report.checks.push_back(std::move(modes));
    }
    for (const auto& c : report.checks) report.passed = report.passed && c.passed;
    return report;
}

} // namespace conjscan

#endif
