#ifndef CONJSCAN_MATRIX_PATH_HPP
#define CONJSCAN_MATRIX_PATH_HPP

#include "conjscan/crossing.hpp"
#include "conjscan/dense_eig.hpp"
#include "conjscan/errors.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace conjscan {

/// C^1 path of dense symmetric matrices on [0,1] with its exact derivative.
/// The finite-dimensional test bed for crossing forms and Morse-index jumps.
struct MatrixPath {
    int dim = 0;
    std::function<SymMatrix(double)> evaluate;
    std::function<SymMatrix(double)> derivative;
    std::string provenance;
};

struct PathCrossing {
    double lambda0 = 0.0;
    int kernel_dim = 0;
    SymMatrix gamma;
    int signature = 0;
    bool regular = false;
    std::vector<std::vector<double>> kernel;
};

struct MorseJumpReport {
    int lhs = 0;  // morse(a) - morse(b)
    int rhs = 0;  // sum of crossing signatures
    bool holds = false;
    bool skipped_degenerate = false;
    std::vector<PathCrossing> crossings;
};

struct IsolationReport {
    double epsilon = 0.0;
    double lower_bound_c = 0.0;
};

/// A0 + lambda A1 + sin(pi lambda) A2 with seeded Gaussian symmetric parts,
/// redrawn (same stream) until both endpoints are well invertible. Fixed
/// Box-Muller transform keeps seeded runs bit-reproducible across platforms.
inline MatrixPath make_random_trig_path(std::uint32_t seed, int dim) {
    if (dim < 2 || dim > 64)
        throw Error(ErrorCode::parameter_out_of_range, "path dimension must lie in [2, 64]");
    std::mt19937 rng(seed);
    auto gauss = [&rng]() {
        double u1 = (static_cast<double>(rng()) + 1.0) / 4294967297.0;
        double u2 = static_cast<double>(rng()) / 4294967296.0;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
    };
    auto draw = [&](int n) {
        SymMatrix m(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) m.set_sym(i, j, gauss() / std::sqrt(static_cast<double>(n)));
        return m;
    };
    constexpr double kPi = 3.14159265358979323846264338327950288;
    for (int attempt = 0; attempt < 32; ++attempt) {
        auto a0 = std::make_shared<SymMatrix>(draw(dim));
        auto a1 = std::make_shared<SymMatrix>(draw(dim));
        auto a2 = std::make_shared<SymMatrix>(draw(dim));
        SymMatrix end0 = *a0;
        SymMatrix end1 = *a0;
        end1.add_scaled(*a1, 1.0); // sin(pi) = 0
        double scale0 = std::max(end0.max_abs(), 1e-30);
        double scale1 = std::max(end1.max_abs(), 1e-30);
        if (sym_sigma_min(end0) < 0.05 * scale0 || sym_sigma_min(end1) < 0.05 * scale1)
            continue;
        MatrixPath path;
        path.dim = dim;
        path.provenance = "random-trigonometric:" + std::to_string(seed);
        path.evaluate = [a0, a1, a2](double lambda) {
            SymMatrix m = *a0;
            m.add_scaled(*a1, lambda);
            m.add_scaled(*a2, std::sin(kPi * lambda));
            return m;
        };
        path.derivative = [a1, a2, dim](double lambda) {
            SymMatrix m(dim);
            m.add_scaled(*a1, 1.0);
            m.add_scaled(*a2, kPi * std::cos(kPi * lambda));
            return m;
        };
        return path;
    }
    throw Error(ErrorCode::endpoint_singular,
                "could not draw a path with invertible endpoints for seed " +
                    std::to_string(seed));
}

namespace detail {

inline int path_negative_count(const MatrixPath& path, double lambda) {
    return sym_negative_count(path.evaluate(lambda));
}

template <typename CountFn>
void refine_path_bracket(CountFn&& count, double a, double b, int ca, int cb, double tol,
                         std::vector<std::pair<double, int>>& out) {
    if (b - a <= tol) {
        out.emplace_back(0.5 * (a + b), cb - ca);
        return;
    }
    double mid = 0.5 * (a + b);
    int cm = count(mid);
    if (cm != ca) refine_path_bracket(count, a, mid, ca, cm, tol, out);
    if (cm != cb) refine_path_bracket(count, mid, b, cm, cb, tol, out);
}

inline PathCrossing analyze_crossing(const MatrixPath& path, double lambda0, double tol,
                                     int expected_dim) {
    SymMatrix l0 = path.evaluate(lambda0);
    auto eig = sym_eigen(l0, /*with_vectors=*/true);
    double norm = std::max(std::fabs(eig.values.front()), std::fabs(eig.values.back()));
    PathCrossing c;
    c.lambda0 = lambda0;
    for (int j = 0; j < eig.n; ++j)
        if (std::fabs(eig.values[j]) <= tol * norm) c.kernel.push_back(eig.vector(j));
    c.kernel_dim = static_cast<int>(c.kernel.size());
    if (expected_dim > 0 && c.kernel_dim != expected_dim)
        throw Error(ErrorCode::bracket_ambiguous,
                    "kernel dimension at lambda0 = " + std::to_string(lambda0) +
                        " does not match the bracketed count change");
    if (c.kernel_dim == 0)
        throw Error(ErrorCode::no_crossing,
                    "no kernel within tolerance at lambda0 = " + std::to_string(lambda0));
    SymMatrix ldot = path.derivative(lambda0);
    c.gamma = SymMatrix(c.kernel_dim);
    for (int i = 0; i < c.kernel_dim; ++i)
        for (int j = i; j < c.kernel_dim; ++j)
            c.gamma.set_sym(i, j, ldot.quadratic(c.kernel[i], c.kernel[j]));
    auto [sig, regular] = crossing_signature(c.gamma, kRegularityTau);
    c.signature = sig;
    c.regular = regular;
    return c;
}

} // namespace detail

/// All sign-change crossings of the path's eigenvalue branches in (a, b),
/// each with kernel, crossing form, signature, and regularity.
inline std::vector<PathCrossing> find_crossings(const MatrixPath& path, int samples, double tol,
                                                double a = 0.0, double b = 1.0) {
    if (samples < 16)
        throw Error(ErrorCode::parameter_out_of_range, "need at least 16 path samples");
    auto count = [&](double l) { return detail::path_negative_count(path, l); };
    {
        SymMatrix la = path.evaluate(a), lb = path.evaluate(b);
        if (sym_sigma_min(la) <= tol * std::max(la.max_abs(), 1e-30) ||
            sym_sigma_min(lb) <= tol * std::max(lb.max_abs(), 1e-30))
            throw Error(ErrorCode::endpoint_singular, "path is singular at an endpoint");
    }
    std::vector<double> ls(samples);
    std::vector<int> counts(samples);
    for (int i = 0; i < samples; ++i) {
        ls[i] = a + (b - a) * i / (samples - 1);
        counts[i] = count(ls[i]);
    }
    std::vector<PathCrossing> out;
    for (int i = 0; i + 1 < samples; ++i) {
        if (counts[i + 1] == counts[i]) continue;
        std::vector<std::pair<double, int>> leaves;
        detail::refine_path_bracket(count, ls[i], ls[i + 1], counts[i], counts[i + 1], 1e-11,
                                    leaves);
        for (auto& [l0, jump] : leaves)
            out.push_back(detail::analyze_crossing(path, l0, tol, std::abs(jump)));
    }
    return out;
}

/// Morse-index jump identity morse(a) - morse(b) = sum of sgn Gamma over the
/// crossings in (a, b). Dense eigendecompositions at the endpoints provide
/// the left side independently of the crossing forms.
inline MorseJumpReport verify_morse_jump(const MatrixPath& path, double a, double b,
                                         int samples = 200, double tol = 1e-8) {
    MorseJumpReport report;
    report.crossings = find_crossings(path, samples, tol, a, b);
    report.lhs = detail::path_negative_count(path, a) - detail::path_negative_count(path, b);
    for (const auto& c : report.crossings) {
        if (!c.regular) {
            report.skipped_degenerate = true;
            report.holds = false;
            return report;
        }
        report.rhs += c.signature;
    }
    report.holds = report.lhs == report.rhs;
    return report;
}

/// Empirical isolation bound at a regular crossing: the largest epsilon from
/// the halving schedule {0.1, 0.05, ...} down to 1e-4 for which
/// sigma_min(L(lambda)) >= C |lambda - lambda0| holds on 50 sampled points of
/// the punctured ball with C at least 1e-6. Degenerate crossings and
/// exhausted schedules raise ISOLATION_UNVERIFIED.
inline IsolationReport verify_isolation_bound(const MatrixPath& path, double lambda0,
                                              double tol = 1e-8) {
    auto probe = detail::analyze_crossing(path, lambda0, tol, /*expected_dim=*/0);
    if (!probe.regular)
        throw Error(ErrorCode::isolation_unverified,
                    "crossing form is degenerate at lambda0 = " + std::to_string(lambda0));
    for (double eps = 0.1; eps >= 1e-4; eps *= 0.5) {
        double c_min = std::numeric_limits<double>::infinity();
        bool usable = true;
        for (int side = -1; side <= 1 && usable; side += 2)
            for (int k = 0; k < 25; ++k) {
                double delta = side * eps * std::pow(2.0, -k / 3.0);
                double l = lambda0 + delta;
                if (l < 0.0 || l > 1.0) { usable = false; break; }
                double ratio = sym_sigma_min(path.evaluate(l)) / std::fabs(delta);
                c_min = std::min(c_min, ratio);
            }
        if (usable && c_min >= 1e-6) return {eps, c_min};
    }
    throw Error(ErrorCode::isolation_unverified,
                "no epsilon above 1e-4 certifies the isolation bound at lambda0 = " +
                    std::to_string(lambda0));
}

} // namespace conjscan

#endif
