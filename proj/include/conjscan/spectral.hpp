#ifndef CONJSCAN_SPECTRAL_HPP
#define CONJSCAN_SPECTRAL_HPP

#include "conjscan/assembly.hpp"
#include "conjscan/banded.hpp"
#include "conjscan/errors.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace conjscan {

struct Eigenpair {
    double lambda = 0.0;
    std::vector<double> vec; // M-normalized coefficients
};

struct KernelBasis {
    double tolerance = 0.0;
    std::vector<std::vector<double>> vectors; // M-orthonormal
    std::vector<double> lambdas;

    bool empty() const { return vectors.empty(); }
    int dimension() const { return static_cast<int>(vectors.size()); }
};

/// Counts of generalized eigenvalues of (K, M) below / at / above sigma.
/// A factorization breakdown retries with sigma perturbed by 1e-12 relative,
/// three times, before giving up.
inline Inertia pencil_inertia(const OperatorPencil& pencil, double sigma) {
    const double scale =
        std::max({std::fabs(sigma), pencil.stiffness.max_abs_diag(), 1.0});
    static constexpr double kSteps[4] = {0.0, 1.0, -1.0, 2.0};
    for (double step : kSteps) {
        double s = sigma + step * 1e-12 * scale;
        auto shifted = SymmetricBandedMatrix::shifted(pencil.stiffness, pencil.mass, s);
        if (auto inertia = ldlt_inertia(shifted)) return *inertia;
    }
    throw Error(ErrorCode::inertia_breakdown,
                "symmetric factorization failed after 3 shifted retries at sigma = " +
                    std::to_string(sigma));
}

inline int negative_count(const OperatorPencil& pencil, double sigma = 0.0) {
    return pencil_inertia(pencil, sigma).n_neg;
}

namespace detail {

// Inertia-certified enclosure of the pencil spectrum by count expansion.
inline std::pair<double, double> pencil_spectrum_bounds(const OperatorPencil& pencil) {
    const int order = pencil.stiffness.order();
    double b = std::max(1.0, pencil.stiffness.max_abs_diag());
    for (int it = 0; it < 200 && negative_count(pencil, -b) > 0; ++it) b *= 4.0;
    double lo = -b;
    b = std::max(1.0, pencil.stiffness.max_abs_diag());
    for (int it = 0; it < 200 && negative_count(pencil, b) < order; ++it) b *= 4.0;
    return {lo, b};
}

// j-th smallest generalized eigenvalue (1-based), by bisection on counts.
inline double bisect_eigenvalue(const OperatorPencil& pencil, int j, double lo, double hi,
                                double rel_tol = 1e-10) {
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double width = hi - lo;
        if (width <= rel_tol * std::max({std::fabs(lo), std::fabs(hi), 1e-30}) ||
            width <= 1e-14 * std::max(1.0, pencil.stiffness.max_abs_diag()))
            break;
        if (negative_count(pencil, mid) >= j) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

inline double m_inner(const OperatorPencil& pencil, const std::vector<double>& x,
                      const std::vector<double>& y) {
    auto my = pencil.mass.multiply(y);
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * my[i];
    return s;
}

inline void m_normalize(const OperatorPencil& pencil, std::vector<double>& x) {
    double nrm = std::sqrt(std::max(m_inner(pencil, x, x), 0.0));
    if (nrm > 0.0)
        for (double& v : x) v /= nrm;
}

// Deterministic start vector; distinct per eigenvalue index.
inline std::vector<double> seeded_vector(int n, int salt) {
    std::vector<double> v(n);
    std::uint64_t state = 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(salt) * 0xbf58476d1ce4e5b9ull;
    for (int i = 0; i < n; ++i) {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        v[i] = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
    }
    return v;
}

// Inverse iteration for the generalized problem at shift sigma, with
// M-orthogonalization against previously accepted cluster vectors.
inline Eigenpair inverse_iterate(const OperatorPencil& pencil, double sigma,
                                 const std::vector<std::vector<double>>& avoid, int salt) {
    const int n = pencil.stiffness.order();
    const double knorm = pencil.stiffness.inf_norm();
    auto shifted = SymmetricBandedMatrix::shifted(pencil.stiffness, pencil.mass, sigma);
    TridiagonalLU lu(shifted);
    std::vector<double> x = seeded_vector(n, salt);
    auto orthogonalize = [&](std::vector<double>& v) {
        for (const auto& w : avoid) {
            double c = m_inner(pencil, v, w);
            for (int i = 0; i < n; ++i) v[i] -= c * w[i];
        }
    };
    orthogonalize(x);
    m_normalize(pencil, x);
    for (int it = 0; it < 200; ++it) {
        std::vector<double> rhs = pencil.mass.multiply(x);
        lu.solve(rhs);
        orthogonalize(rhs);
        m_normalize(pencil, rhs);
        x = std::move(rhs);
        // Rayleigh quotient and residual
        auto kx = pencil.stiffness.multiply(x);
        auto mx = pencil.mass.multiply(x);
        double rho = 0.0;
        for (int i = 0; i < n; ++i) rho += x[i] * kx[i];
        double resid = 0.0;
        for (int i = 0; i < n; ++i) {
            double r = kx[i] - rho * mx[i];
            resid += r * r;
        }
        resid = std::sqrt(resid);
        if (resid <= 1e-8 * knorm || (it >= 8 && resid <= 1e-6 * knorm))
            return {rho, std::move(x)};
    }
    throw Error(ErrorCode::eigensolver_stagnation,
                "inverse iteration exceeded 200 sweeps at shift " + std::to_string(sigma));
}

} // namespace detail

/// The k algebraically smallest generalized eigenvalues with M-normalized
/// eigenvectors. Bisection on inertia counts locates each eigenvalue;
/// inverse iteration recovers vectors, M-orthogonalizing inside clusters.
inline std::vector<Eigenpair> smallest_eigenpairs(const OperatorPencil& pencil, int k) {
    const int order = pencil.stiffness.order();
    if (k < 0 || k > order)
        throw Error(ErrorCode::parameter_out_of_range,
                    "requested " + std::to_string(k) + " eigenpairs of an order-" +
                        std::to_string(order) + " pencil");
    std::vector<Eigenpair> out;
    if (k == 0) return out;
    auto [lo, hi] = detail::pencil_spectrum_bounds(pencil);
    std::vector<double> lambdas(k);
    for (int j = 1; j <= k; ++j)
        lambdas[j - 1] = detail::bisect_eigenvalue(pencil, j, lo, hi);

    const double scale = std::max(1.0, pencil.stiffness.max_abs_diag());
    std::vector<std::vector<double>> cluster;
    for (int j = 0; j < k; ++j) {
        bool same_cluster =
            j > 0 && std::fabs(lambdas[j] - lambdas[j - 1]) <=
                         1e-8 * scale + 1e-7 * std::fabs(lambdas[j]);
        if (!same_cluster) cluster.clear();
        auto pair = detail::inverse_iterate(pencil, lambdas[j], cluster, j + 1);
        cluster.push_back(pair.vec);
        out.push_back(std::move(pair));
    }
    return out;
}

/// M-orthonormal basis of the near-kernel: all generalized eigenvectors with
/// |lambda| <= tau * max|K_ii|. The dimension is certified by the inertia
/// difference at the window edges.
inline KernelBasis kernel_basis(const OperatorPencil& pencil, double tau) {
    if (!(tau > 0.0) || tau > 1e-3)
        throw Error(ErrorCode::parameter_out_of_range,
                    "kernel tolerance must lie in (0, 1e-3]");
    KernelBasis basis;
    basis.tolerance = tau;
    const double window = tau * std::max(pencil.stiffness.max_abs_diag(), 1.0);
    const int below = negative_count(pencil, -window);
    const int inside = negative_count(pencil, window) - below;
    if (inside == 0) return basis;

    std::vector<std::vector<double>> accepted;
    for (int j = below + 1; j <= below + inside; ++j) {
        double lambda = detail::bisect_eigenvalue(pencil, j, -window, window);
        auto pair = detail::inverse_iterate(pencil, lambda, accepted, j);
        // Re-orthogonalize explicitly so pairwise M-inner products stay tight.
        for (const auto& w : accepted) {
            double c = detail::m_inner(pencil, pair.vec, w);
            for (size_t i = 0; i < pair.vec.size(); ++i) pair.vec[i] -= c * w[i];
        }
        detail::m_normalize(pencil, pair.vec);
        accepted.push_back(pair.vec);
        basis.vectors.push_back(std::move(pair.vec));
        basis.lambdas.push_back(pair.lambda);
    }
    return basis;
}

} // namespace conjscan

#endif
