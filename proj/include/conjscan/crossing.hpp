#ifndef CONJSCAN_CROSSING_HPP
#define CONJSCAN_CROSSING_HPP

#include "conjscan/assembly.hpp"
#include "conjscan/dense_eig.hpp"
#include "conjscan/errors.hpp"
#include "conjscan/morse.hpp"
#include "conjscan/spectral.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace conjscan {

inline constexpr double kRegularityTau = 1e-6;
inline constexpr double kFormAgreementTol = 1e-2;

struct ModeContribution {
    int nu = -1;        // -1 marks the interval case
    int radial_dim = 0; // kernel dimension of the radial factor
};

/// Certified conjugate instant: both crossing-form evaluations on the
/// numerical kernel, signature, regularity, and consistency flags.
struct CrossingReport {
    double r0 = 0.0;
    int multiplicity = 0;
    SymMatrix gamma_derivative;
    SymMatrix gamma_boundary;
    int signature = 0;
    bool regular = false;
    double condition = 0.0; // min|eig| / max|eig| of gamma_derivative
    double forms_rel_disagreement = 0.0;
    bool kernel_suspect = false;
    bool form_disagreement = false; // beyond kFormAgreementTol
    bool theorem_violated = false;  // non-negative form eigenvalue or signature != -m
    double isolation_delta = 0.0;   // filled by the scan
    std::vector<ModeContribution> contributions;

    double gamma_min_eig = 0.0;
    double gamma_max_eig = 0.0;
};

/// Gamma entries c_i^T Kdot c_j on the kernel (the parameter-derivative
/// evaluation of the crossing form).
inline SymMatrix crossing_form_derivative(const SymmetricBandedMatrix& stiffness_derivative,
                                          const KernelBasis& kernel) {
    const int m = kernel.dimension();
    if (m == 0)
        throw Error(ErrorCode::no_crossing, "crossing form requested on an empty kernel");
    SymMatrix gamma(m);
    std::vector<std::vector<double>> kdv(m);
    for (int j = 0; j < m; ++j) kdv[j] = stiffness_derivative.multiply(kernel.vectors[j]);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            double s = 0.0;
            for (size_t t = 0; t < kernel.vectors[i].size(); ++t)
                s += kernel.vectors[i][t] * kdv[j][t];
            gamma.set_sym(i, j, s);
        }
    return gamma;
}

/// Boundary-trace evaluation: -(1/r0) du_i(1) du_j(1) a(r0) w(1), the
/// endpoint specialization of the surface-integral form. Normal derivatives
/// use a one-sided 3-point stencil on nodal values, independent of the
/// assembly code path. Sets kernel_suspect when a kernel vector has a
/// vanishing normal derivative, which the continuum problem forbids.
inline SymMatrix crossing_form_boundary(const Problem& problem, double r0,
                                        const KernelBasis& kernel, const OperatorPencil& pencil,
                                        bool* kernel_suspect = nullptr) {
    const int m = kernel.dimension();
    if (m == 0)
        throw Error(ErrorCode::no_crossing, "crossing form requested on an empty kernel");
    const double h = pencil.h;
    const double a_r0 = diffusion_of(problem)(r0);
    std::vector<double> normal_deriv(m);
    bool suspect = false;
    for (int j = 0; j < m; ++j) {
        const auto& c = kernel.vectors[j];
        const int order = static_cast<int>(c.size());
        // nodes N-2 and N-3 hold the last two dofs; u(1) = 0 by the
        // Dirichlet condition
        double u1 = c[order - 1];
        double u2 = c[order - 2];
        normal_deriv[j] = (-4.0 * u1 + u2) / (2.0 * h);
        double sup = 0.0;
        for (double v : c) sup = std::max(sup, std::fabs(v));
        if (std::fabs(normal_deriv[j]) < 1e-8 * std::max(sup, 1e-300)) suspect = true;
    }
    if (kernel_suspect) *kernel_suspect = suspect;
    SymMatrix gamma(m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            gamma.set_sym(i, j, -(1.0 / r0) * normal_deriv[i] * normal_deriv[j] * a_r0);
    return gamma;
}

/// Signature (n_pos - n_neg over eigenvalues with magnitude above
/// tau * ||form||) and regularity (no eigenvalue at or below the threshold).
inline std::pair<int, bool> crossing_signature(const SymMatrix& form, double tau) {
    if (!(tau > 0.0) || tau > 1e-2)
        throw Error(ErrorCode::parameter_out_of_range,
                    "signature tolerance must lie in (0, 1e-2]");
    auto eig = sym_eigen(form, /*with_vectors=*/false);
    double norm = 0.0;
    for (double v : eig.values) norm = std::max(norm, std::fabs(v));
    double thr = tau * norm;
    int pos = 0, neg = 0;
    bool regular = true;
    for (double v : eig.values) {
        if (v > thr) ++pos;
        else if (v < -thr) ++neg;
        else regular = false;
    }
    return {pos - neg, regular};
}

namespace detail {

inline SymMatrix block_repeat(const SymMatrix& block, int copies) {
    const int b = block.size();
    SymMatrix out(b * copies);
    for (int c = 0; c < copies; ++c)
        for (int i = 0; i < b; ++i)
            for (int j = 0; j < b; ++j) out(c * b + i, c * b + j) = block(i, j);
    return out;
}

inline SymMatrix block_concat(const std::vector<SymMatrix>& blocks) {
    int total = 0;
    for (const auto& b : blocks) total += b.size();
    SymMatrix out(total);
    int off = 0;
    for (const auto& b : blocks) {
        for (int i = 0; i < b.size(); ++i)
            for (int j = 0; j < b.size(); ++j) out(off + i, off + j) = b(i, j);
        off += b.size();
    }
    return out;
}

inline void finalize_report(CrossingReport& report, double regularity_tau) {
    auto eig_d = sym_eigen(report.gamma_derivative, /*with_vectors=*/false);
    report.gamma_min_eig = eig_d.values.front();
    report.gamma_max_eig = eig_d.values.back();
    double max_abs = 0.0, min_abs = std::numeric_limits<double>::infinity();
    for (double v : eig_d.values) {
        max_abs = std::max(max_abs, std::fabs(v));
        min_abs = std::min(min_abs, std::fabs(v));
    }
    report.condition = max_abs > 0.0 ? min_abs / max_abs : 0.0;
    auto [sig, regular] = crossing_signature(report.gamma_derivative, regularity_tau);
    report.signature = sig;
    report.regular = regular;

    double diff = 0.0, ref = 0.0;
    const int m = report.gamma_derivative.size();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double d = report.gamma_derivative(i, j) - report.gamma_boundary(i, j);
            diff += d * d;
            ref += report.gamma_derivative(i, j) * report.gamma_derivative(i, j);
        }
    report.forms_rel_disagreement = ref > 0.0 ? std::sqrt(diff / ref) : std::sqrt(diff);
    report.form_disagreement = report.forms_rel_disagreement > kFormAgreementTol;

    auto eig_b = sym_eigen(report.gamma_boundary, /*with_vectors=*/false);
    bool negative_definite = eig_d.values.back() < 0.0 && eig_b.values.back() < 0.0;
    bool signature_matches = report.signature == -report.multiplicity;
    report.theorem_violated = !negative_definite || (report.regular && !signature_matches);
}

} // namespace detail

/// Kernel, both crossing-form evaluations, signature, and the negative-
/// definiteness certificate at a detected conjugate instant, for one mode
/// (or the interval problem). Angular multiplicity expands the radial form
/// block-diagonally.
inline CrossingReport certify_conjugate_instant(const Problem& problem,
                                                std::optional<AngularMode> mode, double r0,
                                                const Grid& grid, double kernel_tau = 1e-8,
                                                double regularity_tau = kRegularityTau) {
    auto pencil = assemble_operator(problem, mode, r0, grid);
    // r0 is only known to the caller's bracket width, so the crossing branch
    // may sit outside the nominal window; widen until it is captured.
    auto kernel = kernel_basis(pencil, kernel_tau);
    for (double tau = kernel_tau * 4.0; kernel.empty() && tau <= 1e-3; tau *= 4.0)
        kernel = kernel_basis(pencil, tau);
    if (kernel.empty())
        throw Error(ErrorCode::no_crossing,
                    "no kernel within tolerance at r0 = " + std::to_string(r0));
    auto kdot = assemble_parameter_derivative(problem, mode, r0, grid);

    CrossingReport report;
    report.r0 = r0;
    bool suspect = false;
    SymMatrix gd = crossing_form_derivative(kdot, kernel);
    SymMatrix gb = crossing_form_boundary(problem, r0, kernel, pencil, &suspect);
    int weight = mode ? mode->multiplicity_weight() : 1;
    report.gamma_derivative = detail::block_repeat(gd, weight);
    report.gamma_boundary = detail::block_repeat(gb, weight);
    report.multiplicity = weight * kernel.dimension();
    report.kernel_suspect = suspect;
    report.contributions.push_back({mode ? mode->nu : -1, kernel.dimension()});
    detail::finalize_report(report, regularity_tau);
    return report;
}

/// Combines per-mode certificates of crossings that coincide in r into one
/// report with block-diagonal forms and summed multiplicity.
inline CrossingReport merge_crossing_reports(std::vector<CrossingReport> parts,
                                             double regularity_tau = kRegularityTau) {
    if (parts.size() == 1) return std::move(parts.front());
    CrossingReport merged;
    double r_acc = 0.0;
    std::vector<SymMatrix> gds, gbs;
    for (auto& p : parts) {
        r_acc += p.r0;
        merged.multiplicity += p.multiplicity;
        merged.kernel_suspect = merged.kernel_suspect || p.kernel_suspect;
        for (auto& c : p.contributions) merged.contributions.push_back(c);
        gds.push_back(std::move(p.gamma_derivative));
        gbs.push_back(std::move(p.gamma_boundary));
    }
    merged.r0 = r_acc / static_cast<double>(parts.size());
    merged.gamma_derivative = detail::block_concat(gds);
    merged.gamma_boundary = detail::block_concat(gbs);
    detail::finalize_report(merged, regularity_tau);
    return merged;
}

} // namespace conjscan

#endif
