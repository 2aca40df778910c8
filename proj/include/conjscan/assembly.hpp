#ifndef CONJSCAN_ASSEMBLY_HPP
#define CONJSCAN_ASSEMBLY_HPP

#include "conjscan/banded.hpp"
#include "conjscan/errors.hpp"
#include "conjscan/grid.hpp"
#include "conjscan/problem.hpp"

#include <cmath>
#include <optional>

namespace conjscan {

/// Generalized eigenproblem K c = lambda M c produced by the piecewise-linear
/// Galerkin discretization at a fixed parameter r. K carries the rescaled
/// bilinear form (stiffness plus potential), M is the Gram matrix of the
/// basis in the weighted L2 inner product. first_node/h record the dof-to-node
/// map so kernel coefficient vectors can be read back as nodal values.
struct OperatorPencil {
    SymmetricBandedMatrix stiffness;
    SymmetricBandedMatrix mass;
    int first_node = 1;
    double h = 0.0;
};

namespace detail {

// 3-point Gauss-Legendre rule on [0,1]; exact through degree 5.
inline constexpr double kGaussNode[3] = {0.5 - 0.387298334620741688517926539978,
                                         0.5,
                                         0.5 + 0.387298334620741688517926539978};
inline constexpr double kGaussWeight[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

struct ModeShape {
    double weight_exponent = 0.0; // w(x) = x^p; p = n-1 radially, 0 on the interval
    int nu = 0;
    bool include_origin = false; // radial nu = 0 keeps the x = 0 node
};

inline ModeShape mode_shape(const Problem& problem, std::optional<AngularMode> mode) {
    if (std::holds_alternative<Interval1DProblem>(problem)) return {};
    const auto& p = std::get<RadialProblem>(problem);
    if (!mode)
        throw Error(ErrorCode::parameter_out_of_range,
                    "radial assembly requires an angular mode");
    ModeShape s;
    s.weight_exponent = static_cast<double>(p.dimension - 1);
    s.nu = mode->nu;
    s.include_origin = mode->nu == 0;
    return s;
}

// Assembles banded matrices from per-quadrature-point gradient/value
// coefficients. cg(x) multiplies phi_i' phi_j', cm(x) multiplies phi_i phi_j.
template <typename CoefGrad, typename CoefMass>
SymmetricBandedMatrix assemble_banded(const Grid& grid, const ModeShape& shape,
                                      CoefGrad&& cg, CoefMass&& cm) {
    const int n = grid.node_count();
    const double h = grid.h();
    const int first = shape.include_origin ? 0 : 1;
    const int order = n - 1 - first; // last interior node is n-2
    SymmetricBandedMatrix a(order, 1);
    for (int e = 0; e < grid.element_count(); ++e) {
        const double x0 = grid.node(e);
        double k00 = 0.0, k01 = 0.0, k11 = 0.0;
        for (int q = 0; q < 3; ++q) {
            const double t = kGaussNode[q];
            const double x = x0 + t * h;
            const double wq = kGaussWeight[q] * h;
            const double g = cg(x);
            const double m = cm(x);
            const double pl = 1.0 - t, pr = t; // local basis values
            const double gq = g / (h * h);     // phi' = +-1/h
            k00 += wq * (gq + m * pl * pl);
            k01 += wq * (-gq + m * pl * pr);
            k11 += wq * (gq + m * pr * pr);
        }
        if (!std::isfinite(k00) || !std::isfinite(k01) || !std::isfinite(k11))
            throw Error(ErrorCode::coefficient_evaluation_failure,
                        "non-finite quadrature value in element " + std::to_string(e));
        const int dl = e - first;     // dof of left node, <0 when constrained away
        const int dr = e + 1 - first; // dof of right node
        if (dl >= 0 && dl < order) a.band(0, dl) += k00;
        if (dr >= 0 && dr < order) a.band(0, dr) += k11;
        if (dl >= 0 && dr < order) a.band(1, dl) += k01;
    }
    return a;
}

inline double pow_weight(double x, double p) { return p == 0.0 ? 1.0 : std::pow(x, p); }

} // namespace detail

/// K(r) and M for the rescaled form at parameter r in (0,1]. Interval
/// problems take no mode; radial problems need one.
inline OperatorPencil assemble_operator(const Problem& problem,
                                        std::optional<AngularMode> mode, double r,
                                        const Grid& grid) {
    if (!(r > 0.0) || r > 1.0)
        throw Error(ErrorCode::parameter_out_of_range,
                    "parameter r must lie in (0,1], got " + std::to_string(r));
    const auto shape = detail::mode_shape(problem, mode);
    const auto& a = diffusion_of(problem);
    const auto& f = potential_of(problem);
    const double nu2 = static_cast<double>(shape.nu) * shape.nu;
    const double p = shape.weight_exponent;

    OperatorPencil pencil;
    pencil.first_node = shape.include_origin ? 0 : 1;
    pencil.h = grid.h();
    pencil.stiffness = detail::assemble_banded(
        grid, shape, [&](double x) { return detail::pow_weight(x, p) * a(r * x); },
        [&](double x) {
            double w = detail::pow_weight(x, p);
            double mass = r * r * w * f(r * x);
            if (nu2 > 0.0) mass += nu2 * detail::pow_weight(x, p - 2.0) * a(r * x);
            return mass;
        });
    pencil.mass = detail::assemble_banded(
        grid, shape, [](double) { return 0.0; },
        [&](double x) { return detail::pow_weight(x, p); });

    auto mass_inertia = ldlt_inertia(pencil.mass);
    if (!mass_inertia || mass_inertia->n_neg != 0 || mass_inertia->n_zero != 0)
        throw Error(ErrorCode::coefficient_evaluation_failure,
                    "weighted Gram matrix is not positive definite");
    return pencil;
}

/// Exact r-derivative of assemble_operator's K(r), using coefficient
/// derivatives (symbolic for closed forms, spline for tables).
inline SymmetricBandedMatrix assemble_parameter_derivative(const Problem& problem,
                                                           std::optional<AngularMode> mode,
                                                           double r, const Grid& grid) {
    if (!(r > 0.0) || r > 1.0)
        throw Error(ErrorCode::parameter_out_of_range,
                    "parameter r must lie in (0,1], got " + std::to_string(r));
    const auto shape = detail::mode_shape(problem, mode);
    const auto& a = diffusion_of(problem);
    const auto& f = potential_of(problem);
    if (!a.differentiable() || !f.differentiable())
        throw Error(ErrorCode::derivative_unavailable,
                    "coefficient derivative required for the parameter derivative");
    const double nu2 = static_cast<double>(shape.nu) * shape.nu;
    const double p = shape.weight_exponent;
    return detail::assemble_banded(
        grid, shape,
        [&](double x) { return detail::pow_weight(x, p) * x * a.derivative(r * x); },
        [&](double x) {
            double w = detail::pow_weight(x, p);
            double mass = w * (2.0 * r * f(r * x) + r * r * x * f.derivative(r * x));
            if (nu2 > 0.0) mass += nu2 * detail::pow_weight(x, p - 2.0) * x * a.derivative(r * x);
            return mass;
        });
}

} // namespace conjscan

#endif
