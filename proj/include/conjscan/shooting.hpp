#ifndef CONJSCAN_SHOOTING_HPP
#define CONJSCAN_SHOOTING_HPP

#include "conjscan/errors.hpp"
#include "conjscan/problem.hpp"
#include "conjscan/scan.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace conjscan {

/// One shot of the initial value problem -(a u')' + g(x, u) = 0 with
/// u(0) = 0, u'(0) = s, integrated to x = r. The amplitude is the computable
/// H^1_0(0, r) seminorm of the solution.
struct ShootingState {
    double r = 0.0;
    double s = 0.0;
    double terminal_value = 0.0;
    double terminal_derivative = 0.0;
    double amplitude = 0.0;
};

struct BranchSample {
    double s = 0.0;
    int k = 0; // 1-based zero index
    double r = 0.0;
    double amplitude = 0.0;
};

struct BifurcationVerification {
    std::vector<BranchSample> samples;
    std::vector<double> limit_radii;      // r(s_min, k)
    std::vector<double> match_tolerances; // extrapolation tolerance per branch
    bool instants_all_matched = true;     // every conjugate instant is a branch limit
    bool converse_ok = true;              // every branch limit is a conjugate instant
    bool count_ok = true;                 // #distinct limits == Morse index
    bool amplitudes_decreasing = true;
    std::vector<std::string> notes;
};

namespace detail {

// Dormand-Prince 5(4) pair with purely relative error control, so linear
// problems shoot scale-invariantly in s.
struct ShootOde {
    const CoefficientField& a;
    const Nonlinearity& g;

    std::array<double, 3> rhs(double x, const std::array<double, 3>& y) const {
        double up = y[1] / a(x);
        return {up, g.g.eval(x, y[0]), up * up};
    }
};

struct StepResult {
    std::array<double, 3> y;
    double error = 0.0; // scaled error estimate
};

inline StepResult dopri_step(const ShootOde& ode, double x, const std::array<double, 3>& y,
                             double h) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    auto stage = [&](double frac, const std::array<double, 3>& yy) { return ode.rhs(x + frac * h, yy); };
    auto k1 = ode.rhs(x, y);
    std::array<double, 3> t;
    for (int i = 0; i < 3; ++i) t[i] = y[i] + h * a21 * k1[i];
    auto k2 = stage(c2, t);
    for (int i = 0; i < 3; ++i) t[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    auto k3 = stage(c3, t);
    for (int i = 0; i < 3; ++i) t[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    auto k4 = stage(c4, t);
    for (int i = 0; i < 3; ++i)
        t[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    auto k5 = stage(c5, t);
    for (int i = 0; i < 3; ++i)
        t[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    auto k6 = stage(1.0, t);
    StepResult out;
    for (int i = 0; i < 3; ++i)
        out.y[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    auto k7 = ode.rhs(x + h, out.y);
    double err = 0.0;
    for (int i = 0; i < 3; ++i) {
        double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                        e7 * k7[i]);
        double scale = 1e-10 * std::max({std::fabs(y[i]), std::fabs(out.y[i]), 1e-280});
        err = std::max(err, std::fabs(e) / scale);
    }
    out.error = err;
    return out;
}

// Integrates from (x0, y0) to x1, calling on_step(xa, ya, xb, yb) after each
// accepted step. Throws SHOOT_BLOWUP when the state explodes.
template <typename OnStep>
std::array<double, 3> integrate(const ShootOde& ode, double x0, std::array<double, 3> y,
                                double x1, double blowup_scale, OnStep&& on_step) {
    double x = x0;
    double h = (x1 - x0) * 1e-3;
    const double h_min = (x1 - x0) * 1e-14;
    int guard = 0;
    while (x < x1) {
        if (++guard > 2000000)
            throw Error(ErrorCode::shoot_blowup, "integration step count exceeded");
        if (x + h > x1) h = x1 - x;
        auto step = dopri_step(ode, x, y, h);
        if (step.error <= 1.0) {
            on_step(x, y, x + h, step.y);
            x += h;
            y = step.y;
            if (std::fabs(y[0]) > blowup_scale || std::fabs(y[1]) > blowup_scale ||
                !std::isfinite(y[0]) || !std::isfinite(y[1]))
                throw Error(ErrorCode::shoot_blowup,
                            "solution blew up near x = " + std::to_string(x));
        }
        double grow = step.error > 0.0 ? 0.9 * std::pow(step.error, -0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
        if (h < h_min)
            throw Error(ErrorCode::shoot_blowup, "step size underflow near x = " + std::to_string(x));
    }
    return y;
}

inline const Interval1DProblem& require_nonlinear(const Problem& problem) {
    if (!std::holds_alternative<Interval1DProblem>(problem))
        throw Error(ErrorCode::parameter_out_of_range, "shooting requires a 1D problem");
    const auto& p = std::get<Interval1DProblem>(problem);
    if (!p.g)
        throw Error(ErrorCode::parameter_out_of_range, "shooting requires a nonlinearity g");
    return p;
}

} // namespace detail

/// Integrates the shooting initial value problem over [0, r].
inline ShootingState shoot(const Problem& problem, double r, double s) {
    const auto& p = detail::require_nonlinear(problem);
    if (!(r > 0.0) || r > 1.0)
        throw Error(ErrorCode::parameter_out_of_range, "shooting radius must lie in (0, 1]");
    ShootingState state;
    state.r = r;
    state.s = s;
    if (s == 0.0) return state; // the trivial branch is preserved exactly
    detail::ShootOde ode{p.a, *p.g};
    std::array<double, 3> y{0.0, p.a(0.0) * s, 0.0};
    double blowup = 1e8 * std::max(1.0, std::fabs(s));
    y = detail::integrate(ode, 0.0, y, r, blowup, [](double, const auto&, double, const auto&) {});
    state.terminal_value = y[0];
    state.terminal_derivative = y[1] / p.a(r);
    state.amplitude = std::sqrt(std::max(y[2], 0.0));
    return state;
}

/// All zeros of the shooting trajectory in (0, 1], refined by bisection with
/// re-integration, each with the H^1_0(0, r) amplitude at the zero.
inline std::vector<BranchSample> branch_zeros(const Problem& problem, double s) {
    const auto& p = detail::require_nonlinear(problem);
    std::vector<BranchSample> zeros;
    if (s == 0.0) return zeros;
    detail::ShootOde ode{p.a, *p.g};
    const double blowup = 1e8 * std::max(1.0, std::fabs(s));
    struct Bracket {
        double xa, xb;
        std::array<double, 3> ya;
    };
    std::vector<Bracket> brackets;
    std::array<double, 3> y0{0.0, p.a(0.0) * s, 0.0};
    detail::integrate(ode, 0.0, y0, 1.0, blowup,
                      [&](double xa, const std::array<double, 3>& ya, double xb,
                          const std::array<double, 3>& yb) {
                          if (xa > 0.0 && ya[0] == 0.0)
                              return; // refined boundary handled below
                          if ((ya[0] > 0.0 && yb[0] <= 0.0) || (ya[0] < 0.0 && yb[0] >= 0.0))
                              brackets.push_back({xa, xb, ya});
                          else if (xa == 0.0 && yb[0] == 0.0)
                              brackets.push_back({xa, xb, ya});
                      });
    int k = 0;
    for (const auto& b : brackets) {
        double lo = b.xa, hi = b.xb;
        auto y_lo = b.ya;
        double sign_lo = lo == 0.0 ? (s > 0 ? 1.0 : -1.0) : (y_lo[0] > 0 ? 1.0 : -1.0);
        std::array<double, 3> y_mid{};
        for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
            double mid = 0.5 * (lo + hi);
            auto tmp = y_lo;
            y_mid = detail::integrate(ode, lo, tmp, mid, blowup,
                                      [](double, const auto&, double, const auto&) {});
            if ((y_mid[0] > 0 ? 1.0 : -1.0) == sign_lo) {
                lo = mid;
                y_lo = y_mid;
            } else {
                hi = mid;
            }
        }
        BranchSample sample;
        sample.s = s;
        sample.k = ++k;
        sample.r = 0.5 * (lo + hi);
        sample.amplitude = std::sqrt(std::max(y_lo[2], 0.0));
        zeros.push_back(sample);
    }
    return zeros;
}

/// First zero of the terminal value in (0, 1], or nothing when the shot never
/// returns to the trivial branch.
inline std::optional<double> branch_radius(const Problem& problem, double s) {
    auto zeros = branch_zeros(problem, s);
    if (zeros.empty()) return std::nullopt;
    return zeros.front().r;
}

/// Confirms the bifurcation theorem in the ODE case: branch radii converge to
/// the conjugate instants as s -> 0, amplitudes shrink along the schedule, no
/// extra accumulation radii appear, and the number of distinct limits equals
/// the Morse index.
inline BifurcationVerification verify_bifurcation_theorem(const Problem& problem,
                                                          const ScanReport& scan,
                                                          std::vector<double> s_schedule = {
                                                              1e-2, 1e-3, 1e-4}) {
    detail::require_nonlinear(problem);
    if (s_schedule.empty())
        throw Error(ErrorCode::parameter_out_of_range, "empty s schedule");
    for (double s : s_schedule)
        if (s == 0.0)
            throw Error(ErrorCode::parameter_out_of_range, "s schedule must avoid 0");
    std::sort(s_schedule.begin(), s_schedule.end(),
              [](double a, double b) { return std::fabs(a) > std::fabs(b); });

    BifurcationVerification v;
    std::vector<std::vector<BranchSample>> per_s(s_schedule.size());
    for (size_t i = 0; i < s_schedule.size(); ++i) {
        per_s[i] = branch_zeros(problem, s_schedule[i]);
        for (const auto& z : per_s[i]) v.samples.push_back(z);
    }
    const double s_min = s_schedule.back();
    auto halved = branch_zeros(problem, 0.5 * s_min);

    const auto& finest = per_s.back();
    // Discrete conjugate instants carry O(h^2) error, so the extrapolation
    // tolerance keeps a floor above the grid resolution.
    constexpr double kGridFloor = 1e-5;
    for (size_t k = 0; k < finest.size(); ++k) {
        v.limit_radii.push_back(finest[k].r);
        double extrap = k < halved.size()
                            ? 10.0 * std::fabs(finest[k].r - halved[k].r)
                            : kGridFloor;
        v.match_tolerances.push_back(std::max(extrap, kGridFloor));
    }

    // each conjugate instant must be a branch limit
    for (const auto& c : scan.crossings) {
        bool matched = false;
        for (size_t k = 0; k < v.limit_radii.size(); ++k)
            if (std::fabs(v.limit_radii[k] - c.r0) <= v.match_tolerances[k]) matched = true;
        if (!matched) {
            v.instants_all_matched = false;
            v.notes.push_back("conjugate instant r0 = " + std::to_string(c.r0) +
                              " not reached by any branch limit");
        }
    }
    // converse: each branch limit must be a conjugate instant
    for (size_t k = 0; k < v.limit_radii.size(); ++k) {
        bool matched = false;
        for (const auto& c : scan.crossings)
            if (std::fabs(v.limit_radii[k] - c.r0) <= v.match_tolerances[k]) matched = true;
        if (!matched) {
            v.converse_ok = false;
            v.notes.push_back("branch limit r = " + std::to_string(v.limit_radii[k]) +
                              " matches no conjugate instant");
        }
    }
    v.count_ok = static_cast<int>(v.limit_radii.size()) == scan.morse_index_at_1;
    if (!v.count_ok)
        v.notes.push_back("distinct branch limits: " + std::to_string(v.limit_radii.size()) +
                          ", Morse index: " + std::to_string(scan.morse_index_at_1));

    // amplitudes must decrease along the schedule, branch by branch
    for (size_t k = 0; k < finest.size(); ++k) {
        for (size_t i = 0; i + 1 < per_s.size(); ++i) {
            if (k >= per_s[i].size() || k >= per_s[i + 1].size()) continue;
            if (!(per_s[i + 1][k].amplitude < per_s[i][k].amplitude)) {
                v.amplitudes_decreasing = false;
                v.notes.push_back("amplitude did not decrease for branch " +
                                  std::to_string(k + 1));
            }
        }
    }
    return v;
}

} // namespace conjscan

#endif
