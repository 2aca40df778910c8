#ifndef CONJSCAN_TESTS_OSCILLATION_ORACLE_HPP
#define CONJSCAN_TESTS_OSCILLATION_ORACLE_HPP

// Sturm oscillation oracle: number of zeros in (0,1) of the solution of
// -(a u')' + f u = 0, u(0) = 0, u'(0) = 1, by a fixed-step RK4 sweep.
// Independent of the library's Galerkin and adaptive-shooting code paths.

#include <array>
#include <cmath>
#include <functional>

namespace oracle {

/// Counts strict sign changes of u on (0,1). 20000 steps resolve the
/// oscillation scales used in the tests (|f| up to ~1e2).
inline int oscillation_zero_count(const std::function<double(double)>& a,
                                  const std::function<double(double)>& f,
                                  int steps = 20000) {
    auto rhs = [&](double x, const std::array<double, 2>& y) -> std::array<double, 2> {
        return {y[1] / a(x), f(x) * y[0]};
    };
    const double h = 1.0 / steps;
    std::array<double, 2> y{0.0, a(0.0)}; // u(0) = 0, u'(0) = 1, state (u, a u')
    int zeros = 0;
    double prev_sign = 1.0; // u > 0 immediately right of 0
    for (int i = 0; i < steps; ++i) {
        const double x = i * h;
        auto k1 = rhs(x, y);
        std::array<double, 2> t{y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]};
        auto k2 = rhs(x + 0.5 * h, t);
        t = {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]};
        auto k3 = rhs(x + 0.5 * h, t);
        t = {y[0] + h * k3[0], y[1] + h * k3[1]};
        auto k4 = rhs(x + h, t);
        y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        // an exact zero keeps the previous sign, so a zero sitting on a
        // sample point (including x = 1, which is outside the open
        // interval) is not double counted
        double sign = y[0] > 0.0 ? 1.0 : (y[0] < 0.0 ? -1.0 : prev_sign);
        if (sign != prev_sign) ++zeros;
        prev_sign = sign;
    }
    return zeros;
}

} // namespace oracle

#endif
