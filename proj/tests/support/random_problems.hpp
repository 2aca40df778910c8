#ifndef CONJSCAN_TESTS_RANDOM_PROBLEMS_HPP
#define CONJSCAN_TESTS_RANDOM_PROBLEMS_HPP

// Seeded random trigonometric-polynomial interval problems for the
// randomized property suite. a stays uniformly positive by construction;
// f is scaled to produce a handful of crossings.

#include "conjscan/expression.hpp"
#include "conjscan/problem.hpp"

#include <cstdint>
#include <random>

namespace testsupport {

inline conjscan::Expr trig_polynomial(std::mt19937& rng, double base, double amp1, double amp2) {
    using conjscan::Expr;
    auto coef = [&rng]() {
        return (static_cast<double>(rng()) / 4294967296.0) * 2.0 - 1.0;
    };
    const double pi = 3.14159265358979323846264338327950288;
    Expr x = Expr::x();
    Expr e = Expr::constant(base);
    e = Expr::add(e, Expr::mul(Expr::constant(amp1 * coef()),
                               Expr::cos(Expr::mul(Expr::constant(pi), x))));
    e = Expr::add(e, Expr::mul(Expr::constant(amp1 * coef()),
                               Expr::sin(Expr::mul(Expr::constant(pi), x))));
    e = Expr::add(e, Expr::mul(Expr::constant(amp2 * coef()),
                               Expr::cos(Expr::mul(Expr::constant(2.0 * pi), x))));
    e = Expr::add(e, Expr::mul(Expr::constant(amp2 * coef()),
                               Expr::sin(Expr::mul(Expr::constant(2.0 * pi), x))));
    return e;
}

inline conjscan::Interval1DProblem random_interval_problem(std::uint32_t seed) {
    using conjscan::CoefficientField;
    using conjscan::Expr;
    std::mt19937 rng(seed);
    Expr a = trig_polynomial(rng, 1.0, 0.3, 0.15); // min a >= 1 - 0.9 = 0.1
    double strength =
        20.0 + 70.0 * (static_cast<double>(rng()) / 4294967296.0); // in [20, 90]
    Expr f_shape = trig_polynomial(rng, -0.6, 0.25, 0.15); // biased negative
    Expr f = Expr::mul(Expr::constant(strength), f_shape);
    return {CoefficientField::closed_form(a), CoefficientField::closed_form(f), std::nullopt};
}

} // namespace testsupport

#endif
