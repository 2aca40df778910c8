#include "conjscan/dense_eig.hpp"
#include "conjscan/morse.hpp"
#include "conjscan/spectral.hpp"

#include "support/bessel_oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace conjscan;

namespace {

constexpr double kC = 61.68502750680849; // (2.5 pi)^2
constexpr double kPi = 3.14159265358979323846264338327950288;

Interval1DProblem shifted_problem(double c) {
    return {CoefficientField::constant(1.0), CoefficientField::constant(-c), std::nullopt};
}

OperatorPencil identity_pencil(int nodes) {
    Grid grid(nodes);
    auto pencil = assemble_operator(shifted_problem(0.0), std::nullopt, 1.0, grid);
    pencil.stiffness = pencil.mass;
    return pencil;
}

} // namespace

TEST_SUITE("spectral") {

TEST_CASE("identity pencil is positive definite") {
    auto pencil = identity_pencil(40);
    auto inertia = pencil_inertia(pencil, 0.0);
    CHECK(inertia.n_neg == 0);
    CHECK(inertia.n_zero == 0);
    CHECK(inertia.n_pos == pencil.stiffness.order());
}

TEST_CASE("breakdown shifts are retried with a tiny perturbation") {
    // K - 1*M is the zero matrix; every pivot vanishes until the retry.
    auto pencil = identity_pencil(40);
    auto inertia = pencil_inertia(pencil, 1.0);
    CHECK(inertia.n_neg + inertia.n_pos == pencil.stiffness.order());
}

TEST_CASE("two eigenvalues sit below zero for the shifted problem") {
    Grid grid(2001);
    auto pencil = assemble_operator(shifted_problem(kC), std::nullopt, 1.0, grid);
    CHECK(pencil_inertia(pencil, 0.0).n_neg == 2);
}

TEST_CASE("a shift below the whole spectrum counts nothing") {
    Grid grid(64);
    auto pencil = assemble_operator(shifted_problem(kC), std::nullopt, 1.0, grid);
    // Certified lower bound: ||K||_inf / lambda_min(M) dominates every
    // generalized eigenvalue magnitude.
    SymMatrix m_dense(pencil.mass.order());
    for (int i = 0; i < m_dense.size(); ++i)
        for (int j = 0; j < m_dense.size(); ++j) m_dense(i, j) = pencil.mass.at(i, j);
    double lambda_min_m = sym_eigen(m_dense, false).values.front();
    REQUIRE(lambda_min_m > 0.0);
    double sigma = -(pencil.stiffness.inf_norm() / lambda_min_m + 1.0);
    CHECK(pencil_inertia(pencil, sigma).n_neg == 0);
}

TEST_CASE("morse index of the positive problem vanishes") {
    Grid grid(128);
    CHECK(morse_index(shifted_problem(0.0), 1.0, grid) == 0);
    CHECK(morse_index(shifted_problem(0.0), 0.3, grid) == 0);
}

TEST_CASE("morse index of the interval demo is 2") {
    Grid grid(2001);
    CHECK(morse_index(shifted_problem(kC), 1.0, grid) == 2);
}

TEST_CASE("radial morse index weights the angular modes") {
    Grid grid(2001);
    RadialProblem p{2, CoefficientField::constant(1.0), CoefficientField::constant(-30.0),
                    {AngularMode{0}, AngularMode{1}, AngularMode{2}}};
    auto counts = mode_negative_counts(p, 1.0, grid);
    // Oracle: the count for mode nu is #{k : j_{nu,k} < sqrt(30)}.
    const double bound = std::sqrt(30.0);
    for (size_t nu = 0; nu < counts.size(); ++nu) {
        auto zeros = oracle::bessel_zeros(static_cast<double>(nu), 4);
        int expected = 0;
        for (double z : zeros)
            if (z < bound) ++expected;
        CHECK(counts[nu] == expected);
    }
    CHECK(morse_index(p, 1.0, grid) == 5); // 1 + 2*1 + 2*1
}

TEST_CASE("runaway mode extension stops at the overflow guard") {
    Grid grid(16);
    RadialProblem p{2, CoefficientField::constant(1.0), CoefficientField::constant(-3e6),
                    {AngularMode{0}}};
    try {
        morse_index(p, 1.0, grid);
        FAIL("expected MODE_OVERFLOW");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::mode_overflow);
    }
}

TEST_CASE("kernel of a definite pencil is empty") {
    Grid grid(128);
    auto pencil = assemble_operator(shifted_problem(0.0), std::nullopt, 1.0, grid);
    CHECK(kernel_basis(pencil, 1e-8).empty());
}

TEST_CASE("kernel at the first interval crossing is the first sine mode") {
    Grid grid(2001);
    auto pencil = assemble_operator(shifted_problem(kC), std::nullopt, 0.4, grid);
    auto kernel = kernel_basis(pencil, 1e-6);
    REQUIRE(kernel.dimension() == 1);
    // In rescaled coordinates the kernel element is sin(2.5 pi * 0.4 * x).
    const auto& v = kernel.vectors.front();
    std::vector<double> expected(v.size());
    double nv = 0.0, ne = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        double x = grid.node(static_cast<int>(i) + pencil.first_node);
        expected[i] = std::sin(kPi * x);
        nv += v[i] * v[i];
        ne += expected[i] * expected[i];
    }
    double sign = v[v.size() / 2] > 0.0 ? 1.0 : -1.0;
    double worst = 0.0;
    for (size_t i = 0; i < v.size(); ++i)
        worst = std::max(worst,
                         std::fabs(sign * v[i] / std::sqrt(nv) - expected[i] / std::sqrt(ne)));
    CHECK(worst <= 1e-4);
}

TEST_CASE("radial kernel at the scaled Bessel zero has one radial factor") {
    Grid grid(2001);
    RadialProblem p{2, CoefficientField::constant(1.0), CoefficientField::constant(-30.0),
                    {AngularMode{0}, AngularMode{1}}};
    double r0 = oracle::bessel_zeros(1.0, 1).front() / std::sqrt(30.0);
    auto pencil = assemble_operator(p, AngularMode{1}, r0, grid);
    auto kernel = kernel_basis(pencil, 1e-6);
    CHECK(kernel.dimension() == 1);
    CHECK(AngularMode{1}.multiplicity_weight() * kernel.dimension() == 2);
}

TEST_CASE("kernel tolerance is range checked") {
    auto pencil = identity_pencil(40);
    CHECK_THROWS_AS(kernel_basis(pencil, 0.0), Error);
    CHECK_THROWS_AS(kernel_basis(pencil, 2e-3), Error);
}

TEST_CASE("identity pencil eigenvalues are all one") {
    auto pencil = identity_pencil(48);
    auto pairs = smallest_eigenpairs(pencil, 4);
    for (const auto& p : pairs) CHECK(p.lambda == doctest::Approx(1.0).epsilon(1e-10));
    // repeated eigenvalue: vectors still come out M-orthonormal
    for (size_t i = 0; i < pairs.size(); ++i)
        for (size_t j = 0; j <= i; ++j) {
            auto mv = pencil.mass.multiply(pairs[j].vec);
            double dot = 0.0;
            for (size_t t = 0; t < mv.size(); ++t) dot += pairs[i].vec[t] * mv[t];
            CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
        }
}

TEST_CASE("Dirichlet eigenvalues (k pi)^2 to a tenth of a percent") {
    Grid grid(2001);
    auto pencil = assemble_operator(shifted_problem(0.0), std::nullopt, 1.0, grid);
    auto pairs = smallest_eigenpairs(pencil, 3);
    for (int k = 1; k <= 3; ++k)
        CHECK(pairs[k - 1].lambda == doctest::Approx(k * k * kPi * kPi).epsilon(1e-3));
}

TEST_CASE("constant shift moves every eigenvalue by the same amount") {
    Grid grid(501);
    auto base = smallest_eigenpairs(
        assemble_operator(shifted_problem(0.0), std::nullopt, 1.0, grid), 4);
    auto moved = smallest_eigenpairs(
        assemble_operator(shifted_problem(kC), std::nullopt, 1.0, grid), 4);
    for (int k = 0; k < 4; ++k)
        CHECK(moved[k].lambda == doctest::Approx(base[k].lambda - kC).epsilon(1e-9));
}

TEST_CASE("eigenpair residuals and M-orthonormality meet their bounds") {
    Grid grid(801);
    auto pencil = assemble_operator(shifted_problem(kC), std::nullopt, 0.9, grid);
    auto pairs = smallest_eigenpairs(pencil, 5);
    double knorm = pencil.stiffness.inf_norm();
    for (const auto& p : pairs) {
        auto kx = pencil.stiffness.multiply(p.vec);
        auto mx = pencil.mass.multiply(p.vec);
        double resid = 0.0, mnorm = 0.0;
        for (size_t i = 0; i < kx.size(); ++i) {
            double r = kx[i] - p.lambda * mx[i];
            resid += r * r;
            mnorm += p.vec[i] * mx[i];
        }
        CHECK(std::sqrt(resid) <= 1e-6 * knorm);
        CHECK(mnorm == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("negative eigenpairs agree with the inertia count") {
    Grid grid(801);
    auto pencil = assemble_operator(shifted_problem(kC), std::nullopt, 1.0, grid);
    int n_neg = pencil_inertia(pencil, 0.0).n_neg;
    auto pairs = smallest_eigenpairs(pencil, n_neg + 2);
    int below = 0;
    for (const auto& p : pairs)
        if (p.lambda < 0.0) ++below;
    CHECK(below == n_neg);
}

TEST_CASE("counts are nondecreasing in the shift and jump by the multiplicity") {
    Grid grid(501);
    auto pencil = assemble_operator(shifted_problem(kC), std::nullopt, 1.0, grid);
    auto pairs = smallest_eigenpairs(pencil, 3);
    int prev = -1;
    for (double sigma = -80.0; sigma <= 120.0; sigma += 4.0) {
        int n = pencil_inertia(pencil, sigma).n_neg;
        if (prev >= 0) CHECK(n >= prev);
        prev = n;
    }
    // Sylvester jump at the second eigenvalue equals the kernel dimension of
    // the sigma-shifted pencil.
    double sigma = pairs[1].lambda;
    OperatorPencil shifted = pencil;
    shifted.stiffness = SymmetricBandedMatrix::shifted(pencil.stiffness, pencil.mass, sigma);
    auto kernel = kernel_basis(shifted, 1e-8);
    int jump = pencil_inertia(pencil, sigma + 1e-6).n_neg -
               pencil_inertia(pencil, sigma - 1e-6).n_neg;
    CHECK(jump == kernel.dimension());
    CHECK(jump == 1);
}

TEST_CASE("morse index steps monotonically in r for the shipped demos") {
    Grid grid(601);
    std::vector<Problem> demos;
    demos.push_back(shifted_problem(kC));
    demos.push_back(RadialProblem{2, CoefficientField::constant(1.0),
                                  CoefficientField::constant(-30.0),
                                  {AngularMode{0}, AngularMode{1}, AngularMode{2}}});
    demos.push_back(RadialProblem{3, CoefficientField::constant(8.0),
                                  CoefficientField::constant(-100.0), {AngularMode{0}}});
    for (const auto& demo : demos) {
        int prev = 0;
        for (int i = 0; i < 200; ++i) {
            double r = 1e-3 + (1.0 - 1e-3) * i / 199.0;
            int mu = morse_index(demo, r, grid);
            CHECK(mu >= prev);
            prev = mu;
        }
        CHECK(prev == morse_index(demo, 1.0, grid));
    }
}

} // TEST_SUITE
