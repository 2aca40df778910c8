#include "conjscan/report_io.hpp"
#include "conjscan/scan.hpp"

#include "support/bessel_oracle.hpp"
#include "support/oscillation_oracle.hpp"
#include "support/random_problems.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace conjscan;

namespace {

constexpr double kC = 61.68502750680849; // (2.5 pi)^2

Interval1DProblem shifted_problem(double c) {
    return {CoefficientField::constant(1.0), CoefficientField::constant(-c), std::nullopt};
}

RadialProblem disk_problem() {
    return {2, CoefficientField::constant(1.0), CoefficientField::constant(-30.0),
            {AngularMode{0}, AngularMode{1}, AngularMode{2}}};
}

std::string serialized(const ScanReport& report) {
    std::ostringstream os;
    write_scan_csv(report, os);
    os << summary_json(report).dump();
    return os.str();
}

} // namespace

TEST_SUITE("scan") {

TEST_CASE("interval demo: instants 0.4 and 0.8 with unit multiplicity") {
    Grid grid(2001);
    auto instants = scan_conjugate_instants(shifted_problem(kC), grid);
    REQUIRE(instants.size() == 2);
    CHECK(std::fabs(instants[0].first - 0.4) <= 1e-4);
    CHECK(std::fabs(instants[1].first - 0.8) <= 1e-4);
    CHECK(instants[0].second == 1);
    CHECK(instants[1].second == 1);
}

TEST_CASE("radial demo: scaled Bessel zeros with weighted multiplicities") {
    Grid grid(2001);
    auto report = scan_problem(disk_problem(), grid, {});
    REQUIRE(report.crossings.size() == 3);
    const double root30 = std::sqrt(30.0);
    double expected[3] = {oracle::bessel_zeros(0.0, 1).front() / root30,
                          oracle::bessel_zeros(1.0, 1).front() / root30,
                          oracle::bessel_zeros(2.0, 1).front() / root30};
    int mult[3] = {1, 2, 2};
    for (int i = 0; i < 3; ++i) {
        CHECK(std::fabs(report.crossings[i].r0 - expected[i]) <= 1e-3);
        CHECK(report.crossings[i].multiplicity == mult[i]);
    }
    CHECK(report.smale_lhs == 5);
    CHECK(report.smale_rhs == 5);
    CHECK(report.smale_holds);
    CHECK(report.stepwise_consistent);
}

TEST_CASE("nothing crosses for the positive problem") {
    Grid grid(501);
    auto report = scan_problem(shifted_problem(0.0), grid, {});
    CHECK(report.crossings.empty());
    CHECK(report.smale_lhs == 0);
    CHECK(report.smale_rhs == 0);
    CHECK(report.smale_holds);
    CHECK(report.bifurcation_lower_bound == 0);
}

TEST_CASE("smale identity and stepwise profile hold on the interval demo") {
    Grid grid(2001);
    auto report = verify_smale_identity(shifted_problem(kC), grid, {});
    CHECK(report.smale_lhs == 2);
    CHECK(report.smale_rhs == 2);
    CHECK(report.smale_holds);
    CHECK(report.stepwise_consistent);
    REQUIRE(report.morse_profile.size() == 3);
    CHECK(report.morse_profile[0].second == 0);
    CHECK(report.morse_profile[1].second == 1);
    CHECK(report.morse_profile[2].second == 2);
}

TEST_CASE("corollary bound is floor(morse / max multiplicity)") {
    Grid grid(2001);
    auto interval = scan_problem(shifted_problem(kC), grid, {});
    CHECK(interval.bifurcation_lower_bound == 2);
    CHECK(interval.bound_satisfied);
    auto radial = scan_problem(disk_problem(), grid, {});
    CHECK(radial.bifurcation_lower_bound == 2); // floor(5/2)
    CHECK(radial.crossings.size() >= 2);
    CHECK(radial.bound_satisfied);
}

TEST_CASE("identical inputs give byte-identical reports") {
    Grid grid(501);
    auto a = scan_problem(disk_problem(), grid, {});
    auto b = scan_problem(disk_problem(), grid, {});
    CHECK(serialized(a) == serialized(b));
}

TEST_CASE("halving refine_tol keeps multiplicities and barely moves instants") {
    Grid grid(501);
    ScanParams coarse;
    coarse.refine_tol = 1e-6;
    ScanParams fine = coarse;
    fine.refine_tol = 5e-7;
    auto a = scan_problem(shifted_problem(kC), grid, coarse);
    auto b = scan_problem(shifted_problem(kC), grid, fine);
    REQUIRE(a.crossings.size() == b.crossings.size());
    for (size_t i = 0; i < a.crossings.size(); ++i) {
        CHECK(a.crossings[i].multiplicity == b.crossings[i].multiplicity);
        CHECK(std::fabs(a.crossings[i].r0 - b.crossings[i].r0) < coarse.refine_tol);
    }
}

TEST_CASE("doubling the mesh keeps counts and moves instants by O(h^2)") {
    Grid coarse(501), fine(1001);
    auto a = scan_problem(disk_problem(), coarse, {});
    auto b = scan_problem(disk_problem(), fine, {});
    REQUIRE(a.crossings.size() == b.crossings.size());
    double h = coarse.h();
    for (size_t i = 0; i < a.crossings.size(); ++i) {
        CHECK(a.crossings[i].multiplicity == b.crossings[i].multiplicity);
        double shift = std::fabs(a.crossings[i].r0 - b.crossings[i].r0);
        double c_report = shift / (h * h);
        CHECK(std::isfinite(c_report));
        CHECK(shift <= 1e-3);
    }
}

TEST_CASE("kernel at full radius raises the M1 flag and leaves the scan sound") {
    Grid grid(2001);
    // f = -pi^2 puts the only crossing exactly at r = 1
    auto report = scan_problem(shifted_problem(9.869604401089358), grid, {});
    CHECK(report.m1_nonzero);
    CHECK(report.crossings.empty());
    CHECK(report.smale_lhs == report.smale_rhs);
}

TEST_CASE("isolation radii are positive at regular crossings") {
    Grid grid(1001);
    auto report = scan_problem(disk_problem(), grid, {});
    for (const auto& c : report.crossings) {
        CHECK(c.isolation_delta > 0.0);
        CHECK(c.isolation_delta >= 10.0 * report.params.refine_tol);
    }
}

TEST_CASE("scan parameters are range checked") {
    Grid grid(128);
    ScanParams bad;
    bad.r_samples = 32;
    CHECK_THROWS_AS(scan_problem(shifted_problem(0.0), grid, bad), Error);
    bad = {};
    bad.refine_tol = 0.0;
    CHECK_THROWS_AS(scan_problem(shifted_problem(0.0), grid, bad), Error);
    bad = {};
    bad.r_min = 1.5;
    CHECK_THROWS_AS(scan_problem(shifted_problem(0.0), grid, bad), Error);
}

TEST_CASE("invalid problems are rejected before scanning") {
    Grid grid(128);
    Interval1DProblem bad{CoefficientField::constant(-1.0), CoefficientField::constant(0.0),
                          std::nullopt};
    CHECK_THROWS_AS(scan_problem(bad, grid, {}), Error);
}

TEST_CASE("deep spectrum: ten angular modes, 23 instants, index 42") {
    Grid grid(501);
    RadialProblem p{2, CoefficientField::constant(1.0), CoefficientField::constant(-200.0),
                    {AngularMode{0}}};
    auto report = scan_problem(p, grid, {});
    // Oracle: one instant per Bessel zero j_{nu,k} < sqrt(200), weight 1 or 2.
    const double bound = std::sqrt(200.0);
    int expected_crossings = 0, expected_index = 0;
    for (int nu = 0;; ++nu) {
        auto zeros = oracle::bessel_zeros(static_cast<double>(nu), 6);
        int below = 0;
        for (double z : zeros)
            if (z < bound) ++below;
        if (below == 0) break;
        expected_crossings += below;
        expected_index += AngularMode{nu}.multiplicity_weight() * below;
    }
    CHECK(static_cast<int>(report.crossings.size()) == expected_crossings);
    CHECK(report.smale_lhs == expected_index);
    CHECK(report.smale_rhs == expected_index);
    CHECK(report.smale_holds);
    CHECK(report.stepwise_consistent);
    for (const auto& c : report.crossings) {
        CHECK(c.regular);
        CHECK(c.gamma_max_eig < 0.0);
        CHECK(c.forms_rel_disagreement <= 1e-2);
    }
}

TEST_CASE("smale identity matches the oscillation oracle on random problems") {
    // a smaller randomized batch; the acceptance suite runs the full 20
    Grid grid(1001);
    for (std::uint32_t seed : {11u, 12u, 13u, 14u, 15u}) {
        auto problem = testsupport::random_interval_problem(seed);
        auto report = scan_problem(problem, grid, {});
        CHECK(report.smale_holds);
        CHECK(report.stepwise_consistent);
        int oracle_zeros = oracle::oscillation_zero_count(
            [&](double x) { return problem.a(x); }, [&](double x) { return problem.f(x); });
        CHECK(report.smale_rhs == oracle_zeros);
    }
}

} // TEST_SUITE
