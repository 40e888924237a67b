#include "mismatchlab/errors.hpp"
#include "mismatchlab/formulas.hpp"
#include "mismatchlab/validators.hpp"

#include <doctest.h>

#include <cmath>

using namespace mismatchlab;

TEST_CASE("sum rule residual vanishes") {
    CHECK(sum_rule_residual(1, 1) == 0.0);
    CHECK(std::abs(sum_rule_residual(1, 2)) < 1e-4);
    CHECK(std::abs(sum_rule_residual(2, 1)) < 1e-4);
    for (double s : {0.5, 1.0, 1.7}) {
        for (double sp : {0.4, 0.9, 1.3, 3.0}) {
            const double scale = std::max(1.0, 4.0 * kl_gaussian(s, sp));
            CHECK(std::abs(sum_rule_residual(s, sp)) / scale < 1e-8);
        }
    }
}

TEST_CASE("sum rule reports quadrature failure") {
    QuadratureConfig tight;
    tight.rel_tol = 1e-300;
    tight.abs_tol = 0.0;
    tight.max_depth = 1;
    CHECK_THROWS_AS(sum_rule_residual(1, 2, tight), QuadratureNonconvergence);
}

TEST_CASE("free-energy identity residual at interior points") {
    CHECK(std::abs(identity_residual({1, 1, 2, 2}, 1e-4)) < 1e-6);
    CHECK(std::abs(identity_residual({1.3, 0.8, 3, 5}, 1e-4)) < 1e-6);
    CHECK(identity_residual({1, 1, 0.5, 0.5}, 1e-4) == 0.0);
    CHECK(default_identity_step({1, 1, 3, 5}) == doctest::Approx(5e-4));
}

TEST_CASE("free-energy identity residual decays like h^2") {
    const auto pts = identity_test_points(20, 5);
    REQUIRE(pts.size() == 20);
    const double r1 = identity_max_residual(pts, 1e-4);
    const double r2 = identity_max_residual(pts, 5e-5);
    const double r3 = identity_max_residual(pts, 2.5e-5);
    CHECK(r1 < 1e-6);
    CHECK(r1 / r2 > 3.0);
    CHECK(r2 / r3 > 3.0);
}

TEST_CASE("free-energy identity residual refuses stencils across a boundary") {
    // lambda' sigma'^4 = 1 is the A/C boundary
    CHECK_THROWS_AS(identity_residual({1, 1, 0.5, 1.0 + 1e-5}, 1e-4), BoundaryProximity);
    CHECK_THROWS_AS(identity_residual({1, 1, 5e-4, 2}, 1e-4), BoundaryProximity);
}

TEST_CASE("boundary continuity") {
    const ContinuityReport r = boundary_continuity(3000, 9);
    CHECK(r.points == 3000);
    CHECK(r.max_mse_gap <= 1e-12);
    CHECK(r.max_free_energy_gap <= 1e-12);
}
