#include "mismatchlab/errors.hpp"
#include "mismatchlab/spherical_integral.hpp"
#include "oracle_values.hpp"

#include <doctest.h>

#include <cmath>

using namespace mismatchlab;

namespace {
GMInput semicircle_at(double two_theta) { return GMInput::from_measure(semicircle_measure(), 0.5 * two_theta); }
}  // namespace

TEST_CASE("nu in the three cases") {
    CHECK(gm_nu(semicircle_at(0.5)) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(gm_nu(semicircle_at(1.0)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(gm_nu(semicircle_at(2.0)) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(gm_nu(semicircle_at(-2.0)) == doctest::Approx(-1.5).epsilon(1e-14));
}

TEST_CASE("nu is continuous across the Hilbert edges") {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double eps = 1e-10 * (1.0 + k);
        for (double edge : {1.0, -1.0}) {
            const double inside = gm_nu(semicircle_at(edge * (1.0 - eps)));
            const double outside = gm_nu(semicircle_at(edge * (1.0 + eps)));
            // nu is Lipschitz through the edge, so the jump scales with eps
            worst = std::max(worst, std::abs(inside - outside) / eps);
        }
    }
    CHECK(worst < 10.0);
}

TEST_CASE("limit values against independent quadrature") {
    CHECK(gm_limit(semicircle_at(0.0)) == 0.0);
    CHECK(gm_limit(semicircle_at(0.25)) == doctest::Approx(oracle::kGmSemicircle_0_25).epsilon(1e-10));
    CHECK(gm_limit(semicircle_at(0.5)) == doctest::Approx(oracle::kGmSemicircle_0_5).epsilon(1e-10));
    CHECK(gm_limit(semicircle_at(1.5)) == doctest::Approx(oracle::kGmSemicircle_1_5).epsilon(1e-10));
    CHECK(gm_limit(semicircle_at(2.0)) == doctest::Approx(oracle::kGmSemicircle_2).epsilon(1e-10));
}

TEST_CASE("limit is nondecreasing in theta >= 0") {
    double prev = 0.0;
    for (double tt = 0.05; tt < 6.0; tt += 0.05) {
        const double v = gm_limit(semicircle_at(tt));
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
}

TEST_CASE("deformed edge") {
    const DeformedEdge low = deformed_edge(0.5);
    CHECK(low.gamma_min == -2.0);
    CHECK(low.gamma_max == 2.0);
    CHECK(low.h_min == -1.0);
    CHECK(low.h_max == 1.0);
    CHECK(deformed_edge(1.0).gamma_max == 2.0);
    CHECK(deformed_edge(1.0 + 1e-9).gamma_max == doctest::Approx(2.0).epsilon(1e-12));
    const DeformedEdge high = deformed_edge(2.0);
    CHECK(high.gamma_max == 2.5);
    CHECK(high.h_max == 0.5);
    CHECK_THROWS_AS(deformed_edge(-0.1), InvalidParameter);
}

TEST_CASE("limit with a detached top eigenvalue") {
    // above h_max = 1/2 the outlier 2.5 sets nu
    const GMInput in = deformed_gm_input(2.0, 0.5);
    CHECK(gm_nu(in) == doctest::Approx(2.5 - 1.0).epsilon(1e-14));
    CHECK(std::isfinite(gm_limit(in)));
    CHECK(gm_limit(in) > gm_limit(semicircle_at(1.0)));
}

TEST_CASE("inconsistent inputs are rejected") {
    GMInput in = semicircle_at(2.0);
    in.h_max = 5.0;  // claims R(2) exists for the semicircle
    CHECK_THROWS_AS(gm_limit(in), OutOfRange);
    GMInput narrow = semicircle_at(0.5);
    narrow.gamma_max = 1.5;  // inside the bulk
    CHECK_THROWS_AS(gm_limit(narrow), InvalidParameter);
    GMInput none;
    CHECK_THROWS_AS(gm_nu(none), InvalidParameter);
}
