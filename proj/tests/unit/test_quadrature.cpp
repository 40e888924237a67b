#include "mismatchlab/errors.hpp"
#include "mismatchlab/quadrature.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

using namespace mismatchlab;

TEST_CASE("Gauss-Kronrod on smooth and kinked integrands") {
    CHECK(integrate([](double x) { return std::exp(x); }, 0, 1).value == doctest::Approx(std::exp(1.0) - 1.0));
    const std::array<double, 1> kink{0.3};
    const auto r = integrate([](double x) { return std::abs(x - 0.3); }, 0, 1, kink);
    CHECK(r.value == doctest::Approx(0.5 * 0.09 + 0.5 * 0.49).epsilon(1e-13));
    CHECK(r.error < 1e-12);
    CHECK(integrate([](double) { return 1.0; }, 2, 2).value == 0.0);
}

TEST_CASE("tanh-sinh copes with endpoint singularities") {
    const auto r = integrate_endpoint_singular([](double x) { return 1.0 / std::sqrt(x); }, 0, 1);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
    const auto l = integrate_endpoint_singular([](double x) { return std::log(x); }, 0, 1);
    CHECK(l.value == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("bad limits and failed convergence") {
    CHECK_THROWS_AS(integrate([](double x) { return x; }, 1, 0), InvalidParameter);
    QuadratureConfig cfg;
    cfg.max_depth = 0;
    cfg.rel_tol = 1e-15;
    cfg.abs_tol = 0.0;
    CHECK_THROWS_AS(integrate([](double x) { return std::sin(200.0 * x) * std::exp(x); }, 0, 10, {}, cfg),
                    QuadratureNonconvergence);
}

TEST_CASE("integrands with zero integral stop refining") {
    // rounding-level noise around zero, as in a matched-prior sum rule
    const auto noise = [](double x) { return 1e-13 * std::sin(1e4 * x) * std::cos(3e3 * x * x); };
    const QuadratureResult r = integrate(noise, 0.0, 1.0);
    CHECK(std::abs(r.value) < 1e-12);
    const QuadratureResult odd = integrate([](double x) { return x - 0.5; }, 0.0, 1.0);
    CHECK(std::abs(odd.value) < 1e-15);
}
