#include "mismatchlab/errors.hpp"
#include "mismatchlab/estimate.hpp"
#include "mismatchlab/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace mismatchlab;

TEST_CASE("counter RNG is a pure function of (seed, stream, draw index)") {
    CounterRng a({5, 7});
    CounterRng b({5, 7});
    CounterRng c({5, 8});
    CounterRng d({6, 7});
    int same_c = 0;
    int same_d = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a();
        CHECK(x == b());
        same_c += x == c();
        same_d += x == d();
    }
    CHECK(same_c == 0);
    CHECK(same_d == 0);
}

TEST_CASE("substreams") {
    const RngSpec base{1, 0};
    CHECK(base.substream(3) == base.substream(3));
    CHECK(!(base.substream(3) == base.substream(4)));
    CHECK(base.substream(3).seed == 1);
}

TEST_CASE("counter RNG output looks uniform") {
    CounterRng g({42, 0});
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double sum = 0.0;
    double sum2 = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double x = u(g);
        sum += x;
        sum2 += x * x;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(sum2 / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("estimate_mean") {
    const std::vector<double> constant(10, 3.0);
    const Estimate c = estimate_mean(constant);
    CHECK(c.mean() == 3.0);
    CHECK(c.std_error() == 0.0);
    CHECK(c.n_samples() == 10);

    const std::vector<double> two{0.0, 2.0};
    CHECK(estimate_mean(two).mean() == 1.0);
    CHECK(estimate_mean(two).std_error() == doctest::Approx(1.0));

    CounterRng g({9, 0});
    std::normal_distribution<double> normal;
    std::vector<double> xs(10000);
    for (double& x : xs) x = normal(g);
    const Estimate e = estimate_mean(xs);
    CHECK(std::abs(e.mean()) < 0.03);
    CHECK(e.std_error() == doctest::Approx(0.01).epsilon(0.05));

    CHECK_THROWS_AS(estimate_mean(std::vector<double>{}), InvalidParameter);
}

TEST_CASE("log_mean_exp") {
    const std::vector<double> flat(500, 2.0);
    const Estimate f = log_mean_exp(flat, 4.0);
    CHECK(f.mean() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f.std_error() == doctest::Approx(0.0));

    // no overflow at huge log values
    std::vector<double> big{1000.0, 1000.0 + std::log(3.0)};
    CHECK(log_mean_exp(big, 1.0, 1).mean() == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));

    // ln E exp(Z) = 1/2 for Z ~ N(0, 1)
    CounterRng g({10, 0});
    std::normal_distribution<double> normal;
    std::vector<double> z(200000);
    for (double& x : z) x = normal(g);
    const Estimate e = log_mean_exp(z);
    CHECK(std::abs(e.mean() - 0.5) < 4.0 * e.std_error() + 1e-3);
    CHECK(e.std_error() > 0.0);
    CHECK(e.std_error() < 0.02);
}
