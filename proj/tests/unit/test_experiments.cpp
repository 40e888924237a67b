#include "mismatchlab/errors.hpp"
#include "mismatchlab/experiments.hpp"
#include "mismatchlab/spiked.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

using namespace mismatchlab;

namespace {

ChainConfig short_chains(std::uint64_t seed) {
    ChainConfig cfg;
    cfg.burn_in = 800;
    cfg.n_samples = 1600;
    cfg.rng = {seed, 0};
    return cfg;
}

}  // namespace

TEST_CASE("mse report JSON has exactly the documented keys") {
    const ProblemParams p{1.0, 1.0, 2.0, 2.0};
    const MseReport r = mse_experiment(p, 20, 8, short_chains(5));
    CHECK(r.n == 20);
    CHECK(r.trials == 8);
    CHECK(r.per_trial.size() == 8);
    CHECK(r.asymptotic == 0.75);
    CHECK(r.seed == 5);
    CHECK(r.mse.n_samples() == 8);
    CHECK(std::isfinite(r.mse.mean()));

    const std::string text = to_json(r);
    const auto j = nlohmann::json::parse(text);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    std::sort(keys.begin(), keys.end());
    CHECK(keys == std::vector<std::string>{"asymptotic", "mse", "n", "params", "seed", "trials", "z_score"});
    CHECK(j["params"].size() == 4);
    CHECK(j["params"]["lambda_p"] == 2.0);
    CHECK(j["mse"].size() == 3);
    CHECK(j["mse"]["samples"] == 8);
    CHECK(j["mse"]["stderr"].get<double>() == r.mse.std_error());

    MseReport degenerate = r;
    degenerate.z_score = std::nan("");
    CHECK(nlohmann::json::parse(to_json(degenerate))["z_score"].is_null());
}

TEST_CASE("mse experiment is independent of the worker count") {
    const ProblemParams p{1.0, 1.5, 3.0, 2.0};
    const MseReport one = mse_experiment(p, 16, 8, short_chains(9), 1);
    const MseReport three = mse_experiment(p, 16, 8, short_chains(9), 3);
    CHECK(to_json(one) == to_json(three));
    for (std::size_t t = 0; t < 8; ++t) CHECK(one.per_trial[t].mse == three.per_trial[t].mse);
    const MseReport other = mse_experiment(p, 16, 8, short_chains(10), 1);
    CHECK(other.mse.mean() != one.mse.mean());
}

TEST_CASE("mse experiment argument checks") {
    const ProblemParams p{1.0, 1.0, 2.0, 2.0};
    CHECK_THROWS_AS(mse_experiment(p, 20, 7, short_chains(1)), InvalidParameter);
    CHECK_THROWS_AS(mse_experiment({1.0, -1.0, 2.0, 2.0}, 20, 8, short_chains(1)), InvalidParameter);
}

TEST_CASE("radial log partition") {
    const auto inst = sample_instance(100, 1.0, 1.0, {3, 0}, Spectrum::ValuesOnly);
    const auto g = inst.normalized_eigvals();
    // lambda_p -> 0 leaves the prior, whose normaliser is 1
    CHECK(std::abs(log_partition_radial(g, 1.3, 1e-10, {3, 1})) < 1e-3);
    const double a = log_partition_radial(g, 1.0, 2.0, {3, 1});
    const double b = log_partition_radial(g, 1.0, 2.0, {3, 1});
    CHECK(a == b);
    CHECK(std::isfinite(a));

    FreeEnergyConfig bad;
    bad.grid_points = 1;
    CHECK_THROWS_AS(log_partition_radial(g, 1.0, 2.0, {3, 1}, bad), InvalidParameter);
}

TEST_CASE("free energy in region C vanishes") {
    FreeEnergyConfig cfg;
    cfg.grid_points = 80;
    cfg.sphere_samples = 1000;
    const Estimate f = free_energy_experiment({1.0, 1.0, 0.5, 0.5}, 200, 8, {4, 0}, cfg);
    CHECK(std::abs(f.mean()) < 0.02);
    CHECK(f.n_samples() == 8);
    const Estimate g = free_energy_experiment({1.0, 1.0, 0.5, 0.5}, 200, 8, {4, 0}, cfg, 1);
    CHECK(f.mean() == g.mean());
    CHECK_THROWS_AS(free_energy_experiment({1.0, 1.0, 0.5, 0.5}, 200, 4, {4, 0}, cfg), InvalidParameter);
}
