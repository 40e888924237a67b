#include "mismatchlab/errors.hpp"
#include "mismatchlab/estimate.hpp"
#include "mismatchlab/parallel.hpp"
#include "mismatchlab/spiked.hpp"
#include "oracle_values.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>
#include <vector>

using namespace mismatchlab;

TEST_CASE("identical RngSpec gives bit-identical instances, regardless of threads") {
    const auto a = sample_instance(40, 1.3, 2.0, {8, 3});
    const auto b = sample_instance(40, 1.3, 2.0, {8, 3});
    CHECK(a.signal == b.signal);
    CHECK(a.eigvals == b.eigvals);
    CHECK(std::memcmp(a.eigvecs.row(0).data(), b.eigvecs.row(0).data(), 40 * 40 * sizeof(double)) == 0);

    std::vector<std::vector<double>> serial(6);
    std::vector<std::vector<double>> threaded(6);
    for (std::size_t t = 0; t < 6; ++t) serial[t] = sample_instance(30, 1.0, 1.0, {2, t}).eigvals;
    parallel_for(6, [&](std::size_t t) { threaded[t] = sample_instance(30, 1.0, 1.0, {2, t}).eigvals; }, 3);
    CHECK(serial == threaded);

    CHECK(sample_instance(30, 1.0, 1.0, {2, 0}).eigvals != sample_instance(30, 1.0, 1.0, {2, 1}).eigvals);
}

TEST_CASE("Y is the spike plus symmetric noise") {
    const auto inst = sample_instance(6, 2.0, 3.0, {4, 0});
    CHECK(inst.n == 6);
    CHECK(inst.signal.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) CHECK(inst.observation(i, j) == inst.observation(j, i));
    }
    CHECK(inst.spike_strength() > 0.0);
    const auto g = inst.normalized_eigvals();
    CHECK(g[0] == doctest::Approx(inst.eigvals[0] / std::sqrt(6.0)));
    CHECK(sample_instance(6, 2.0, 3.0, {4, 0}, Spectrum::ValuesOnly).eigvecs.empty());
    CHECK(sample_instance(6, 2.0, 3.0, {4, 0}, Spectrum::ValuesOnly).eigvals == inst.eigvals);
}

TEST_CASE("noise variances: 2 on the diagonal, 1 off it") {
    const auto inst = sample_instance(600, 1.0, 0.0, {5, 0}, Spectrum::ValuesOnly);
    double diag = 0.0;
    double off = 0.0;
    for (std::size_t i = 0; i < inst.n; ++i) {
        diag += inst.observation(i, i) * inst.observation(i, i);
        for (std::size_t j = 0; j < i; ++j) off += inst.observation(i, j) * inst.observation(i, j);
    }
    CHECK(diag / 600.0 == doctest::Approx(2.0).epsilon(0.1));
    CHECK(off / (600.0 * 599.0 / 2.0) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("second moment of the bulk") {
    std::vector<double> moments(100);
    parallel_for(100, [&](std::size_t t) {
        const auto inst = sample_instance(500, 1.0, 0.0, {6, t}, Spectrum::ValuesOnly);
        double s = 0.0;
        for (double g : inst.normalized_eigvals()) s += g * g;
        moments[t] = s / 500.0;
    });
    const Estimate e = estimate_mean(moments);
    CHECK(std::abs(e.mean() - oracle::kSecondMomentSemicircle) < 0.05);
}

TEST_CASE("empirical spectrum is close to the semicircle") {
    const auto inst = sample_instance(1000, 1.0, 0.0, {7, 0}, Spectrum::ValuesOnly);
    auto g = inst.normalized_eigvals();
    std::sort(g.begin(), g.end());
    const auto cdf = [](double t) {
        t = std::clamp(t, -2.0, 2.0);
        return 0.5 + t * std::sqrt(4.0 - t * t) / (4.0 * std::numbers::pi) + std::asin(t / 2.0) / std::numbers::pi;
    };
    double ks = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double f = cdf(g[i]);
        ks = std::max({ks, std::abs(f - static_cast<double>(i) / 1000.0), std::abs(f - (i + 1.0) / 1000.0)});
    }
    CHECK(ks <= 0.05);
}

TEST_CASE("top eigenvalue on either side of the threshold") {
    const auto above = sample_instance(1000, 1.0, 4.0, {8, 0}, Spectrum::ValuesOnly);
    CHECK(std::abs(above.normalized_eigvals()[0] - 2.5) < 0.1);
    const auto below = sample_instance(1000, 1.0, 0.25, {8, 1}, Spectrum::ValuesOnly);
    CHECK(std::abs(below.normalized_eigvals()[0] - 2.0) < 0.1);
}

TEST_CASE("invalid arguments") {
    CHECK_THROWS_AS(sample_instance(1, 1.0, 1.0, {}), InvalidParameter);
    CHECK_THROWS_AS(sample_instance(5, 0.0, 1.0, {}), InvalidParameter);
    CHECK_THROWS_AS(sample_instance(5, 1.0, -1.0, {}), InvalidParameter);
}

TEST_CASE("SPWG1 dump round trip and layout") {
    const auto inst = sample_instance(9, 1.5, 2.5, {77, 0});
    const InstanceDump d = make_dump(inst);
    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    write_dump(ss, d);
    const std::string bytes = ss.str();
    CHECK(bytes.size() == 5 + 8 * 4 + 9 * 8);
    CHECK(bytes.substr(0, 5) == "SPWG1");
    CHECK(static_cast<unsigned char>(bytes[5]) == 9);  // n, little-endian
    CHECK(static_cast<unsigned char>(bytes[13]) == 77);  // seed

    const InstanceDump back = read_dump(ss);
    CHECK(back.n == 9);
    CHECK(back.seed == 77);
    CHECK(back.lambda == 2.5);
    CHECK(back.sigma == 1.5);
    CHECK(back.eigvals == inst.eigvals);
}

TEST_CASE("malformed dumps") {
    std::stringstream bad("SPWG2xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx");
    CHECK_THROWS_AS(read_dump(bad), FormatError);
    const auto inst = sample_instance(4, 1.0, 1.0, {1, 0});
    std::stringstream ss;
    write_dump(ss, make_dump(inst));
    std::stringstream truncated(ss.str().substr(0, ss.str().size() - 3));
    CHECK_THROWS_AS(read_dump(truncated), FormatError);
    InstanceDump wrong = make_dump(inst);
    wrong.n = 5;
    std::stringstream out;
    CHECK_THROWS_AS(write_dump(out, wrong), InvalidParameter);
}
