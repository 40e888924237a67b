#include "mismatchlab/spiked.hpp"

#include "mismatchlab/errors.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>

namespace mismatchlab {

std::vector<double> SpikedInstance::normalized_eigvals() const {
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> out(eigvals);
    for (double& g : out) g *= scale;
    return out;
}

double SpikedInstance::spike_strength() const {
    double norm2 = 0.0;
    for (double x : signal) norm2 += x * x;
    return std::sqrt(lambda) * norm2 / static_cast<double>(n);
}

SpikedInstance sample_instance(std::size_t n, double sigma, double lambda, const RngSpec& rng, Spectrum spectrum) {
    require(n >= 2, "spiked instance needs n >= 2");
    require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive");
    require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be nonnegative");

    CounterRng engine(rng);
    std::normal_distribution<double> normal(0.0, 1.0);

    SpikedInstance inst;
    inst.n = n;
    inst.sigma = sigma;
    inst.lambda = lambda;
    inst.rng = rng;
    inst.signal.resize(n);
    for (double& x : inst.signal) x = sigma * normal(engine);

    const double spike = std::sqrt(lambda / static_cast<double>(n));
    const double diag_sd = std::sqrt(2.0);
    inst.observation = SymmetricMatrix(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double noise = (i == j ? diag_sd : 1.0) * normal(engine);
            inst.observation(i, j) = spike * inst.signal[i] * inst.signal[j] + noise;
        }
    }

    if (spectrum == Spectrum::Full) {
        EigenDecomposition eig = symmetric_eig(inst.observation);
        inst.eigvals = std::move(eig.values);
        inst.eigvecs = std::move(eig.vectors);
    } else {
        inst.eigvals = symmetric_eigvals(inst.observation);
    }
    return inst;
}

namespace {

constexpr std::array<char, 5> kMagic{'S', 'P', 'W', 'G', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    std::array<char, 8> bytes;
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffU);
    os.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& is) {
    std::array<unsigned char, 8> bytes{};
    is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!is) throw FormatError("truncated SPWG1 stream");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& os, double x) { put_u64(os, std::bit_cast<std::uint64_t>(x)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void write_dump(std::ostream& os, const InstanceDump& dump) {
    require(dump.eigvals.size() == dump.n, "dump eigenvalue count must equal n");
    os.write(kMagic.data(), kMagic.size());
    put_u64(os, dump.n);
    put_u64(os, dump.seed);
    put_f64(os, dump.lambda);
    put_f64(os, dump.sigma);
    for (double g : dump.eigvals) put_f64(os, g);
    if (!os) throw FormatError("failed writing SPWG1 stream");
}

InstanceDump read_dump(std::istream& is) {
    std::array<char, 5> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kMagic) throw FormatError("not an SPWG1 stream");
    InstanceDump dump;
    dump.n = get_u64(is);
    dump.seed = get_u64(is);
    dump.lambda = get_f64(is);
    dump.sigma = get_f64(is);
    if (dump.n > (std::uint64_t{1} << 32)) throw FormatError("implausible SPWG1 dimension");
    dump.eigvals.resize(dump.n);
    for (double& g : dump.eigvals) g = get_f64(is);
    return dump;
}

InstanceDump make_dump(const SpikedInstance& inst) {
    return {inst.n, inst.rng.seed, inst.lambda, inst.sigma, inst.eigvals};
}

}  // namespace mismatchlab
