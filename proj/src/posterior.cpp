#include "mismatchlab/posterior.hpp"

#include "mismatchlab/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace mismatchlab {

namespace {

struct Welford {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        count += 1.0;
        const double d = x - mean;
        mean += d / count;
        m2 += d * (x - mean);
    }
    double variance() const { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }
};

// Dual averaging of log step size (Nesterov's scheme as used for HMC tuning).
class DualAveraging {
public:
    DualAveraging(double step, double target) : mu_(std::log(10.0 * step)), log_step_(std::log(step)), target_(target) {}

    double update(double accept_prob) {
        t_ += 1.0;
        const double eta = 1.0 / (t_ + kT0);
        h_bar_ = (1.0 - eta) * h_bar_ + eta * (target_ - accept_prob);
        log_step_ = mu_ - std::sqrt(t_) / kGamma * h_bar_;
        const double w = std::pow(t_, -kKappa);
        log_step_bar_ = w * log_step_ + (1.0 - w) * log_step_bar_;
        return std::exp(log_step_);
    }

    double final_step() const { return t_ > 0.0 ? std::exp(log_step_bar_) : std::exp(log_step_); }

private:
    static constexpr double kGamma = 0.05;
    static constexpr double kT0 = 10.0;
    static constexpr double kKappa = 0.75;

    double mu_;
    double log_step_;
    double target_;
    double h_bar_ = 0.0;
    double log_step_bar_ = 0.0;
    double t_ = 0.0;
};

// Preconditioned MALA on log p(y) = sum c_i y_i^2 - b |y|^4.
class MalaChain {
public:
    MalaChain(const EigenbasisForm& form, std::vector<double> y)
        : form_(form), y_(std::move(y)), scale_(y_.size(), 1.0), grad_(y_.size()), prop_(y_.size()),
          prop_grad_(y_.size()) {
        logp_ = evaluate(y_, grad_);
        if (!std::isfinite(logp_)) throw InvalidParameter("chain started at a point of zero density");
    }

    const std::vector<double>& state() const { return y_; }

    void set_scale(std::vector<double> scale) { scale_ = std::move(scale); }

    // One proposal; returns the Metropolis acceptance probability and sets `accepted`.
    template <class Engine>
    double step(double eps, Engine& engine, bool& accepted) {
        const std::size_t n = y_.size();
        const double half_eps2 = 0.5 * eps * eps;
        for (std::size_t i = 0; i < n; ++i) {
            prop_[i] = y_[i] + half_eps2 * scale_[i] * grad_[i] + eps * std::sqrt(scale_[i]) * normal_(engine);
        }
        const double logp_prop = evaluate(prop_, prop_grad_);
        double log_ratio = -std::numeric_limits<double>::infinity();
        if (std::isfinite(logp_prop)) {
            double fwd = 0.0;
            double bwd = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double df = prop_[i] - y_[i] - half_eps2 * scale_[i] * grad_[i];
                const double db = y_[i] - prop_[i] - half_eps2 * scale_[i] * prop_grad_[i];
                fwd += df * df / scale_[i];
                bwd += db * db / scale_[i];
            }
            log_ratio = logp_prop - logp_ + (fwd - bwd) / (2.0 * eps * eps);
        }
        const double alpha = std::isnan(log_ratio) ? 0.0 : std::min(1.0, std::exp(log_ratio));
        accepted = uniform_(engine) < alpha;
        if (accepted) {
            y_.swap(prop_);
            grad_.swap(prop_grad_);
            logp_ = logp_prop;
        }
        return alpha;
    }

private:
    double evaluate(const std::vector<double>& y, std::vector<double>& grad) const {
        double r = 0.0;
        double lin = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double y2 = y[i] * y[i];
            r += y2;
            lin += form_.c[i] * y2;
        }
        const double br2 = 2.0 * form_.b * r;
        for (std::size_t i = 0; i < y.size(); ++i) grad[i] = 2.0 * y[i] * (form_.c[i] - br2);
        return lin - form_.b * r * r;
    }

    const EigenbasisForm& form_;
    std::vector<double> y_;
    std::vector<double> scale_;
    std::vector<double> grad_;
    std::vector<double> prop_;
    std::vector<double> prop_grad_;
    double logp_ = 0.0;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::vector<double> to_eigenbasis(const Matrix& q, std::span<const double> x) {
    const std::size_t n = q.rows();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = q.row(i);
        for (std::size_t k = 0; k < n; ++k) y[k] += row[k] * x[i];
    }
    return y;
}

std::vector<double> default_start(std::size_t chain, const EigenbasisForm& form, double sigma_p, CounterRng& engine) {
    const std::size_t n = form.c.size();
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> y(n);
    for (double& v : y) v = normal(engine);
    double scale = sigma_p;
    switch (chain % 4) {
        case 0:
            scale = 1e-2 * sigma_p;
            break;
        case 1:
            break;
        case 2: {
            const double r = form.radial_mode();
            if (r <= 0.0) {
                scale = 0.5 * sigma_p;
                break;
            }
            for (double& v : y) v *= 0.1 * sigma_p;
            y[0] = std::sqrt(r);
            return y;
        }
        default: {
            std::uniform_real_distribution<double> u(-1.5, 1.5);
            scale = sigma_p * std::exp(u(engine));
            break;
        }
    }
    for (double& v : y) v *= scale;
    return y;
}

std::vector<std::size_t> monitored_directions(std::size_t n) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < std::min<std::size_t>(5, n); ++i) out.push_back(i);
    for (std::size_t i = n > 5 ? n - 5 : 0; i < n; ++i) {
        if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
    }
    return out;
}

struct ChainOutput {
    std::vector<double> batch_sums;    // batches x n
    std::vector<double> batch_counts;  // batches
    std::vector<double> cross_sums;    // batches x n x n, only when recording
    std::vector<Welford> halves;       // 2 per monitored direction
    double accept_rate = 0.0;
    double step = 0.0;
};

ChainOutput run_chain(const EigenbasisForm& form, std::vector<double> start, const ChainConfig& cfg,
                      const std::vector<std::size_t>& monitored, CounterRng& engine) {
    const std::size_t n = form.c.size();
    MalaChain chain(form, std::move(start));

    const std::size_t burn = cfg.burn_in;
    const std::size_t window_lo = burn * 15 / 100;
    const std::size_t window_hi = burn * 65 / 100;
    std::vector<Welford> local(n);
    double eps = cfg.step_init;
    DualAveraging da(eps, cfg.target_accept);
    bool accepted = false;

    for (std::size_t t = 0; t < burn; ++t) {
        eps = da.update(chain.step(eps, engine, accepted));
        if (t >= window_lo && t < window_hi) {
            const auto& y = chain.state();
            for (std::size_t i = 0; i < n; ++i) local[i].add(y[i]);
        }
        if (t + 1 == window_hi && window_hi - window_lo >= 20) {
            const double count = static_cast<double>(window_hi - window_lo);
            std::vector<double> var(n);
            for (std::size_t i = 0; i < n; ++i) var[i] = local[i].variance();
            std::vector<double> sorted(var);
            std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
            const double floor = std::max(1e-3 * sorted[n / 2], 1e-300);
            std::vector<double> scale(n);
            double smallest = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                scale[i] = (count * var[i] + 5.0 * floor) / (count + 5.0);
                smallest = std::min(smallest, scale[i]);
            }
            chain.set_scale(std::move(scale));
            // the old step was limited by the narrowest direction, which is now unit scale
            eps = std::clamp(da.final_step() / std::sqrt(smallest), 1e-4, 10.0);
            da = DualAveraging(eps, cfg.target_accept);
        }
    }
    eps = da.final_step();

    ChainOutput out;
    const std::size_t batches = cfg.batches;
    const std::size_t total = cfg.n_samples;
    out.batch_sums.assign(batches * n, 0.0);
    out.batch_counts.assign(batches, 0.0);
    if (cfg.record_cross_moments) out.cross_sums.assign(batches * n * n, 0.0);
    out.halves.resize(2 * monitored.size());

    std::size_t n_accepted = 0;
    for (std::size_t k = 0; k < total; ++k) {
        chain.step(eps, engine, accepted);
        if (accepted) ++n_accepted;
        const auto& y = chain.state();
        const std::size_t b = k * batches / total;
        double* sums = out.batch_sums.data() + b * n;
        for (std::size_t i = 0; i < n; ++i) sums[i] += y[i] * y[i];
        out.batch_counts[b] += 1.0;
        if (cfg.record_cross_moments) {
            double* cross = out.cross_sums.data() + b * n * n;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) cross[i * n + j] += y[i] * y[j];
            }
        }
        const std::size_t half = 2 * k < total ? 0 : 1;
        for (std::size_t m = 0; m < monitored.size(); ++m) {
            const double v = y[monitored[m]];
            out.halves[2 * m + half].add(v * v);
        }
    }
    out.accept_rate = static_cast<double>(n_accepted) / static_cast<double>(total);
    out.step = eps;
    return out;
}

double split_rhat(const std::vector<const Welford*>& seqs) {
    const double m = static_cast<double>(seqs.size());
    double len = 0.0;
    double w = 0.0;
    double grand = 0.0;
    for (const Welford* s : seqs) {
        len += s->count;
        w += s->variance();
        grand += s->mean;
    }
    len /= m;
    w /= m;
    grand /= m;
    double between = 0.0;
    for (const Welford* s : seqs) between += (s->mean - grand) * (s->mean - grand);
    between /= (m - 1.0);  // variance of sequence means, i.e. B / len
    if (w <= 0.0) return between <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    const double var_plus = (len - 1.0) / len * w + between;
    return std::sqrt(var_plus / w);
}

}  // namespace

LogDensity log_posterior_grad(const PosteriorSpec& spec, std::span<const double> x) {
    const SpikedInstance& inst = spec.instance;
    require(x.size() == inst.n, "point dimension must match the instance");
    const double n = static_cast<double>(inst.n);
    const double coupling = std::sqrt(spec.lambda_p / n);
    const double inv_var = 1.0 / (spec.sigma_p * spec.sigma_p);

    const std::vector<double> yx = inst.observation.multiply(x);
    double norm2 = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        norm2 += x[i] * x[i];
        quad += x[i] * yx[i];
    }
    LogDensity out;
    out.value = -0.5 * norm2 * inv_var - spec.lambda_p * norm2 * norm2 / (4.0 * n) + 0.5 * coupling * quad;
    out.grad.resize(x.size());
    const double radial = inv_var + spec.lambda_p * norm2 / n;
    for (std::size_t i = 0; i < x.size(); ++i) out.grad[i] = -radial * x[i] + coupling * yx[i];
    return out;
}

double EigenbasisForm::log_density(std::span<const double> y) const {
    double r = 0.0;
    double lin = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        r += y[i] * y[i];
        lin += c[i] * y[i] * y[i];
    }
    return lin - b * r * r;
}

double EigenbasisForm::radial_mode() const {
    const double top = *std::max_element(c.begin(), c.end());
    if (top <= 0.0 || b <= 0.0) return 0.0;
    return top / (2.0 * b);
}

EigenbasisForm eigenbasis_form(const PosteriorSpec& spec) {
    const SpikedInstance& inst = spec.instance;
    require(std::isfinite(spec.sigma_p) && spec.sigma_p > 0.0, "sigma_p must be positive");
    require(std::isfinite(spec.lambda_p) && spec.lambda_p >= 0.0, "lambda_p must be nonnegative");
    require(inst.eigvals.size() == inst.n && inst.n >= 1, "instance has no spectrum");
    const double n = static_cast<double>(inst.n);
    const double coupling = 0.5 * std::sqrt(spec.lambda_p / n);
    const double prior = 0.5 / (spec.sigma_p * spec.sigma_p);
    EigenbasisForm form;
    form.c.resize(inst.n);
    for (std::size_t i = 0; i < inst.n; ++i) form.c[i] = coupling * inst.eigvals[i] - prior;
    form.b = spec.lambda_p / (4.0 * n);
    return form;
}

void ChainConfig::validate() const {
    require(n_chains >= 4, "split convergence diagnostics need at least 4 chains");
    require(burn_in >= 1, "burn_in must be positive");
    require(batches >= 2, "need at least 2 batches per chain");
    require(n_samples >= 2 * batches, "n_samples must be at least twice the batch count");
    require(target_accept > 0.0 && target_accept < 1.0, "target_accept must lie in (0, 1)");
    require(std::isfinite(step_init) && step_init > 0.0, "step_init must be positive");
    require(rhat_threshold > 1.0, "rhat_threshold must exceed 1");
    require(initial_points.empty() || initial_points.size() == n_chains,
            "initial_points must be empty or give one point per chain");
}

PosteriorMoments::PosteriorMoments(Matrix eigvecs, std::vector<double> second, std::vector<double> second_err,
                                   Matrix batch_means, ChainDiagnostics diag)
    : eigvecs_(std::move(eigvecs)), second_(std::move(second)), second_err_(std::move(second_err)),
      batch_means_(std::move(batch_means)), diag_(std::move(diag)) {}

namespace {

SymmetricMatrix rotate_diagonal(const Matrix& q, std::span<const double> m) {
    const std::size_t n = m.size();
    SymmetricMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto qi = q.row(i);
        for (std::size_t j = 0; j <= i; ++j) {
            const auto qj = q.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += qi[k] * qj[k] * m[k];
            out(i, j) = s;
        }
    }
    return out;
}

}  // namespace

SymmetricMatrix PosteriorMoments::outer() const { return rotate_diagonal(eigvecs_, second_); }

SymmetricMatrix PosteriorMoments::outer_std_errors() const {
    const std::size_t n = dimension();
    const std::size_t rows = batch_means_.rows();
    std::vector<Welford> acc(n * (n + 1) / 2);
    for (std::size_t r = 0; r < rows; ++r) {
        const SymmetricMatrix batch = rotate_diagonal(eigvecs_, batch_means_.row(r));
        std::size_t idx = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) acc[idx++].add(batch(i, j));
        }
    }
    SymmetricMatrix out(n);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) out(i, j) = std::sqrt(acc[idx++].variance() / static_cast<double>(rows));
    }
    return out;
}

double PosteriorMoments::matrix_mse(std::span<const double> signal) const {
    const std::size_t n = dimension();
    require(signal.size() == n, "signal dimension must match");
    const std::vector<double> p = to_eigenbasis(eigvecs_, signal);
    double s2 = 0.0;
    for (double v : signal) s2 += v * v;
    double cross = 0.0;
    double self = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        cross += second_[k] * p[k] * p[k];
        self += second_[k] * second_[k];
    }
    const double nd = static_cast<double>(n);
    return (s2 * s2 - 2.0 * cross + self) / (nd * nd);
}

PosteriorMoments posterior_mean_outer(const PosteriorSpec& spec, const ChainConfig& cfg) {
    cfg.validate();
    const SpikedInstance& inst = spec.instance;
    const std::size_t n = inst.n;
    require(inst.eigvecs.rows() == n && inst.eigvecs.cols() == n, "posterior sampling needs the eigenvectors of Y");
    require(!cfg.record_cross_moments || n <= 64, "cross moments are only recorded for n <= 64");
    const EigenbasisForm form = eigenbasis_form(spec);
    const std::vector<std::size_t> monitored = monitored_directions(n);

    std::vector<ChainOutput> outputs;
    outputs.reserve(cfg.n_chains);
    for (std::size_t k = 0; k < cfg.n_chains; ++k) {
        CounterRng engine(cfg.rng.substream(k));
        std::vector<double> start;
        if (cfg.initial_points.empty()) {
            start = default_start(k, form, spec.sigma_p, engine);
        } else {
            require(cfg.initial_points[k].size() == n, "initial point dimension must match the instance");
            start = to_eigenbasis(inst.eigvecs, cfg.initial_points[k]);
        }
        outputs.push_back(run_chain(form, std::move(start), cfg, monitored, engine));
    }

    const std::size_t rows = cfg.n_chains * cfg.batches;
    Matrix batch_means(rows, n);
    std::vector<double> second(n, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < cfg.n_chains; ++k) {
        for (std::size_t b = 0; b < cfg.batches; ++b) {
            const double count = outputs[k].batch_counts[b];
            const double* sums = outputs[k].batch_sums.data() + b * n;
            auto row = batch_means.row(k * cfg.batches + b);
            for (std::size_t i = 0; i < n; ++i) {
                row[i] = sums[i] / count;
                second[i] += sums[i];
            }
            total += count;
        }
    }
    for (double& m : second) m /= total;

    std::vector<double> second_err(n);
    for (std::size_t i = 0; i < n; ++i) {
        Welford w;
        for (std::size_t r = 0; r < rows; ++r) w.add(batch_means(r, i));
        second_err[i] = std::sqrt(w.variance() / static_cast<double>(rows));
    }

    ChainDiagnostics diag;
    diag.monitored = monitored;
    for (const ChainOutput& o : outputs) {
        diag.accept_rate.push_back(o.accept_rate);
        diag.step_size.push_back(o.step);
    }
    for (std::size_t m = 0; m < monitored.size(); ++m) {
        std::vector<const Welford*> seqs;
        for (const ChainOutput& o : outputs) {
            seqs.push_back(&o.halves[2 * m]);
            seqs.push_back(&o.halves[2 * m + 1]);
        }
        const double r = split_rhat(seqs);
        diag.rhat.push_back(r);
        diag.max_rhat = std::max(diag.max_rhat, r);
    }
    diag.converged = diag.max_rhat <= cfg.rhat_threshold;
    if (cfg.enforce_convergence && !diag.converged) {
        throw NonConvergence("split R-hat " + std::to_string(diag.max_rhat) + " exceeds " +
                             std::to_string(cfg.rhat_threshold));
    }

    PosteriorMoments result(inst.eigvecs, std::move(second), std::move(second_err), std::move(batch_means),
                            std::move(diag));

    if (cfg.record_cross_moments) {
        Matrix cross(n, n);
        Matrix cross_err(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                Welford w;
                double sum = 0.0;
                for (std::size_t k = 0; k < cfg.n_chains; ++k) {
                    for (std::size_t b = 0; b < cfg.batches; ++b) {
                        const double s = outputs[k].cross_sums[(b * n + i) * n + j];
                        sum += s;
                        w.add(s / outputs[k].batch_counts[b]);
                    }
                }
                cross(i, j) = sum / total;
                cross_err(i, j) = std::sqrt(w.variance() / static_cast<double>(rows));
            }
        }
        result.cross_ = std::move(cross);
        result.cross_err_ = std::move(cross_err);
    }
    return result;
}

std::vector<double> small_n_second_moments(const PosteriorSpec& spec, std::size_t nodes_per_axis) {
    const std::size_t n = spec.instance.n;
    if (n > 4) throw DimensionTooLarge("dense quadrature is limited to n <= 4, got n = " + std::to_string(n));
    const EigenbasisForm form = eigenbasis_form(spec);

    constexpr std::size_t kPanelNodes = 16;
    std::size_t nodes = nodes_per_axis == 0 ? (n <= 3 ? 128 : 64) : nodes_per_axis;
    require(nodes >= 64, "need at least 64 nodes per axis");
    nodes = (nodes + kPanelNodes - 1) / kPanelNodes * kPanelNodes;

    const double radial = form.radial_mode();
    const double half_width = 8.0 * std::max(spec.sigma_p, std::sqrt(radial));
    const double top = *std::max_element(form.c.begin(), form.c.end());
    const double shift = (top > 0.0 && form.b > 0.0) ? top * top / (4.0 * form.b) : 0.0;

    // composite Gauss-Legendre on [0, half_width]
    using Rule = boost::math::quadrature::gauss<double, kPanelNodes>;
    const auto& abscissa = Rule::abscissa();
    const auto& weights = Rule::weights();
    const std::size_t panels = nodes / kPanelNodes;
    const double panel = half_width / static_cast<double>(panels);
    std::vector<double> sq;
    std::vector<double> wt;
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = (static_cast<double>(p) + 0.5) * panel;
        for (std::size_t k = 0; k < abscissa.size(); ++k) {
            for (double sign : {-1.0, 1.0}) {
                const double y = mid + sign * 0.5 * panel * abscissa[k];
                sq.push_back(y * y);
                wt.push_back(0.5 * panel * weights[k]);
            }
        }
    }
    const std::size_t m = sq.size();

    std::vector<std::size_t> idx(n, 0);
    double z = 0.0;
    std::vector<double> moments(n, 0.0);
    while (true) {
        double r = 0.0;
        double lin = 0.0;
        double w = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            r += sq[idx[i]];
            lin += form.c[i] * sq[idx[i]];
            w *= wt[idx[i]];
        }
        const double f = w * std::exp(lin - form.b * r * r - shift);
        z += f;
        for (std::size_t i = 0; i < n; ++i) moments[i] += f * sq[idx[i]];

        std::size_t axis = 0;
        while (axis < n && ++idx[axis] == m) idx[axis++] = 0;
        if (axis == n) break;
    }
    if (!(z > 0.0) || !std::isfinite(z)) throw QuadratureNonconvergence("posterior normalisation underflowed");
    for (double& v : moments) v /= z;
    return moments;
}

SymmetricMatrix small_n_quadrature(const PosteriorSpec& spec, std::size_t nodes_per_axis) {
    require(spec.instance.eigvecs.rows() == spec.instance.n, "quadrature needs the eigenvectors of Y");
    const std::vector<double> m = small_n_second_moments(spec, nodes_per_axis);
    return rotate_diagonal(spec.instance.eigvecs, m);
}

}  // namespace mismatchlab
