#include "nlcp/synth.hpp"

#include "nlcp/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nlcp {

void validate(const SyntheticConfig& c) {
    if (c.n == 0) {
        throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
    }
    const bool scales_ok = c.sigma_true >= 0.0 && c.u_dist.lo >= 0.0 &&
                           c.u_dist.hi >= c.u_dist.lo && c.u_dist.spike_hi > 0.0 &&
                           c.u_dist.spike_prob >= 0.0 && c.u_dist.spike_prob <= 1.0 &&
                           c.mu_dist.sd >= 0.0 && std::isfinite(c.mu_dist.mean);
    if (!scales_ok) {
        throw Error(ErrorCode::InvalidArgument, "synthetic config has an invalid scale parameter");
    }
    if (c.round_unit && !(*c.round_unit > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "round_unit must be > 0");
    }
    if (c.clean_trained && c.u_dist.lo <= 0.0 && c.u_dist.spike_prob < 1.0) {
        throw Error(ErrorCode::InvalidArgument,
                    "clean-trained emulation needs u_dist.lo > 0 so that u_hat > 0");
    }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
    // splitmix64 finalizer over a golden-ratio stride.
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double round_to_unit(double value, double unit) noexcept {
    return std::round(value / unit) * unit;
}

namespace {

struct Draw {
    double mu;
    double u;
    double y_clean;
    double y_noisy;
};

// One draw per sample in a fixed order so that datasets are a pure function
// of the seed.
class Sampler {
public:
    explicit Sampler(const SyntheticConfig& c) : config_(c), engine_(c.seed) {}

    Draw next() {
        const auto& ud = config_.u_dist;
        const bool easy = unit_(engine_) < ud.spike_prob;
        double u;
        if (easy) {
            u = ud.spike_hi * (1.0 - unit_(engine_));  // (0, spike_hi]
        } else {
            u = ud.lo + (ud.hi - ud.lo) * unit_(engine_);
        }
        const double mu = config_.mu_dist.mean + config_.mu_dist.sd * normal_(engine_);
        const double y_clean = mu + u * normal_(engine_);
        const double y_noisy = y_clean + config_.sigma_true * normal_(engine_);
        return {mu, u, y_clean, y_noisy};
    }

private:
    const SyntheticConfig& config_;
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

double model_u_hat(const SyntheticConfig& c, double u) {
    return c.clean_trained ? u : std::sqrt(u * u + c.sigma_true * c.sigma_true);
}

} // namespace

std::vector<PredictionRecord> generate(const SyntheticConfig& config) {
    validate(config);
    Sampler sampler(config);
    std::vector<PredictionRecord> out;
    out.reserve(config.n);
    for (std::size_t i = 0; i < config.n; ++i) {
        const Draw d = sampler.next();
        PredictionRecord r;
        r.id = i;
        r.y_hat = d.mu;
        r.u_hat = model_u_hat(config, d.u);
        r.label_clean = d.y_clean;
        r.label_noisy = config.round_unit ? round_to_unit(d.y_noisy, *config.round_unit)
                                          : d.y_noisy;
        out.push_back(r);
    }
    return out;
}

double mc_oracle_q(const SyntheticConfig& config, double alpha, std::size_t n_mc) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    }
    if (n_mc < 2) {
        throw Error(ErrorCode::InvalidArgument, "n_mc must be >= 2");
    }
    SyntheticConfig c = config;
    c.n = n_mc;
    validate(c);
    Sampler sampler(c);
    std::vector<double> s(n_mc);
    for (auto& v : s) {
        const Draw d = sampler.next();
        v = std::abs(d.y_clean - d.mu) / model_u_hat(c, d.u);
    }
    const double pos = (1.0 - alpha) * static_cast<double>(n_mc - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(lo), s.end());
    const double a = s[lo];
    if (lo + 1 >= n_mc || frac == 0.0) {
        return a;
    }
    const double b = *std::min_element(s.begin() + static_cast<std::ptrdiff_t>(lo) + 1, s.end());
    return a + frac * (b - a);
}

} // namespace nlcp
