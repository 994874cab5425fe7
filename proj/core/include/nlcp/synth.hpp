#pragma once

#include "nlcp/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace nlcp {

// Per-sample aleatoric SD: u ~ Uniform[lo, hi], except with probability
// spike_prob an "easy" sample with u ~ Uniform(0, spike_hi].
struct UDist {
    double lo = 0.05;
    double hi = 1.0;
    double spike_prob = 0.02;
    double spike_hi = 0.01;
};

struct MuDist {
    double mean = 0.0;
    double sd = 1.0;
};

// Synthetic stand-in for a Gaussian-NLL regressor. The model is emulated as
// perfectly fit: y_hat = mu and u_hat = sqrt(u^2 + sigma_true^2) when trained
// on noisy labels, u_hat = u when `clean_trained` is set.
struct SyntheticConfig {
    std::size_t n = 2000;
    double sigma_true = 0.2;
    UDist u_dist;
    MuDist mu_dist;
    std::optional<double> round_unit;
    bool clean_trained = false;
    std::uint64_t seed = 1;
};

/// Throws InvalidArgument on n == 0 or any negative scale parameter.
void validate(const SyntheticConfig& config);

/// Deterministic, well-mixed child seed for stream `stream` of `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

/// Round half away from zero to a multiple of `unit`.
double round_to_unit(double value, double unit) noexcept;

std::vector<PredictionRecord> generate(const SyntheticConfig& config);

/// Monte Carlo estimate of the population (1 - alpha) quantile of the clean
/// score |y_clean - y_hat| / u_hat under `config` (linear interpolation
/// between order statistics). config.n is ignored; n_mc fresh draws are used.
double mc_oracle_q(const SyntheticConfig& config, double alpha, std::size_t n_mc);

} // namespace nlcp
