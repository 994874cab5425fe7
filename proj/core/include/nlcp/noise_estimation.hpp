#pragma once

#include <cstddef>
#include <span>

namespace nlcp {

inline constexpr double kDefaultNoiseFraction = 0.01;

struct SigmaEstimate {
    double sigma_hat = 0.0;
    std::size_t n_used = 0;
};

/// Label-noise SD from a model trained on noisy labels: sqrt of the mean of
/// the ceil(fraction * n) smallest u_hat^2. Relies on some "easy" inputs whose
/// true posterior variance is ~0, so that u_hat^2 ~ sigma^2 there.
/// Throws EmptyInput, InvalidArgument (fraction outside (0, 1], u_hat <= 0).
SigmaEstimate estimate_sigma(std::span<const double> u_hat_values,
                             double fraction = kDefaultNoiseFraction);

} // namespace nlcp
