#include "nlcp/noise_estimation.hpp"

#include "nlcp/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nlcp {

SigmaEstimate estimate_sigma(std::span<const double> u_hat_values, double fraction) {
    if (u_hat_values.empty()) {
        throw Error(ErrorCode::EmptyInput, "no u_hat values");
    }
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "fraction must lie in (0, 1]");
    }
    std::vector<double> var;
    var.reserve(u_hat_values.size());
    for (double u : u_hat_values) {
        if (!std::isfinite(u) || u <= 0.0) {
            throw Error(ErrorCode::InvalidArgument, "u_hat values must be finite and > 0");
        }
        var.push_back(u * u);
    }
    const auto n = var.size();
    const auto k = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)), 1, n);
    std::nth_element(var.begin(), var.begin() + static_cast<std::ptrdiff_t>(k - 1), var.end());
    // Sum the k smallest in sorted order so the result does not depend on how
    // nth_element left the prefix.
    std::sort(var.begin(), var.begin() + static_cast<std::ptrdiff_t>(k));
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sum += var[i];
    }
    return {std::sqrt(sum / static_cast<double>(k)), k};
}

} // namespace nlcp
