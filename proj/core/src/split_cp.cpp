#include "nlcp/split_cp.hpp"

#include "nlcp/error.hpp"
#include "nlcp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace nlcp {

std::size_t conformal_rank(std::size_t n, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    }
    // (n + 1)(1 - alpha) is frequently an integer in exact arithmetic (n = 19,
    // alpha = 0.1) but lands a hair above it in floating point; shave the
    // rounding noise before taking the ceiling.
    const double target = static_cast<double>(n + 1) * (1.0 - alpha);
    const double rounded = std::round(target);
    const double k = std::abs(target - rounded) <= 1e-9 * std::max(1.0, target)
                         ? rounded
                         : std::ceil(target);
    return static_cast<std::size_t>(std::max(1.0, k));
}

double calibrate_split_cp(std::span<const double> scores, double alpha) {
    if (scores.empty()) {
        throw Error(ErrorCode::EmptyInput, "no calibration scores");
    }
    for (double s : scores) {
        if (!std::isfinite(s) || s < 0.0) {
            throw Error(ErrorCode::InvalidArgument, "scores must be finite and >= 0");
        }
    }
    const std::size_t n = scores.size();
    const std::size_t k = conformal_rank(n, alpha);
    if (k > n) {
        throw Error(ErrorCode::InsufficientCalibration,
                    "need at least " + std::to_string(k) + " calibration scores for alpha=" +
                        std::to_string(alpha) + ", got " + std::to_string(n));
    }
    std::vector<double> sorted(scores.begin(), scores.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     sorted.end());
    return sorted[k - 1];
}

double marginal_coverage_trial(std::size_t n_cal, std::size_t n_test, double alpha,
                               const SyntheticConfig& generator, std::uint64_t seed) {
    SyntheticConfig cal_cfg = generator;
    cal_cfg.n = n_cal;
    cal_cfg.seed = derive_seed(seed, 0);
    SyntheticConfig test_cfg = generator;
    test_cfg.n = n_test;
    test_cfg.seed = derive_seed(seed, 1);

    const auto cal = generate(cal_cfg);
    const auto test = generate(test_cfg);
    const double q = calibrate_split_cp(scores(cal, LabelField::Clean), alpha);
    return coverage(test, q);
}

} // namespace nlcp
