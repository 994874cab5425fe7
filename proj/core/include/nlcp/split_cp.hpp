#pragma once

#include "nlcp/synth.hpp"

#include <cstddef>
#include <cstdint>
#include <span>

namespace nlcp {

/// Rank of the split-conformal order statistic, ceil((n + 1)(1 - alpha)).
std::size_t conformal_rank(std::size_t n, double alpha);

/// Split conformal threshold: the k-th smallest score with
/// k = ceil((n + 1)(1 - alpha)), no interpolation. Throws
/// InsufficientCalibration when k > n.
double calibrate_split_cp(std::span<const double> scores, double alpha);

/// Draws a calibration set of n_cal and a test set of n_test records from
/// `generator` (seeds derived from `seed`), calibrates on clean labels and
/// returns the clean-label coverage on the test set.
double marginal_coverage_trial(std::size_t n_cal, std::size_t n_test, double alpha,
                               const SyntheticConfig& generator, std::uint64_t seed);

} // namespace nlcp
