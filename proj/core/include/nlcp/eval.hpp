#pragma once

#include "nlcp/deconv.hpp"
#include "nlcp/model.hpp"
#include "nlcp/robust.hpp"
#include "nlcp/synth.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nlcp {

/// Fraction of records whose clean label lies in interval(record, q).
/// Throws MissingLabel.
double coverage(std::span<const PredictionRecord> records, double q);

/// Mean of 2 q u_hat.
double avg_length(std::span<const PredictionRecord> records, double q);

struct MetricSummary {
    double mean = 0.0;
    double sd = 0.0; // sample SD across trials, 0 for a single trial
};

MetricSummary summarize(std::span<const double> values);

struct TrialCell {
    double q_hat = 0.0;
    double avg_length = 0.0;
    double coverage = 0.0;
};

struct MethodSummary {
    Method method = Method::Oracle;
    std::vector<std::optional<TrialCell>> trials; // nullopt where the method failed
    std::vector<std::string> errors;
    MetricSummary q_hat;
    MetricSummary avg_length;
    MetricSummary coverage;

    std::size_t successes() const noexcept;
};

struct ComparisonConfig {
    double alpha = 0.1;
    // Fixed kernel width; nullopt means estimate it per trial from the
    // calibration u_hat values.
    std::optional<double> sigma = 0.2;
    double estimate_fraction = 0.01;
    int trials = 6;
    std::size_t n_cal = 2000;
    std::size_t n_test = 10000;
    std::uint64_t base_seed = 1;
    // Template for per-trial generation (n and seed are overwritten).
    SyntheticConfig generator;
    double delta_q = kDefaultDeltaQ;
    double delta_y = kDefaultDeltaY;
    DeconvConfig deconv;
};

struct ComparisonReport {
    ComparisonConfig config;
    std::array<MethodSummary, 3> methods; // oracle, noisy, robust
    std::vector<double> sigma_per_trial;
    MetricSummary sigma_used;

    const MethodSummary& at(Method m) const { return methods[static_cast<std::size_t>(m)]; }
};

/// Fresh synthetic calibration and test sets per trial (seeds derived from
/// base_seed and the trial index), then Oracle / Noisy / Robust on each.
ComparisonReport run_comparison(const ComparisonConfig& config);

/// Same comparison on a fixed pool of records: each trial shuffles the pool
/// and splits off n_cal calibration records, using the rest as test set.
ComparisonReport run_comparison_resplit(std::span<const PredictionRecord> pool,
                                        const ComparisonConfig& config);

/// One trial on given data; exposed for the resplit path and for tests.
struct TrialOutcome {
    std::array<std::optional<TrialCell>, 3> cells;
    std::array<std::string, 3> errors;
    double sigma_used = 0.0;
};
TrialOutcome run_trial(std::span<const PredictionRecord> cal, std::span<const PredictionRecord> test,
                       const ComparisonConfig& config);

} // namespace nlcp
