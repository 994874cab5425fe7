#pragma once

#include "nlcp/deconv.hpp"
#include "nlcp/discretization.hpp"
#include "nlcp/model.hpp"

#include <span>
#include <vector>

namespace nlcp {

inline constexpr double kDefaultDeltaQ = 0.05;

/// Raw trace estimate sum_l M_c[l, l] * delta_y.
double trace_mass(const EmpiricalMatrix& m_clean, double delta_y);

/// trace_mass clamped to [0, 1].
double estimate_coverage(const EmpiricalMatrix& m_clean, double delta_y);

struct RobustConfig {
    double alpha = 0.1;
    double sigma = 0.0;
    double delta_q = kDefaultDeltaQ;
    double delta_y = kDefaultDeltaY;
    DeconvConfig deconv;
    // Seed each threshold's deconvolution with the previous solution.
    bool warm_start = true;
};

void validate(const RobustConfig& config);

struct IterationTrace {
    double q = 0.0;
    double coverage = 0.0;     // clamped, used for the stopping test
    double raw_coverage = 0.0; // unclamped trace
    long long solver_iterations = 0;
    int max_row_iterations = 0;
};

struct RobustCalibration {
    CalibrationResult result;
    double initial_q = 0.0;
    BinGrid grid;
    std::vector<IterationTrace> trace;
    // Set when q would drop to <= 0 before the coverage estimate fell below
    // 1 - alpha; result.q_hat is then the last positive threshold tried.
    bool hit_floor = false;
};

/// Noise-aware threshold search: start from split CP on the noisy labels and
/// lower q by delta_q until the deconvolved coverage estimate drops below
/// 1 - alpha; return the last q that still met it.
RobustCalibration calibrate_robust(std::span<const PredictionRecord> records,
                                   const RobustConfig& config);

} // namespace nlcp
