#pragma once

#include "nlcp/discretization.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nlcp {

enum class DeconvSolver {
    // Plain projected gradient with step 1 / Lipschitz bound.
    ProjectedGradient,
    // Monotone FISTA: accelerated, but a step is only accepted when it does
    // not increase the objective.
    Accelerated,
};

// Which columns of a row enter the data-fit term.
enum class MaskMode {
    // Columns holding at least one calibration sample.
    Occupied,
    // Row l keeps columns with M_q^n[l, c] > mask_epsilon.
    Threshold,
    // Every column.
    None,
};

struct DeconvConfig {
    double lambda = 0.01;
    double tol = 1e-8;
    int max_iters = 10000;
    DeconvSolver solver = DeconvSolver::Accelerated;
    MaskMode mask = MaskMode::Occupied;
    double mask_epsilon = 0.0; // MaskMode::Threshold only
    int power_iters = 50;
    double lipschitz_margin = 1.05;
    // Fill RowReport::objective_history (diagnostics and tests).
    bool record_objective = false;
};

void validate(const DeconvConfig& config);

struct RowReport {
    int iterations = 0;
    double objective = 0.0;
    double last_rel_change = 0.0;
    bool converged = true;
    // Halvings of the step after a rejected (objective-increasing) iterate.
    int backtracks = 0;
    // Objective at the start point and after every accepted iterate, when
    // DeconvConfig::record_objective is set.
    std::vector<double> objective_history;
};

struct RowSolution {
    std::vector<double> values;
    RowReport report;
};

/// "same"-size zero-padded convolution of x with the kernel, scaled by
/// delta_y so that it approximates the continuous convolution integral.
void convolve_same(std::span<const double> x, const NoiseKernel& kernel, std::span<double> out);

/// Upper bound on the Lipschitz constant of the gradient of
/// ||(k * v - m) . mask||^2 + lambda ||v||^2, from power iteration on the
/// masked normal operator.
double lipschitz_bound(const NoiseKernel& kernel, std::span<const std::uint8_t> mask,
                       const DeconvConfig& config);

struct RowProblem {
    std::span<const double> m_noisy;
    std::span<const std::uint8_t> col_mask;
    // Optional starting point (clipped into the box); zero when empty.
    std::span<const double> warm_start = {};
    // Precomputed lipschitz_bound() for this mask (or a superset mask).
    std::optional<double> lipschitz;
};

/// Minimizes ||(k * v - m) . mask||^2 + lambda ||v||^2 over
/// 0 <= v <= 1 / delta_y. Throws AllMasked, NonConvergence.
RowSolution solve_row(const RowProblem& problem, const NoiseKernel& kernel,
                      const DeconvConfig& config, double delta_y);

struct DeconvStats {
    std::size_t rows = 0;
    std::size_t zero_rows = 0;
    long long total_iterations = 0;
    int max_iterations = 0;
    std::size_t unconverged_rows = 0;
};

/// Row-by-row deconvolution of an empirical M_q^n. Row errors are rethrown as
/// DeconvFailure naming the row. `warm_start`, when given, must have the same
/// size and seeds each row.
EmpiricalMatrix solve(const EmpiricalMatrix& m_noisy, const NoiseKernel& kernel,
                      const DeconvConfig& config, DeconvStats* stats = nullptr,
                      const EmpiricalMatrix* warm_start = nullptr);

} // namespace nlcp
