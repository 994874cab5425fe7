#include "nlcp/robust.hpp"

#include "nlcp/error.hpp"
#include "nlcp/split_cp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace nlcp {

double trace_mass(const EmpiricalMatrix& m_clean, double delta_y) {
    double sum = 0.0;
    for (std::size_t l = 0; l < m_clean.size(); ++l) {
        sum += m_clean(l, l);
    }
    return sum * delta_y;
}

double estimate_coverage(const EmpiricalMatrix& m_clean, double delta_y) {
    return std::clamp(trace_mass(m_clean, delta_y), 0.0, 1.0);
}

void validate(const RobustConfig& c) {
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    }
    if (!(c.sigma >= 0.0)) {
        throw Error(ErrorCode::NegativeSigma, "sigma must be >= 0");
    }
    if (!(c.delta_q > 0.0) || !(c.delta_y > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "delta_q and delta_y must be > 0");
    }
    validate(c.deconv);
}

namespace {

class CoverageEstimator {
public:
    CoverageEstimator(std::span<const PredictionRecord> records, const RobustConfig& config,
                      const BinGrid& grid)
        : records_(records),
          config_(config),
          binned_(bin_noisy_labels(records, grid)),
          kernel_(discretize_kernel(config.sigma, config.delta_y)) {}

    IterationTrace evaluate(double q) {
        const EmpiricalMatrix m_noisy = estimate_m_noisy(q, records_, binned_);
        DeconvStats stats;
        const EmpiricalMatrix* warm = config_.warm_start && previous_ ? &*previous_ : nullptr;
        EmpiricalMatrix m_clean = solve(m_noisy, kernel_, config_.deconv, &stats, warm);

        IterationTrace t;
        t.q = q;
        t.raw_coverage = trace_mass(m_clean, config_.delta_y);
        t.coverage = std::clamp(t.raw_coverage, 0.0, 1.0);
        t.solver_iterations = stats.total_iterations;
        t.max_row_iterations = stats.max_iterations;
        previous_ = std::move(m_clean);
        return t;
    }

private:
    std::span<const PredictionRecord> records_;
    const RobustConfig& config_;
    BinnedCalibration binned_;
    NoiseKernel kernel_;
    std::optional<EmpiricalMatrix> previous_;
};

} // namespace

RobustCalibration calibrate_robust(std::span<const PredictionRecord> records,
                                   const RobustConfig& config) {
    validate(config);
    if (records.empty()) {
        throw Error(ErrorCode::EmptyInput, "no calibration records");
    }
    validate(records);

    RobustCalibration out;
    out.result.method = Method::Robust;
    out.initial_q = calibrate_split_cp(scores(records, LabelField::Noisy), config.alpha);

    std::vector<double> noisy;
    noisy.reserve(records.size());
    for (const auto& r : records) {
        noisy.push_back(*r.label_noisy);
    }
    out.grid = build_grid(noisy, config.sigma, config.delta_y);
    CoverageEstimator estimator(records, config, out.grid);

    const double target = 1.0 - config.alpha;
    double q = out.initial_q;
    std::optional<double> coverage_at_q;
    for (;;) {
        const double next = q - config.delta_q;
        if (next <= 0.0) {
            out.hit_floor = true;
            break;
        }
        const IterationTrace t = estimator.evaluate(next);
        out.trace.push_back(t);
        if (t.coverage < target) {
            break;
        }
        q = next;
        coverage_at_q = t.coverage;
    }

    if (!coverage_at_q) {
        // Stopped at the initial threshold; report its coverage estimate too.
        coverage_at_q = estimator.evaluate(q).coverage;
    }
    out.result.q_hat = q;
    out.result.iterations = static_cast<int>(out.trace.size());
    out.result.estimated_coverage = coverage_at_q;
    return out;
}

} // namespace nlcp
