#include "nlcp/deconv.hpp"

#include "nlcp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nlcp {

void validate(const DeconvConfig& c) {
    if (!(c.lambda >= 0.0) || !std::isfinite(c.lambda)) {
        throw Error(ErrorCode::InvalidArgument, "lambda must be finite and >= 0");
    }
    if (!(c.tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "tol must be > 0");
    }
    if (c.max_iters < 1 || c.power_iters < 1) {
        throw Error(ErrorCode::InvalidArgument, "iteration limits must be >= 1");
    }
    if (!(c.lipschitz_margin >= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "lipschitz_margin must be >= 1");
    }
    if (!(c.mask_epsilon >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "mask epsilon must be >= 0");
    }
}

#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__) && defined(__linux__)
#define NLCP_VECTOR_CLONES __attribute__((target_clones("avx2", "default")))
#else
#define NLCP_VECTOR_CLONES
#endif

NLCP_VECTOR_CLONES
void convolve_same(std::span<const double> x, const NoiseKernel& kernel, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    const auto radius = static_cast<std::ptrdiff_t>(kernel.radius());
    const double scale = kernel.delta_y;
    double* o = out.data();
    const double* in = x.data();
    std::fill(out.begin(), out.end(), 0.0);
    // out[i] = dy * sum_t w[t] x[i + t - R]; accumulated one tap at a time so
    // the inner loop is a contiguous axpy.
    for (std::ptrdiff_t t = 0; t <= 2 * radius; ++t) {
        const std::ptrdiff_t off = t - radius;
        const double w = scale * kernel.weights[static_cast<std::size_t>(t)];
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -off);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n, n - off);
        for (std::ptrdiff_t i = lo; i < hi; ++i) {
            o[i] += w * in[i + off];
        }
    }
}

namespace {

// The masked convolution normal operator A^T D A restricted to a window of
// the row. A is self-adjoint because the kernel is symmetric.
class MaskedOperator {
public:
    MaskedOperator(const NoiseKernel& kernel, std::span<const std::uint8_t> mask)
        : kernel_(kernel), mask_(mask), tmp_(mask.size()) {}

    std::size_t size() const noexcept { return mask_.size(); }

    void forward(std::span<const double> v, std::span<double> out) const {
        convolve_same(v, kernel_, out);
    }

    void normal(std::span<const double> v, std::span<double> out) {
        convolve_same(v, kernel_, tmp_);
        for (std::size_t i = 0; i < tmp_.size(); ++i) {
            tmp_[i] = mask_[i] ? tmp_[i] : 0.0;
        }
        convolve_same(tmp_, kernel_, out);
    }

private:
    const NoiseKernel& kernel_;
    std::span<const std::uint8_t> mask_;
    std::vector<double> tmp_;
};

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

struct Window {
    std::size_t lo = 0;
    std::size_t hi = 0; // exclusive
    bool empty() const noexcept { return hi <= lo; }
};

// Columns that carry nonzero unmasked data. Outside [first - R, last + R] the
// optimum is exactly zero: such entries only feed unmasked columns whose
// target is zero, so any positive value strictly increases both terms.
Window data_window(std::span<const double> m, std::span<const std::uint8_t> mask, std::size_t radius) {
    std::size_t first = m.size();
    std::size_t last = 0;
    for (std::size_t c = 0; c < m.size(); ++c) {
        if (mask[c] && m[c] != 0.0) {
            first = std::min(first, c);
            last = c;
        }
    }
    if (first == m.size()) {
        return {};
    }
    return {first > radius ? first - radius : 0, std::min(m.size(), last + radius + 1)};
}

// f(v) = sum_mask (Av - m)^2 + lambda |v|^2; leaves the masked residual in r.
double objective(std::span<const double> av, std::span<const double> m,
                 std::span<const std::uint8_t> mask, std::span<const double> v, double lambda,
                 std::span<double> r) {
    double fit = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) {
        const double d = mask[i] ? av[i] - m[i] : 0.0;
        r[i] = d;
        fit += d * d;
    }
    return fit + lambda * dot(v, v);
}

RowSolution solve_window(std::span<const double> m, std::span<const std::uint8_t> mask,
                         std::span<const double> start, const NoiseKernel& kernel,
                         const DeconvConfig& config, double upper, double lipschitz) {
    const std::size_t n = m.size();
    const double lambda = config.lambda;
    MaskedOperator op(kernel, mask);

    std::vector<double> x(n), ax(n), r(n), grad(n), z(n), az(n), rz(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = start.empty() ? 0.0 : std::clamp(start[i], 0.0, upper);
    }
    op.forward(x, ax);
    double fx = objective(ax, m, mask, x, lambda, r);

    // Accelerated-only state: extrapolated point y and its image A y.
    std::vector<double> y, ay, ry, x_prev, ax_prev;
    const bool accelerated = config.solver == DeconvSolver::Accelerated;
    double t = 1.0;
    bool restarted = true;
    if (accelerated) {
        y = x;
        ay = ax;
        ry = r;
        x_prev = x;
        ax_prev = ax;
    }

    // Changes are measured against max(f, floor) so that rows whose optimum is
    // an exact fit (f -> 0) still terminate.
    double data_energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        data_energy += mask[i] ? m[i] * m[i] : 0.0;
    }
    const double floor = 1e-14 * data_energy;
    constexpr double kStall = 1e-12;

    double step_bound = lipschitz;
    RowReport report;
    report.converged = false;
    if (config.record_objective) {
        report.objective_history.push_back(fx);
    }
    int it = 0;
    while (it < config.max_iters) {
        ++it;
        const auto& base = accelerated ? y : x;
        const auto& base_r = accelerated ? ry : r;
        convolve_same(base_r, kernel, grad);
        for (std::size_t i = 0; i < n; ++i) {
            const double g = 2.0 * (grad[i] + lambda * base[i]);
            z[i] = std::clamp(base[i] - g / step_bound, 0.0, upper);
        }
        op.forward(z, az);
        const double fz = objective(az, m, mask, z, lambda, rz);

        if (!accelerated) {
            if (fz > fx) {
                if (fz - fx <= kStall * std::max(fx, floor)) {
                    // Rounding level: no further progress is possible.
                    report.converged = true;
                    break;
                }
                // Power iteration underestimated the curvature; shrink the step.
                step_bound *= 2.0;
                ++report.backtracks;
                continue;
            }
            const double rel = fx > 0.0 ? (fx - fz) / std::max(fx, floor) : 0.0;
            x.swap(z);
            ax.swap(az);
            r.swap(rz);
            fx = fz;
            if (config.record_objective) {
                report.objective_history.push_back(fx);
            }
            report.last_rel_change = rel;
            if (rel < config.tol) {
                report.converged = true;
                break;
            }
            continue;
        }

        // Monotone FISTA.
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const bool accept = fz <= fx;
        if (!accept && restarted && fz - fx <= kStall * std::max(fx, floor)) {
            report.converged = true;
            break;
        }
        restarted = false;
        const double rel = accept && fx > 0.0 ? (fx - fz) / std::max(fx, floor) : 0.0;
        x_prev.swap(x);
        ax_prev.swap(ax);
        if (accept) {
            x = z;
            ax = az;
            r = rz;
            fx = fz;
            if (config.record_objective) {
                report.objective_history.push_back(fx);
            }
        } else {
            x = x_prev;
            ax = ax_prev;
        }
        const double a = t / t_next;
        const double b = (t - 1.0) / t_next;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = x[i] + a * (z[i] - x[i]) + b * (x[i] - x_prev[i]);
            ay[i] = ax[i] + a * (az[i] - ax[i]) + b * (ax[i] - ax_prev[i]);
            ry[i] = mask[i] ? ay[i] - m[i] : 0.0;
        }
        t = t_next;
        report.last_rel_change = rel;
        if (accept && rel < config.tol) {
            report.converged = true;
            break;
        }
        if (!accept) {
            // Restart momentum from the current iterate.
            restarted = true;
            t = 1.0;
            y = x;
            ay = ax;
            for (std::size_t i = 0; i < n; ++i) {
                ry[i] = mask[i] ? ay[i] - m[i] : 0.0;
            }
        }
    }
    report.iterations = it;
    report.objective = fx;
    return {std::move(x), report};
}

} // namespace

double lipschitz_bound(const NoiseKernel& kernel, std::span<const std::uint8_t> mask,
                       const DeconvConfig& config) {
    MaskedOperator op(kernel, mask);
    const std::size_t n = op.size();
    std::vector<double> v(n, 1.0), hv(n);
    double rho = 0.0;
    for (int k = 0; k < config.power_iters; ++k) {
        op.normal(v, hv);
        const double norm = std::sqrt(dot(hv, hv));
        if (norm == 0.0) {
            rho = 0.0;
            break;
        }
        rho = dot(v, hv) / dot(v, v);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = hv[i] / norm;
        }
    }
    return 2.0 * config.lipschitz_margin * (rho + config.lambda);
}

RowSolution solve_row(const RowProblem& p, const NoiseKernel& kernel, const DeconvConfig& config,
                      double delta_y) {
    validate(config);
    const std::size_t n = p.m_noisy.size();
    if (p.col_mask.size() != n || (!p.warm_start.empty() && p.warm_start.size() != n)) {
        throw Error(ErrorCode::InvalidArgument, "row, mask and warm start lengths differ");
    }
    if (kernel.delta_y != delta_y) {
        throw Error(ErrorCode::InvalidArgument, "kernel and grid disagree on delta_y");
    }
    for (double v : p.m_noisy) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::InvalidArgument, "row contains a non-finite value");
        }
    }
    if (std::none_of(p.col_mask.begin(), p.col_mask.end(), [](std::uint8_t b) { return b != 0; })) {
        throw Error(ErrorCode::AllMasked, "every column is masked");
    }

    RowSolution out;
    out.values.assign(n, 0.0);
    const Window w = data_window(p.m_noisy, p.col_mask, kernel.radius());
    if (w.empty()) {
        return out;
    }
    const double lipschitz = p.lipschitz ? *p.lipschitz : lipschitz_bound(kernel, p.col_mask, config);
    const std::size_t len = w.hi - w.lo;
    const auto start = p.warm_start.empty() ? std::span<const double>{}
                                            : p.warm_start.subspan(w.lo, len);
    RowSolution sub = solve_window(p.m_noisy.subspan(w.lo, len), p.col_mask.subspan(w.lo, len),
                                   start, kernel, config, 1.0 / delta_y, lipschitz);
    if (!sub.report.converged && sub.report.last_rel_change > 100.0 * config.tol) {
        throw Error(ErrorCode::NonConvergence,
                    "projected gradient did not converge in " + std::to_string(config.max_iters) +
                        " iterations (relative change " + std::to_string(sub.report.last_rel_change) +
                        ")");
    }
    std::copy(sub.values.begin(), sub.values.end(), out.values.begin() + static_cast<std::ptrdiff_t>(w.lo));
    out.report = sub.report;
    return out;
}

EmpiricalMatrix solve(const EmpiricalMatrix& m_noisy, const NoiseKernel& kernel,
                      const DeconvConfig& config, DeconvStats* stats,
                      const EmpiricalMatrix* warm_start) {
    validate(config);
    const std::size_t size = m_noisy.size();
    if (warm_start && warm_start->size() != size) {
        throw Error(ErrorCode::InvalidArgument, "warm start size mismatch");
    }
    const auto col_mask = m_noisy.col_mask();
    if (std::none_of(col_mask.begin(), col_mask.end(), [](std::uint8_t b) { return b != 0; })) {
        throw Error(ErrorCode::AllMasked, "every column is masked");
    }

    // Per-row threshold masks are subsets of the all-ones mask, whose normal
    // operator therefore bounds theirs.
    const std::vector<std::uint8_t> full(size, 1);
    const bool occupied = config.mask == MaskMode::Occupied;
    const double lipschitz =
        lipschitz_bound(kernel, occupied ? col_mask : std::span<const std::uint8_t>(full), config);

    EmpiricalMatrix out(size);
    std::copy(col_mask.begin(), col_mask.end(), out.col_mask().begin());
    DeconvStats local;
    std::vector<std::uint8_t> row_mask(size);
    for (std::size_t r = 0; r < size; ++r) {
        const auto row = m_noisy.row(r);
        std::span<const std::uint8_t> mask = col_mask;
        if (config.mask == MaskMode::Threshold) {
            for (std::size_t c = 0; c < size; ++c) {
                row_mask[c] = row[c] > config.mask_epsilon ? 1 : 0;
            }
            mask = row_mask;
        } else if (config.mask == MaskMode::None) {
            mask = full;
        }
        ++local.rows;
        if (data_window(row, mask, kernel.radius()).empty()) {
            ++local.zero_rows;
            continue;
        }
        RowProblem problem{row, mask, {}, lipschitz};
        if (warm_start) {
            problem.warm_start = warm_start->row(r);
        }
        RowSolution sol;
        try {
            sol = solve_row(problem, kernel, config, kernel.delta_y);
        } catch (const Error& e) {
            throw Error(ErrorCode::DeconvFailure, "row " + std::to_string(r) + ": " + e.what());
        }
        std::copy(sol.values.begin(), sol.values.end(), out.row(r).begin());
        local.total_iterations += sol.report.iterations;
        local.max_iterations = std::max(local.max_iterations, sol.report.iterations);
        if (!sol.report.converged) {
            ++local.unconverged_rows;
        }
    }
    if (stats) {
        *stats = local;
    }
    return out;
}

} // namespace nlcp
