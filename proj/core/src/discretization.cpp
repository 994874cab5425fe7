#include "nlcp/discretization.hpp"

#include "nlcp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace nlcp {

namespace {

// Grid arithmetic tolerance in units of bins; keeps values like 0.8 / 0.01
// from snapping to the wrong integer.
constexpr double kSnap = 1e-9;

} // namespace

BinGrid build_grid(std::span<const double> noisy_labels, double sigma, double delta_y) {
    if (noisy_labels.empty()) {
        throw Error(ErrorCode::EmptyInput, "no labels to build a grid from");
    }
    if (!(delta_y > 0.0) || !std::isfinite(delta_y)) {
        throw Error(ErrorCode::InvalidArgument, "delta_y must be finite and > 0");
    }
    if (!(sigma >= 0.0)) {
        throw Error(ErrorCode::NegativeSigma, "sigma must be >= 0");
    }
    for (double y : noisy_labels) {
        if (!std::isfinite(y)) {
            throw Error(ErrorCode::NonFiniteLabel, "noisy label is not finite");
        }
    }
    const auto [lo_it, hi_it] = std::minmax_element(noisy_labels.begin(), noisy_labels.end());
    const double pad = std::max(4.0 * sigma, 5.0 * delta_y);
    const double first = std::floor((*lo_it - pad) / delta_y + kSnap);
    const double last = std::ceil((*hi_it + pad) / delta_y - kSnap);

    BinGrid grid;
    grid.origin = first * delta_y;
    grid.delta_y = delta_y;
    grid.num_bins = static_cast<std::size_t>(std::max(1.0, last - first));
    return grid;
}

std::size_t bin_index(const BinGrid& grid, double y) {
    if (!(y >= grid.origin && y <= grid.upper())) {
        throw Error(ErrorCode::OutOfRange,
                    "label " + std::to_string(y) + " outside grid [" +
                        std::to_string(grid.origin) + ", " + std::to_string(grid.upper()) + "]");
    }
    const auto last = static_cast<std::ptrdiff_t>(grid.num_bins) - 1;
    auto idx = static_cast<std::ptrdiff_t>(std::floor((y - grid.origin) / grid.delta_y));
    idx = std::clamp<std::ptrdiff_t>(idx, 0, last);
    // Division rounding can be off by one near an edge; settle on the bin whose
    // edges (as the grid computes them) bracket y.
    while (idx > 0 && y < grid.left_edge(static_cast<std::size_t>(idx))) {
        --idx;
    }
    while (idx < last && y >= grid.right_edge(static_cast<std::size_t>(idx))) {
        ++idx;
    }
    return static_cast<std::size_t>(idx);
}

BinRange bins_inside(const BinGrid& grid, const Interval& iv) noexcept {
    const auto n = static_cast<std::ptrdiff_t>(grid.num_bins);
    const auto edge = [&grid](std::ptrdiff_t i) {
        return grid.origin + static_cast<double>(i) * grid.delta_y;
    };
    // Smallest bin with left edge >= lo.
    auto first = static_cast<std::ptrdiff_t>(std::ceil((iv.lo - grid.origin) / grid.delta_y));
    first = std::clamp<std::ptrdiff_t>(first, 0, n);
    while (first > 0 && edge(first - 1) >= iv.lo) {
        --first;
    }
    while (first < n && edge(first) < iv.lo) {
        ++first;
    }
    // Largest bin with right edge <= hi.
    auto last = static_cast<std::ptrdiff_t>(std::floor((iv.hi - grid.origin) / grid.delta_y)) - 1;
    last = std::clamp<std::ptrdiff_t>(last, -1, n - 1);
    while (last + 1 < n && edge(last + 2) <= iv.hi) {
        ++last;
    }
    while (last >= 0 && edge(last + 1) > iv.hi) {
        --last;
    }
    return {first, last};
}

BinnedCalibration bin_noisy_labels(std::span<const PredictionRecord> records, const BinGrid& grid) {
    BinnedCalibration out;
    out.grid = grid;
    out.noisy_bin.reserve(records.size());
    out.column_count.assign(grid.num_bins, 0);
    for (const auto& r : records) {
        if (!r.label_noisy) {
            throw Error(ErrorCode::MissingLabel,
                        "record " + std::to_string(r.id) + " has no noisy label");
        }
        const std::size_t b = bin_index(grid, *r.label_noisy);
        out.noisy_bin.push_back(b);
        ++out.column_count[b];
    }
    return out;
}

EmpiricalMatrix estimate_m_noisy(double q, std::span<const PredictionRecord> records,
                                 const BinnedCalibration& binned) {
    if (!(q >= 0.0)) {
        throw Error(ErrorCode::NegativeThreshold, "threshold must be >= 0");
    }
    if (records.empty()) {
        throw Error(ErrorCode::EmptyInput, "no calibration records");
    }
    if (binned.noisy_bin.size() != records.size()) {
        throw Error(ErrorCode::InvalidArgument, "binning does not match the record list");
    }
    const BinGrid& grid = binned.grid;
    const std::size_t size = grid.num_bins;

    // Integer counts accumulated as per-column difference arrays down the rows,
    // so the result is exact and independent of record order.
    std::vector<std::int32_t> diff((size + 1) * size, 0);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const BinRange range = bins_inside(grid, interval(records[i], q));
        if (range.first > range.last) {
            continue;
        }
        const std::size_t col = binned.noisy_bin[i];
        diff[static_cast<std::size_t>(range.first) * size + col] += 1;
        diff[static_cast<std::size_t>(range.last + 1) * size + col] -= 1;
    }

    EmpiricalMatrix m(size);
    const double scale = 1.0 / (static_cast<double>(records.size()) * grid.delta_y);
    std::vector<std::int32_t> running(size, 0);
    for (std::size_t r = 0; r < size; ++r) {
        auto row = m.row(r);
        for (std::size_t c = 0; c < size; ++c) {
            running[c] += diff[r * size + c];
            row[c] = running[c] * scale;
        }
    }
    auto mask = m.col_mask();
    for (std::size_t c = 0; c < size; ++c) {
        mask[c] = binned.column_count[c] > 0 ? 1 : 0;
    }
    return m;
}

EmpiricalMatrix estimate_m_noisy(double q, std::span<const PredictionRecord> records,
                                 const BinGrid& grid) {
    return estimate_m_noisy(q, records, bin_noisy_labels(records, grid));
}

NoiseKernel make_kernel(std::vector<double> weights, double delta_y, double sigma) {
    if (weights.empty() || weights.size() % 2 == 0) {
        throw Error(ErrorCode::InvalidArgument, "kernel must have odd length");
    }
    if (!(delta_y > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "delta_y must be > 0");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double w = weights[i];
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error(ErrorCode::InvalidArgument, "kernel weights must be finite and >= 0");
        }
        if (w != weights[weights.size() - 1 - i]) {
            throw Error(ErrorCode::InvalidArgument, "kernel must be symmetric");
        }
        sum += w;
    }
    if (!(sum > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "kernel has zero mass");
    }
    const double scale = 1.0 / (sum * delta_y);
    for (auto& w : weights) {
        w *= scale;
    }
    return {std::move(weights), sigma, delta_y};
}

NoiseKernel discretize_kernel(double sigma, double delta_y) {
    if (!(sigma >= 0.0)) {
        throw Error(ErrorCode::NegativeSigma, "sigma must be >= 0");
    }
    if (!(delta_y > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "delta_y must be > 0");
    }
    if (sigma < 0.5 * delta_y) {
        return {{1.0 / delta_y}, sigma, delta_y};
    }
    const auto radius = static_cast<std::size_t>(std::ceil(4.0 * sigma / delta_y - kSnap));
    std::vector<double> w(2 * radius + 1);
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t j = 0; j <= radius; ++j) {
        const double x = static_cast<double>(j) * delta_y / sigma;
        const double v = norm * std::exp(-0.5 * x * x);
        w[radius + j] = v;
        w[radius - j] = v;
    }
    return make_kernel(std::move(w), delta_y, sigma);
}

} // namespace nlcp
