#pragma once

#include "nlcp/model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nlcp {

inline constexpr double kDefaultDeltaY = 0.01;

// Uniform partition of [origin, origin + num_bins * delta_y) into half-open
// bins B_l = [origin + l * delta_y, origin + (l + 1) * delta_y).
struct BinGrid {
    double origin = 0.0;
    double delta_y = kDefaultDeltaY;
    std::size_t num_bins = 0;

    double left_edge(std::size_t bin) const noexcept {
        return origin + static_cast<double>(bin) * delta_y;
    }
    double right_edge(std::size_t bin) const noexcept { return left_edge(bin + 1); }
    double upper() const noexcept { return left_edge(num_bins); }
};

/// Grid covering [min y - pad, max y + pad], pad = max(4 sigma, 5 delta_y),
/// with both ends snapped outward to whole bins.
BinGrid build_grid(std::span<const double> noisy_labels, double sigma, double delta_y);

/// floor((y - origin) / delta_y); y == upper() maps to the last bin.
/// Throws OutOfRange outside [origin, upper()].
std::size_t bin_index(const BinGrid& grid, double y);

// Square matrix in row-major order. Row l indexes the candidate-label bin,
// column the (noisy or clean) label bin. Values are densities (1 / label
// unit); col_mask marks columns that hold at least one calibration sample.
class EmpiricalMatrix {
public:
    EmpiricalMatrix() = default;
    explicit EmpiricalMatrix(std::size_t size)
        : size_(size), values_(size * size, 0.0), col_mask_(size, 0) {}

    std::size_t size() const noexcept { return size_; }

    double& operator()(std::size_t row, std::size_t col) noexcept {
        return values_[row * size_ + col];
    }
    double operator()(std::size_t row, std::size_t col) const noexcept {
        return values_[row * size_ + col];
    }

    std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * size_, size_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {values_.data() + r * size_, size_};
    }

    std::span<std::uint8_t> col_mask() noexcept { return col_mask_; }
    std::span<const std::uint8_t> col_mask() const noexcept { return col_mask_; }

    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t size_ = 0;
    std::vector<double> values_;
    std::vector<std::uint8_t> col_mask_;
};

/// Noisy-label label assignment, computed once per calibration run and reused
/// across thresholds.
struct BinnedCalibration {
    BinGrid grid;
    std::vector<std::size_t> noisy_bin;      // per record
    std::vector<std::uint32_t> column_count; // samples per column
};

/// Throws MissingLabel if a record has no noisy label, OutOfRange if a noisy
/// label falls outside the grid.
BinnedCalibration bin_noisy_labels(std::span<const PredictionRecord> records, const BinGrid& grid);

/// Empirical M_q^n: entry [l, c] is the number of records with noisy label in
/// B_c whose interval C_q fully contains B_l, divided by n * delta_y.
EmpiricalMatrix estimate_m_noisy(double q, std::span<const PredictionRecord> records,
                                 const BinGrid& grid);
EmpiricalMatrix estimate_m_noisy(double q, std::span<const PredictionRecord> records,
                                 const BinnedCalibration& binned);

/// Bin range [first, last] whose closures lie inside iv; empty (first > last)
/// when no bin fits.
struct BinRange {
    std::ptrdiff_t first;
    std::ptrdiff_t last;
};
BinRange bins_inside(const BinGrid& grid, const Interval& iv) noexcept;

// Discretized symmetric noise kernel with unit mass: sum(weights) * delta_y == 1.
struct NoiseKernel {
    std::vector<double> weights;
    double sigma = 0.0;
    double delta_y = kDefaultDeltaY;

    std::size_t radius() const noexcept { return weights.size() / 2; }
};

/// Gaussian density at offsets {-R..R} * delta_y with R = ceil(4 sigma /
/// delta_y), renormalized to unit mass. sigma < delta_y / 2 gives the discrete
/// delta. Throws NegativeSigma.
NoiseKernel discretize_kernel(double sigma, double delta_y);

/// Accepts any odd-length, nonnegative, symmetric vector; rescales it to unit
/// mass. Throws InvalidArgument otherwise.
NoiseKernel make_kernel(std::vector<double> weights, double delta_y, double sigma = 0.0);

} // namespace nlcp
