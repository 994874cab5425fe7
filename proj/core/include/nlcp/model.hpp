#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nlcp {

enum class LabelField { Clean, Noisy };

// One calibration/test sample as seen by the calibration methods. Everything
// is expressed in normalized label units.
struct PredictionRecord {
    std::uint64_t id = 0;
    double y_hat = 0.0;
    double u_hat = 1.0;
    std::optional<double> label_clean;
    std::optional<double> label_noisy;

    const std::optional<double>& label(LabelField field) const noexcept {
        return field == LabelField::Clean ? label_clean : label_noisy;
    }
};

// Throws InvalidRecord unless u_hat is finite and > 0, y_hat and any present
// label are finite, and at least one label is present.
void validate(const PredictionRecord& record);
void validate(std::span<const PredictionRecord> records);

// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const noexcept { return hi - lo; }
};

enum class Method { Oracle, Noisy, Robust };

std::string to_string(Method method);
std::optional<Method> parse_method(std::string_view text) noexcept;

struct CalibrationResult {
    Method method = Method::Oracle;
    double q_hat = 0.0;
    int iterations = 0;
    std::optional<double> estimated_coverage;
};

/// Nonconformity score |label - y_hat| / u_hat. Throws MissingLabel when the
/// requested label is absent.
double score(const PredictionRecord& record, LabelField field);
double score(const PredictionRecord& record, double label) noexcept;

std::vector<double> scores(std::span<const PredictionRecord> records, LabelField field);

/// [y_hat - q u_hat, y_hat + q u_hat]. Throws NegativeThreshold for q < 0.
Interval interval(const PredictionRecord& record, double q);

bool contains(const Interval& iv, double y) noexcept;

} // namespace nlcp
