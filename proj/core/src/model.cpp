#include "nlcp/model.hpp"

#include "nlcp/error.hpp"

#include <cmath>
#include <string>

namespace nlcp {

void validate(const PredictionRecord& r) {
    const auto where = [&r] { return "record " + std::to_string(r.id) + ": "; };
    if (!std::isfinite(r.y_hat)) {
        throw Error(ErrorCode::InvalidRecord, where() + "y_hat is not finite");
    }
    if (!std::isfinite(r.u_hat) || r.u_hat <= 0.0) {
        throw Error(ErrorCode::InvalidRecord, where() + "u_hat must be finite and > 0");
    }
    if (!r.label_clean && !r.label_noisy) {
        throw Error(ErrorCode::InvalidRecord, where() + "no label present");
    }
    if ((r.label_clean && !std::isfinite(*r.label_clean)) ||
        (r.label_noisy && !std::isfinite(*r.label_noisy))) {
        throw Error(ErrorCode::InvalidRecord, where() + "label is not finite");
    }
}

void validate(std::span<const PredictionRecord> records) {
    for (const auto& r : records) {
        validate(r);
    }
}

std::string to_string(Method method) {
    switch (method) {
    case Method::Oracle: return "oracle";
    case Method::Noisy: return "noisy";
    case Method::Robust: return "robust";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view text) noexcept {
    if (text == "oracle") return Method::Oracle;
    if (text == "noisy") return Method::Noisy;
    if (text == "robust") return Method::Robust;
    return std::nullopt;
}

double score(const PredictionRecord& record, double label) noexcept {
    return std::abs(label - record.y_hat) / record.u_hat;
}

double score(const PredictionRecord& record, LabelField field) {
    const auto& label = record.label(field);
    if (!label) {
        throw Error(ErrorCode::MissingLabel,
                    "record " + std::to_string(record.id) + " has no " +
                        (field == LabelField::Clean ? "clean" : "noisy") + " label");
    }
    return score(record, *label);
}

std::vector<double> scores(std::span<const PredictionRecord> records, LabelField field) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        out.push_back(score(r, field));
    }
    return out;
}

Interval interval(const PredictionRecord& record, double q) {
    if (!(q >= 0.0)) {
        throw Error(ErrorCode::NegativeThreshold, "threshold must be >= 0");
    }
    const double half = q * record.u_hat;
    return {record.y_hat - half, record.y_hat + half};
}

bool contains(const Interval& iv, double y) noexcept {
    return iv.lo <= y && y <= iv.hi;
}

} // namespace nlcp
