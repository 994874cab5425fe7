#include "cli/json_output.hpp"

#include "nlcp/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nlcp::cli {

using nlohmann::json;

double round_sig6(double value) {
    if (!std::isfinite(value) || value == 0.0) {
        return value == 0.0 ? 0.0 : value;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return std::strtod(buf, nullptr);
}

namespace {

json metric(const MetricSummary& m) {
    return {{"mean", round_sig6(m.mean)}, {"sd", round_sig6(m.sd)}};
}

json optional_number(const std::optional<double>& v) {
    return v ? json(round_sig6(*v)) : json(nullptr);
}

const char* solver_name(DeconvSolver s) {
    return s == DeconvSolver::Accelerated ? "accelerated" : "pgd";
}

const char* mask_name(MaskMode m) {
    switch (m) {
    case MaskMode::Occupied: return "occupied";
    case MaskMode::Threshold: return "threshold";
    case MaskMode::None: return "none";
    }
    return "unknown";
}

json deconv_json(const DeconvConfig& c) {
    json j = {{"lambda", round_sig6(c.lambda)},
              {"tol", round_sig6(c.tol)},
              {"max_iters", c.max_iters},
              {"solver", solver_name(c.solver)},
              {"mask", mask_name(c.mask)}};
    if (c.mask == MaskMode::Threshold) {
        j["mask_epsilon"] = round_sig6(c.mask_epsilon);
    }
    return j;
}

} // namespace

json to_json(const CalibrationResult& r) {
    return {{"method", std::string(to_string(r.method))},
            {"q_hat", round_sig6(r.q_hat)},
            {"iterations", r.iterations},
            {"estimated_coverage", optional_number(r.estimated_coverage)}};
}

json to_json(const RobustCalibration& robust) {
    json j = to_json(robust.result);
    j["initial_q"] = round_sig6(robust.initial_q);
    j["hit_floor"] = robust.hit_floor;
    j["grid"] = {{"origin", round_sig6(robust.grid.origin)},
                 {"delta_y", round_sig6(robust.grid.delta_y)},
                 {"num_bins", robust.grid.num_bins}};
    json trace = json::array();
    for (const auto& t : robust.trace) {
        trace.push_back({{"q", round_sig6(t.q)},
                         {"coverage", round_sig6(t.coverage)},
                         {"raw_coverage", round_sig6(t.raw_coverage)},
                         {"solver_iterations", t.solver_iterations},
                         {"max_row_iterations", t.max_row_iterations}});
    }
    j["trace"] = std::move(trace);
    return j;
}

json to_json(const ComparisonReport& report) {
    const auto& c = report.config;
    json config = {{"alpha", round_sig6(c.alpha)},
                   {"sigma", c.sigma ? json(round_sig6(*c.sigma)) : json("estimate")},
                   {"sigma_true", round_sig6(c.generator.sigma_true)},
                   {"clean_trained", c.generator.clean_trained},
                   {"trials", c.trials},
                   {"n_cal", c.n_cal},
                   {"n_test", c.n_test},
                   {"seed", c.base_seed},
                   {"delta_q", round_sig6(c.delta_q)},
                   {"delta_y", round_sig6(c.delta_y)},
                   {"deconv", deconv_json(c.deconv)}};
    if (!c.sigma) {
        config["estimate_fraction"] = round_sig6(c.estimate_fraction);
    }
    if (c.generator.round_unit) {
        config["round_unit"] = round_sig6(*c.generator.round_unit);
    }

    json methods = json::object();
    for (const auto& m : report.methods) {
        methods[std::string(to_string(m.method))] = {
            {"q_hat", metric(m.q_hat)},
            {"avg_length", metric(m.avg_length)},
            {"coverage", metric(m.coverage)},
            {"failures", m.trials.size() - m.successes()},
            {"errors", m.errors},
        };
    }
    return {{"config", std::move(config)},
            {"methods", std::move(methods)},
            {"sigma_used", round_sig6(report.sigma_used.mean)},
            {"trials", report.config.trials}};
}

json to_json(const SigmaEstimate& e) {
    return {{"sigma_hat", round_sig6(e.sigma_hat)}, {"n_used", e.n_used}};
}

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    }
    out << doc.dump(2) << '\n';
    out.flush();
    if (!out) {
        throw Error(ErrorCode::Io, "failed writing " + path.string());
    }
}

std::string to_markdown(const ComparisonReport& report) {
    const auto cell = [](const MetricSummary& m, double scale, int digits) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f ± %.*f", digits, m.mean * scale, digits, m.sd * scale);
        return std::string(buf);
    };
    std::ostringstream os;
    char sigma[32];
    std::snprintf(sigma, sizeof sigma, "%.3g", report.sigma_used.mean);
    os << "| Method | q_hat | Avg. length | Coverage (%) |\n";
    os << "|---|---|---|---|\n";
    for (const auto& m : report.methods) {
        std::string name = m.method == Method::Oracle  ? "Oracle CP"
                           : m.method == Method::Noisy ? "Noisy CP"
                                                       : std::string("Robust CP (sigma=") + sigma + ")";
        if (m.successes() == 0) {
            os << "| " << name << " | failed | failed | failed |\n";
            continue;
        }
        os << "| " << name << " | " << cell(m.q_hat, 1.0, 2) << " | " << cell(m.avg_length, 1.0, 2)
           << " | " << cell(m.coverage, 100.0, 2) << " |\n";
    }
    return os.str();
}

} // namespace nlcp::cli
