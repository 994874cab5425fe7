#include "nlcp/eval.hpp"

#include "nlcp/error.hpp"
#include "nlcp/noise_estimation.hpp"
#include "nlcp/split_cp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace nlcp {

double coverage(std::span<const PredictionRecord> records, double q) {
    if (records.empty()) {
        throw Error(ErrorCode::EmptyInput, "no test records");
    }
    std::size_t hits = 0;
    for (const auto& r : records) {
        if (!r.label_clean) {
            throw Error(ErrorCode::MissingLabel,
                        "record " + std::to_string(r.id) + " has no clean label");
        }
        hits += contains(interval(r, q), *r.label_clean) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

double avg_length(std::span<const PredictionRecord> records, double q) {
    if (!(q >= 0.0)) {
        throw Error(ErrorCode::NegativeThreshold, "threshold must be >= 0");
    }
    if (records.empty()) {
        throw Error(ErrorCode::EmptyInput, "no test records");
    }
    double sum = 0.0;
    for (const auto& r : records) {
        sum += 2.0 * q * r.u_hat;
    }
    return sum / static_cast<double>(records.size());
}

MetricSummary summarize(std::span<const double> values) {
    MetricSummary s;
    if (values.empty()) {
        return s;
    }
    const double n = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.sd = std::sqrt(ss / (n - 1.0));
    }
    return s;
}

std::size_t MethodSummary::successes() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(trials.begin(), trials.end(), [](const auto& t) { return t.has_value(); }));
}

TrialOutcome run_trial(std::span<const PredictionRecord> cal, std::span<const PredictionRecord> test,
                       const ComparisonConfig& config) {
    TrialOutcome out;
    if (config.sigma) {
        out.sigma_used = *config.sigma;
    } else {
        std::vector<double> u_hat;
        u_hat.reserve(cal.size());
        for (const auto& r : cal) {
            u_hat.push_back(r.u_hat);
        }
        out.sigma_used = estimate_sigma(u_hat, config.estimate_fraction).sigma_hat;
    }

    const auto cell = [&](double q) { return TrialCell{q, avg_length(test, q), coverage(test, q)}; };
    const auto run = [&](Method m, auto&& calibrate) {
        const auto idx = static_cast<std::size_t>(m);
        try {
            out.cells[idx] = cell(calibrate());
        } catch (const Error& e) {
            out.errors[idx] = std::string(to_string(e.code())) + ": " + e.what();
        }
    };

    run(Method::Oracle, [&] { return calibrate_split_cp(scores(cal, LabelField::Clean), config.alpha); });
    run(Method::Noisy, [&] { return calibrate_split_cp(scores(cal, LabelField::Noisy), config.alpha); });
    run(Method::Robust, [&] {
        RobustConfig rc;
        rc.alpha = config.alpha;
        rc.sigma = out.sigma_used;
        rc.delta_q = config.delta_q;
        rc.delta_y = config.delta_y;
        rc.deconv = config.deconv;
        return calibrate_robust(cal, rc).result.q_hat;
    });
    return out;
}

namespace {

ComparisonReport make_report(const ComparisonConfig& config) {
    if (config.trials < 1) {
        throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
    }
    ComparisonReport report;
    report.config = config;
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
        report.methods[m].method = static_cast<Method>(m);
    }
    return report;
}

void absorb(ComparisonReport& report, TrialOutcome&& outcome) {
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
        report.methods[m].trials.push_back(outcome.cells[m]);
        if (!outcome.errors[m].empty()) {
            report.methods[m].errors.push_back(std::move(outcome.errors[m]));
        }
    }
    report.sigma_per_trial.push_back(outcome.sigma_used);
}

void finalize(ComparisonReport& report) {
    for (auto& method : report.methods) {
        std::vector<double> q, len, cov;
        for (const auto& t : method.trials) {
            if (t) {
                q.push_back(t->q_hat);
                len.push_back(t->avg_length);
                cov.push_back(t->coverage);
            }
        }
        method.q_hat = summarize(q);
        method.avg_length = summarize(len);
        method.coverage = summarize(cov);
    }
    report.sigma_used = summarize(report.sigma_per_trial);
}

} // namespace

ComparisonReport run_comparison(const ComparisonConfig& config) {
    ComparisonReport report = make_report(config);
    for (int t = 0; t < config.trials; ++t) {
        const std::uint64_t trial_seed = derive_seed(config.base_seed, static_cast<std::uint64_t>(t));
        SyntheticConfig cal_cfg = config.generator;
        cal_cfg.n = config.n_cal;
        cal_cfg.seed = derive_seed(trial_seed, 0);
        SyntheticConfig test_cfg = config.generator;
        test_cfg.n = config.n_test;
        test_cfg.seed = derive_seed(trial_seed, 1);
        const auto cal = generate(cal_cfg);
        const auto test = generate(test_cfg);
        absorb(report, run_trial(cal, test, config));
    }
    finalize(report);
    return report;
}

ComparisonReport run_comparison_resplit(std::span<const PredictionRecord> pool,
                                        const ComparisonConfig& config) {
    if (config.n_cal == 0 || config.n_cal >= pool.size()) {
        throw Error(ErrorCode::InvalidArgument, "n_cal must leave at least one test record");
    }
    ComparisonReport report = make_report(config);
    std::vector<std::size_t> order(pool.size());
    for (int t = 0; t < config.trials; ++t) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937_64 engine(derive_seed(config.base_seed, static_cast<std::uint64_t>(t)));
        // Fisher-Yates with our own index draw: std::shuffle's algorithm is
        // implementation-defined.
        for (std::size_t i = order.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(engine() % (i + 1));
            std::swap(order[i], order[j]);
        }
        std::vector<PredictionRecord> cal, test;
        cal.reserve(config.n_cal);
        test.reserve(pool.size() - config.n_cal);
        for (std::size_t i = 0; i < order.size(); ++i) {
            (i < config.n_cal ? cal : test).push_back(pool[order[i]]);
        }
        absorb(report, run_trial(cal, test, config));
    }
    finalize(report);
    return report;
}

} // namespace nlcp
