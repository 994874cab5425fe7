#include "cli/commands.hpp"

#include "cli/json_output.hpp"
#include "nlcp/nlcp.hpp"

#include <charconv>
#include <cmath>
#include <utility>
#include <vector>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>

namespace nlcp::cli {

namespace {

// Carries an exit status out of a command body.
struct Exit {
    int code;
    std::string message;
};

const CLI::Validator kPositive =
    CLI::Validator([](std::string& s) -> std::string {
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || !(v > 0.0)) {
            return "value must be > 0, got " + s;
        }
        return {};
    }, "POSITIVE");

const CLI::Validator kUnitInterval =
    CLI::Validator([](std::string& s) -> std::string {
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || !(v > 0.0 && v <= 1.0)) {
            return "value must lie in (0, 1], got " + s;
        }
        return {};
    }, "(0,1]");

const CLI::Validator kOpenUnitInterval =
    CLI::Validator([](std::string& s) -> std::string {
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || !(v > 0.0 && v < 1.0)) {
            return "value must lie in (0, 1), got " + s;
        }
        return {};
    }, "(0,1)");

// String-valued option restricted to `choices`; stores the mapped value.
template <typename T>
CLI::Option* add_choice(CLI::App& app, const std::string& name, T& target,
                        std::vector<std::pair<std::string, T>> choices, const std::string& help) {
    std::vector<std::string> names;
    for (const auto& c : choices) {
        names.push_back(c.first);
    }
    return app
        .add_option_function<std::string>(
            name,
            [&target, choices](const std::string& value) {
                for (const auto& [key, mapped] : choices) {
                    if (key == value) target = mapped;
                }
            },
            help)
        ->check(CLI::IsMember(names));
}

// Solver knobs shared by calibrate and compare.
struct SolverOptions {
    double delta_q = kDefaultDeltaQ;
    double delta_y = kDefaultDeltaY;
    DeconvConfig deconv;

    void add_to(CLI::App& app) {
        app.add_option("--delta-q", delta_q, "Threshold decrement")
            ->check(kPositive)->capture_default_str();
        app.add_option("--delta-y", delta_y, "Label bin width")
            ->check(kPositive)->capture_default_str();
        app.add_option("--lambda", deconv.lambda, "Ridge weight of the deconvolution")
            ->check(CLI::NonNegativeNumber)->capture_default_str();
        app.add_option("--tol", deconv.tol, "Relative objective-change tolerance")
            ->check(kPositive)->capture_default_str();
        app.add_option("--max-iters", deconv.max_iters, "Per-row iteration cap")
            ->check(CLI::PositiveNumber)->capture_default_str();
        add_choice<DeconvSolver>(app, "--solver", deconv.solver,
                                 {{"accelerated", DeconvSolver::Accelerated},
                                  {"pgd", DeconvSolver::ProjectedGradient}},
                                 "Deconvolution solver (default accelerated)");
        add_choice<MaskMode>(app, "--mask", deconv.mask,
                             {{"occupied", MaskMode::Occupied},
                              {"threshold", MaskMode::Threshold},
                              {"none", MaskMode::None}},
                             "Columns entering the data-fit term (default occupied)");
        app.add_option("--mask-epsilon", deconv.mask_epsilon, "Threshold for --mask threshold")
            ->check(CLI::NonNegativeNumber);
    }
};

std::vector<PredictionRecord> load(const std::string& path) {
    try {
        return read_csv(path);
    } catch (const Error& e) {
        throw Exit{kIoError, "cannot load " + path + ": " + e.what()};
    }
}

template <typename Doc>
void save(const std::string& path, const Doc& doc) {
    try {
        write_json(path, doc);
    } catch (const Error& e) {
        throw Exit{kIoError, e.what()};
    }
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
    std::size_t n = 0;
    double sigma_true = 0.0;
    std::uint64_t seed = 0;
    std::optional<double> round_unit;
    bool clean_trained = false;
    std::string out;
};

int cmd_synth(const SynthArgs& a) {
    SyntheticConfig cfg;
    cfg.n = a.n;
    cfg.sigma_true = a.sigma_true;
    cfg.seed = a.seed;
    cfg.round_unit = a.round_unit;
    cfg.clean_trained = a.clean_trained;
    const auto records = generate(cfg);
    try {
        write_csv(a.out, records);
    } catch (const Error& e) {
        throw Exit{kIoError, e.what()};
    }
    return kOk;
}

// ---- calibrate ---------------------------------------------------------------

struct CalibrateArgs {
    Method method = Method::Oracle;
    double alpha = 0.1;
    std::string in;
    std::optional<double> sigma;
    bool sigma_estimate = false;
    double fraction = kDefaultNoiseFraction;
    SolverOptions solver;
    std::string out;
};

int cmd_calibrate(const CalibrateArgs& a) {
    if (a.method == Method::Robust && !a.sigma && !a.sigma_estimate) {
        throw Exit{kBadArguments, "--method robust needs --sigma or --sigma-estimate"};
    }
    const auto records = load(a.in);
    nlohmann::json doc;
    try {
        if (a.method == Method::Robust) {
            double sigma = 0.0;
            if (a.sigma) {
                sigma = *a.sigma;
            } else {
                std::vector<double> u_hat;
                for (const auto& r : records) {
                    u_hat.push_back(r.u_hat);
                }
                sigma = estimate_sigma(u_hat, a.fraction).sigma_hat;
            }
            RobustConfig rc;
            rc.alpha = a.alpha;
            rc.sigma = sigma;
            rc.delta_q = a.solver.delta_q;
            rc.delta_y = a.solver.delta_y;
            rc.deconv = a.solver.deconv;
            const RobustCalibration robust = calibrate_robust(records, rc);
            doc = to_json(robust);
            doc["sigma"] = round_sig6(sigma);
            doc["sigma_estimated"] = !a.sigma;
            doc["delta_q"] = round_sig6(rc.delta_q);
            doc["lambda"] = round_sig6(rc.deconv.lambda);
        } else {
            const LabelField field = a.method == Method::Oracle ? LabelField::Clean : LabelField::Noisy;
            CalibrationResult result;
            result.method = a.method;
            result.q_hat = calibrate_split_cp(scores(records, field), a.alpha);
            doc = to_json(result);
        }
    } catch (const Error& e) {
        const int code = e.code() == ErrorCode::InvalidArgument ? kBadArguments : kPreconditionFailed;
        throw Exit{code, std::string(to_string(e.code())) + ": " + e.what()};
    }
    doc["alpha"] = round_sig6(a.alpha);
    doc["n"] = records.size();
    save(a.out, doc);
    return kOk;
}

// ---- compare -----------------------------------------------------------------

enum class ModelRegime { Auto, CleanTrained, NoisyTrained };

struct CompareArgs {
    double alpha = 0.1;
    double sigma_true = 0.2;
    std::string sigma;
    int trials = 6;
    std::size_t n_cal = 2000;
    std::size_t n_test = 10000;
    std::uint64_t seed = 1;
    ModelRegime model = ModelRegime::Auto;
    std::optional<double> round_unit;
    double fraction = kDefaultNoiseFraction;
    std::string pool;
    SolverOptions solver;
    bool markdown = false;
    std::string out;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
    ComparisonConfig cfg;
    cfg.alpha = a.alpha;
    cfg.trials = a.trials;
    cfg.n_cal = a.n_cal;
    cfg.n_test = a.n_test;
    cfg.base_seed = a.seed;
    cfg.estimate_fraction = a.fraction;
    cfg.delta_q = a.solver.delta_q;
    cfg.delta_y = a.solver.delta_y;
    cfg.deconv = a.solver.deconv;
    if (a.sigma.empty()) {
        cfg.sigma = a.sigma_true;
    } else if (a.sigma == "estimate") {
        cfg.sigma = std::nullopt;
    } else {
        double v = 0.0;
        const auto res = std::from_chars(a.sigma.data(), a.sigma.data() + a.sigma.size(), v);
        if (res.ec != std::errc{} || res.ptr != a.sigma.data() + a.sigma.size() || !(v >= 0.0)) {
            throw Exit{kBadArguments, "--sigma: expected a value >= 0 or 'estimate', got " + a.sigma};
        }
        cfg.sigma = v;
    }
    cfg.generator.sigma_true = a.sigma_true;
    cfg.generator.round_unit = a.round_unit;
    // A known kernel width pairs with a model trained on clean labels; an
    // estimated one needs the model trained on noisy labels to read it from.
    cfg.generator.clean_trained = a.model == ModelRegime::CleanTrained ||
                                  (a.model == ModelRegime::Auto && cfg.sigma.has_value());

    ComparisonReport report;
    try {
        if (a.pool.empty()) {
            report = run_comparison(cfg);
        } else {
            const auto pool = load(a.pool);
            report = run_comparison_resplit(pool, cfg);
        }
    } catch (const Error& e) {
        const int code = e.code() == ErrorCode::InvalidArgument ? kBadArguments : kPreconditionFailed;
        throw Exit{code, std::string(to_string(e.code())) + ": " + e.what()};
    }
    save(a.out, to_json(report));
    if (a.markdown) {
        out << to_markdown(report);
    }
    return kOk;
}

// ---- estimate-noise ----------------------------------------------------------

struct EstimateArgs {
    std::string in;
    double fraction = kDefaultNoiseFraction;
    std::string out;
};

int cmd_estimate_noise(const EstimateArgs& a) {
    const auto records = load(a.in);
    std::vector<double> u_hat;
    u_hat.reserve(records.size());
    for (const auto& r : records) {
        u_hat.push_back(r.u_hat);
    }
    SigmaEstimate est;
    try {
        est = estimate_sigma(u_hat, a.fraction);
    } catch (const Error& e) {
        throw Exit{kPreconditionFailed, e.what()};
    }
    save(a.out, to_json(est));
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Conformal calibration of regression intervals under label noise", "nlcp"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic calibration dataset (CSV)");
    synth_cmd->add_option("--n", synth.n, "Number of records")->required()->check(CLI::PositiveNumber);
    synth_cmd->add_option("--sigma-true", synth.sigma_true, "Label-noise SD")
        ->required()->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--seed", synth.seed, "RNG seed")->required();
    synth_cmd->add_option("--round-unit", synth.round_unit, "Round noisy labels to this unit")
        ->check(kPositive);
    synth_cmd->add_flag("--clean-trained", synth.clean_trained,
                        "Emulate a model trained on clean labels (u_hat = u)");
    synth_cmd->add_option("--out", synth.out, "Output CSV")->required();

    CalibrateArgs cal;
    auto* cal_cmd = app.add_subcommand("calibrate", "Calibrate a CP threshold from a CSV dataset");
    add_choice<Method>(*cal_cmd, "--method", cal.method,
                       {{"oracle", Method::Oracle}, {"noisy", Method::Noisy},
                        {"robust", Method::Robust}},
                       "Calibration method")
        ->required();
    cal_cmd->add_option("--alpha", cal.alpha, "Miscoverage level")
        ->check(kOpenUnitInterval)->capture_default_str();
    cal_cmd->add_option("--in", cal.in, "Calibration CSV")->required();
    auto* sigma_opt = cal_cmd->add_option("--sigma", cal.sigma, "Noise kernel SD")
        ->check(CLI::NonNegativeNumber);
    auto* estimate_flag = cal_cmd->add_flag("--sigma-estimate", cal.sigma_estimate,
                                            "Estimate the noise SD from the u_hat column");
    sigma_opt->excludes(estimate_flag);
    cal_cmd->add_option("--fraction", cal.fraction, "Fraction of smallest u_hat^2 for --sigma-estimate")
        ->check(kUnitInterval)->capture_default_str();
    cal.solver.add_to(*cal_cmd);
    cal_cmd->add_option("--out", cal.out, "Output JSON")->required();

    CompareArgs cmp;
    auto* cmp_cmd = app.add_subcommand("compare", "Oracle / noisy / robust comparison over trials");
    cmp_cmd->add_option("--alpha", cmp.alpha, "Miscoverage level")
        ->check(kOpenUnitInterval)->capture_default_str();
    cmp_cmd->add_option("--sigma-true", cmp.sigma_true, "Label-noise SD of the generator")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    cmp_cmd->add_option("--sigma", cmp.sigma, "Kernel SD for the robust method, or 'estimate' "
                                              "(default: --sigma-true)");
    cmp_cmd->add_option("--trials", cmp.trials, "Number of trials")
        ->check(CLI::PositiveNumber)->capture_default_str();
    cmp_cmd->add_option("--n-cal", cmp.n_cal, "Calibration set size")
        ->check(CLI::PositiveNumber)->capture_default_str();
    cmp_cmd->add_option("--n-test", cmp.n_test, "Test set size")
        ->check(CLI::PositiveNumber)->capture_default_str();
    cmp_cmd->add_option("--seed", cmp.seed, "Base seed")->capture_default_str();
    add_choice<ModelRegime>(*cmp_cmd, "--model", cmp.model,
                            {{"auto", ModelRegime::Auto},
                             {"clean-trained", ModelRegime::CleanTrained},
                             {"noisy-trained", ModelRegime::NoisyTrained}},
                            "Emulated model; auto is clean-trained for a numeric --sigma and "
                            "noisy-trained for 'estimate'");
    cmp_cmd->add_option("--round-unit", cmp.round_unit, "Round noisy labels to this unit")
        ->check(kPositive);
    cmp_cmd->add_option("--fraction", cmp.fraction, "Fraction of smallest u_hat^2 for 'estimate'")
        ->check(kUnitInterval)->capture_default_str();
    cmp_cmd->add_option("--in", cmp.pool,
                        "Fixed record pool (CSV); trials resplit it instead of generating data");
    cmp.solver.add_to(*cmp_cmd);
    cmp_cmd->add_flag("--markdown", cmp.markdown, "Also print a summary table to stdout");
    cmp_cmd->add_option("--out", cmp.out, "Output JSON")->required();

    EstimateArgs est;
    auto* est_cmd = app.add_subcommand("estimate-noise", "Estimate the label-noise SD from u_hat");
    est_cmd->add_option("--in", est.in, "CSV of model predictions on noisy training data")->required();
    est_cmd->add_option("--fraction", est.fraction, "Fraction of smallest u_hat^2 to average")
        ->check(kUnitInterval)->capture_default_str();
    est_cmd->add_option("--out", est.out, "Output JSON")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kBadArguments;
    }

    try {
        if (*synth_cmd) return cmd_synth(synth);
        if (*cal_cmd) return cmd_calibrate(cal);
        if (*cmp_cmd) return cmd_compare(cmp, out);
        if (*est_cmd) return cmd_estimate_noise(est);
    } catch (const Exit& e) {
        err << "error: " << e.message << '\n';
        return e.code;
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return e.code() == ErrorCode::InvalidArgument ? kBadArguments : kPreconditionFailed;
    }
    return kBadArguments;
}

} // namespace nlcp::cli
