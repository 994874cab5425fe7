#include "nlcp/error.hpp"
#include "nlcp/noise_estimation.hpp"
#include "nlcp/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

namespace nlcp {
namespace {

std::vector<double> u_hats(const std::vector<PredictionRecord>& recs) {
    std::vector<double> u;
    for (const auto& r : recs) u.push_back(r.u_hat);
    return u;
}

TEST(EstimateSigma, ConstantList) {
    const std::vector<double> u(40, 0.2);
    EXPECT_NEAR(estimate_sigma(u).sigma_hat, 0.2, 1e-15);
}

TEST(EstimateSigma, PlainMeanAtFullFraction) {
    const std::vector<double> u{0.1, 0.3};
    const auto est = estimate_sigma(u, 1.0);
    EXPECT_NEAR(est.sigma_hat, std::sqrt(0.05), 1e-15);
    EXPECT_EQ(est.n_used, 2u);
}

TEST(EstimateSigma, CeilingKeepsAtLeastOne) {
    const std::vector<double> u{0.5, 0.3, 0.9};
    const auto est = estimate_sigma(u, 0.01);
    EXPECT_EQ(est.n_used, 1u);
    EXPECT_DOUBLE_EQ(est.sigma_hat, 0.3);
    std::vector<double> many(1000, 1.0);
    EXPECT_EQ(estimate_sigma(many, 0.01).n_used, 10u);
    EXPECT_EQ(estimate_sigma(std::vector<double>(1001, 1.0), 0.01).n_used, 11u);
}

TEST(EstimateSigma, SyntheticEmulation) {
    SyntheticConfig cfg;
    cfg.n = 20000;
    cfg.sigma_true = 0.2;
    cfg.seed = 8;
    const auto est = estimate_sigma(u_hats(generate(cfg)));
    EXPECT_GE(est.sigma_hat, 0.19);
    EXPECT_LE(est.sigma_hat, 0.215);
}

TEST(EstimateSigma, MonotoneAndScaleEquivariant) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unit(0.01, 2.0);
    std::vector<double> u(500);
    for (auto& v : u) v = unit(rng);
    const double base = estimate_sigma(u, 0.05).sigma_hat;
    for (int i = 0; i < 50; ++i) {
        auto bumped = u;
        bumped[static_cast<std::size_t>(i * 7)] *= 1.5;
        EXPECT_GE(estimate_sigma(bumped, 0.05).sigma_hat, base);
    }
    for (double c : {0.1, 3.0, 17.0}) {
        auto scaled = u;
        for (auto& v : scaled) v *= c;
        EXPECT_NEAR(estimate_sigma(scaled, 0.05).sigma_hat, c * base, 1e-12 * c);
    }
}

TEST(EstimateSigma, Errors) {
    const std::vector<double> empty;
    try {
        estimate_sigma(empty);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
    }
    const std::vector<double> ok{1.0};
    EXPECT_THROW(estimate_sigma(ok, 0.0), Error);
    EXPECT_THROW(estimate_sigma(ok, 1.5), Error);
    const std::vector<double> bad{1.0, 0.0};
    EXPECT_THROW(estimate_sigma(bad), Error);
}

} // namespace
} // namespace nlcp
