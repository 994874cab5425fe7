#include "nlcp/error.hpp"
#include "nlcp/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

namespace nlcp {
namespace {

TEST(Generate, ZeroNoiseCleanTrained) {
    SyntheticConfig cfg;
    cfg.sigma_true = 0.0;
    cfg.clean_trained = true;
    cfg.n = 500;
    for (const auto& r : generate(cfg)) {
        ASSERT_TRUE(r.label_clean && r.label_noisy);
        EXPECT_EQ(*r.label_noisy, *r.label_clean);
    }
}

TEST(Generate, ModelOutputsFollowTrainingRegime) {
    SyntheticConfig cfg;
    cfg.n = 2000;
    cfg.sigma_true = 0.3;
    const auto noisy_trained = generate(cfg);
    cfg.clean_trained = true;
    const auto clean_trained = generate(cfg);
    ASSERT_EQ(noisy_trained.size(), clean_trained.size());
    int spikes = 0;
    for (std::size_t i = 0; i < noisy_trained.size(); ++i) {
        const double u = clean_trained[i].u_hat;
        EXPECT_NEAR(noisy_trained[i].u_hat, std::sqrt(u * u + 0.09), 1e-15);
        EXPECT_EQ(noisy_trained[i].y_hat, clean_trained[i].y_hat);
        EXPECT_EQ(*noisy_trained[i].label_noisy, *clean_trained[i].label_noisy);
        EXPECT_GT(u, 0.0);
        EXPECT_LE(u, 1.0);
        if (u <= 0.01) {
            ++spikes;
        } else {
            EXPECT_GE(u, 0.05);
        }
    }
    // 2% spike, binomial SD ~ 6.3.
    EXPECT_GT(spikes, 15);
    EXPECT_LT(spikes, 70);
}

TEST(Generate, Deterministic) {
    SyntheticConfig cfg;
    cfg.n = 300;
    cfg.seed = 77;
    const auto a = generate(cfg);
    const auto b = generate(cfg);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].id, i);
        EXPECT_EQ(a[i].y_hat, b[i].y_hat);
        EXPECT_EQ(a[i].u_hat, b[i].u_hat);
        EXPECT_EQ(*a[i].label_clean, *b[i].label_clean);
        EXPECT_EQ(*a[i].label_noisy, *b[i].label_noisy);
    }
    cfg.seed = 78;
    EXPECT_NE(generate(cfg)[0].y_hat, a[0].y_hat);
}

TEST(Generate, NoiseStandardDeviation) {
    SyntheticConfig cfg;
    cfg.n = 100000;
    cfg.sigma_true = 0.2;
    cfg.seed = 4;
    double sum = 0.0, sq = 0.0;
    for (const auto& r : generate(cfg)) {
        const double d = *r.label_noisy - *r.label_clean;
        sum += d;
        sq += d * d;
    }
    const double n = static_cast<double>(cfg.n);
    const double sd = std::sqrt((sq - sum * sum / n) / (n - 1.0));
    EXPECT_GE(sd, 0.198);
    EXPECT_LE(sd, 0.202);
}

TEST(Generate, RoundsNoisyLabels) {
    SyntheticConfig cfg;
    cfg.n = 400;
    cfg.round_unit = 0.25;
    for (const auto& r : generate(cfg)) {
        const double k = *r.label_noisy / 0.25;
        EXPECT_NEAR(k, std::round(k), 1e-9);
    }
}

TEST(RoundToUnit, HalfAwayFromZero) {
    EXPECT_DOUBLE_EQ(round_to_unit(0.125, 0.25), 0.25);
    EXPECT_DOUBLE_EQ(round_to_unit(-0.125, 0.25), -0.25);
    EXPECT_DOUBLE_EQ(round_to_unit(0.1, 0.25), 0.0);
    EXPECT_DOUBLE_EQ(round_to_unit(1.3, 1.0), 1.0);
}

TEST(DeriveSeed, DistinctStreams) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t base = 0; base < 50; ++base) {
        for (std::uint64_t stream = 0; stream < 4; ++stream) {
            seen.insert(derive_seed(base, stream));
        }
    }
    EXPECT_EQ(seen.size(), 200u);
    EXPECT_EQ(derive_seed(5, 1), derive_seed(5, 1));
}

TEST(MonteCarloOracle, StandardNormalQuantile) {
    SyntheticConfig cfg;
    cfg.clean_trained = true;
    EXPECT_NEAR(mc_oracle_q(cfg, 0.1, 1000000), 1.6449, 0.01);
}

TEST(Validate, RejectsBadConfigs) {
    SyntheticConfig cfg;
    cfg.n = 0;
    EXPECT_THROW(generate(cfg), Error);
    cfg = SyntheticConfig{};
    cfg.sigma_true = -1.0;
    EXPECT_THROW(generate(cfg), Error);
    cfg = SyntheticConfig{};
    cfg.u_dist.lo = 2.0;
    EXPECT_THROW(generate(cfg), Error);
    cfg = SyntheticConfig{};
    cfg.round_unit = 0.0;
    EXPECT_THROW(generate(cfg), Error);
}

} // namespace
} // namespace nlcp
