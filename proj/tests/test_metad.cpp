#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "grid_oracle.hpp"
#include "metacog/metad.hpp"
#include "metacog/normal.hpp"
#include "metacog/observer.hpp"

using namespace metacog;

namespace {

const std::vector<double> kS1 = {-2, -1.5, -1, -0.5};
const std::vector<double> kS2 = {0.5, 1, 1.5, 2};

RatingCounts toy_counts() {
    const auto d = grid_oracle::toy();
    RatingCounts rc(2);
    for (int s = 0; s < 2; ++s)
        for (int r = 0; r < 2; ++r)
            for (int k = 0; k < 2; ++k) rc.at(Stimulus(s), Stimulus(r), k + 1) = d.n[s][r][k];
    return rc;
}

double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST(Type2Probs, ZeroSensitivityGivesIdenticalSlices) {
    MetaDParams p{0.0, 0.0, {-1.0, -0.5}, {0.5, 1.0}};
    const auto t = type2_probs(p, 3);
    for (int r = 0; r < 2; ++r)
        for (int k = 1; k <= 3; ++k)
            EXPECT_NEAR(t.at(Stimulus::S1, Stimulus(r), k), t.at(Stimulus::S2, Stimulus(r), k), 1e-15);
}

TEST(Type2Probs, OutermostIntervalMatchesClosedForm) {
    MetaDParams p{3.0, 0.0, kS1, kS2};
    const auto t = type2_probs(p, 5);
    EXPECT_NEAR(t.at(Stimulus::S2, Stimulus::S2, 5), (1 - Phi(2 - 1.5)) / (1 - Phi(0 - 1.5)), 1e-14);
    EXPECT_NEAR(t.at(Stimulus::S1, Stimulus::S1, 5), Phi(-2 + 1.5) / Phi(0 + 1.5), 1e-14);
    // Lowest confidence sits next to meta_c.
    EXPECT_NEAR(t.at(Stimulus::S2, Stimulus::S1, 1), (Phi(0 - 1.5) - Phi(-0.5 - 1.5)) / Phi(0 - 1.5), 1e-14);
}

TEST(Type2Probs, SlicesSumToOne) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.05, 1.0), md(0.0, 4.0), mc(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int h = 2 + trial % 5;
        MetaDParams p;
        p.meta_d = md(rng);
        p.meta_c = mc(rng);
        double x = p.meta_c;
        for (int i = 0; i < h - 1; ++i) p.t2_criteria_s1.insert(p.t2_criteria_s1.begin(), x -= u(rng));
        x = p.meta_c;
        for (int i = 0; i < h - 1; ++i) p.t2_criteria_s2.push_back(x += u(rng));
        const auto t = type2_probs(p, h);
        for (int s = 0; s < 2; ++s)
            for (int r = 0; r < 2; ++r) {
                double sum = 0;
                for (int k = 1; k <= h; ++k) {
                    ASSERT_GE(t.at(Stimulus(s), Stimulus(r), k), 0.0);
                    sum += t.at(Stimulus(s), Stimulus(r), k);
                }
                ASSERT_NEAR(sum, 1.0, 1e-12);
            }
    }
}

TEST(Type2Probs, RejectsUnorderedThresholds) {
    EXPECT_THROW(type2_probs(MetaDParams{1.0, 0.0, {-0.5, -1.0}, {0.5, 1.0}}, 3), std::invalid_argument);
    EXPECT_THROW(type2_probs(MetaDParams{1.0, 0.6, {-0.5}, {0.5}}, 2), std::invalid_argument);
    EXPECT_THROW(type2_probs(MetaDParams{1.0, 0.0, {-0.5}, {0.5}}, 3), std::invalid_argument);
}

TEST(CellPaddingPolicy, AddsHalfOverHWhenAnyCellIsZero) {
    RatingCounts rc(4);
    for (auto& c : rc.cells()) c = 3;
    EXPECT_EQ(apply_cell_padding(rc, CellPadding::WhenDegenerate), rc);
    rc.at(Stimulus::S1, Stimulus::S2, 4) = 0;
    const auto padded = apply_cell_padding(rc, CellPadding::WhenDegenerate);
    for (std::size_t i = 0; i < rc.cells().size(); ++i) EXPECT_DOUBLE_EQ(padded.cells()[i], rc.cells()[i] + 1.0 / 8.0);
    EXPECT_EQ(apply_cell_padding(rc, CellPadding::Never), rc);
}

TEST(MRatio, Examples) {
    EXPECT_DOUBLE_EQ(m_ratio(3.0, 3.0), 1.0);
    EXPECT_NEAR(m_ratio(2.7738, 3.2396), 0.8563, 1e-4);
    EXPECT_NEAR(m_ratio(1.6510, 2.5217), 0.6548, 1e-4);
    EXPECT_THROW(m_ratio(1.0, 0.0), std::domain_error);
}

TEST(FitMetaD, MatchesExhaustiveGridOnToyCounts) {
    const auto counts = toy_counts();
    const auto fit = fit_meta_d(counts);
    const auto grid = grid_oracle::search(grid_oracle::toy());
    EXPECT_TRUE(fit.converged);
    EXPECT_FALSE(fit.padded);
    EXPECT_NEAR(fit.params.meta_d, grid.meta_d, 2e-3);
    EXPECT_NEAR(fit.log_likelihood / counts.total(), grid.log_likelihood / counts.total(), 1e-3);
    // The optimizer should do at least as well as a finite grid.
    EXPECT_GE(fit.log_likelihood, grid.log_likelihood - 1e-6);
    EXPECT_NEAR(fit.params.meta_c, 0.0, 1e-9);
}

TEST(FitMetaD, IdealObserverExpectedCountsRecoverDPrime) {
    for (double d : {0.8, 1.5, 2.4, 3.2}) {
        ObserverSpec spec{d, 0.2, std::nullopt, kS1, kS2};
        const auto counts = expected_counts(spec, 10000);
        const auto fit = fit_meta_d(counts);
        EXPECT_TRUE(fit.converged);
        EXPECT_NEAR(fit.params.meta_d, d, 1e-3) << "d'=" << d;
        ASSERT_TRUE(fit.m_ratio);
        EXPECT_NEAR(*fit.m_ratio, 1.0, 1e-3);
    }
}

TEST(FitMetaD, RecoversGeneratingThresholdsFromExpectedCounts) {
    ObserverSpec spec{2.0, -0.3, 1.4, {-1.8, -1.2, -0.7}, {0.1, 0.6, 1.3}};
    // meta_c = c' * meta_d must sit between the two inner criteria.
    const auto fit = fit_meta_d(expected_counts(spec, 20000));
    EXPECT_NEAR(fit.params.meta_d, 1.4, 1e-3);
    EXPECT_NEAR(fit.params.meta_c, spec.meta_c(), 1e-4);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(fit.params.t2_criteria_s1[i], spec.t2_criteria_s1[i], 2e-3);
        EXPECT_NEAR(fit.params.t2_criteria_s2[i], spec.t2_criteria_s2[i], 2e-3);
    }
}

TEST(FitMetaD, ThresholdsAlwaysOrderedAndLikelihoodBeatsTruth) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> dd(0.5, 3.5), ratio(0.3, 1.3), cc(-0.5, 0.5), gap(0.2, 0.8);
    for (int i = 0; i < 25; ++i) {
        ObserverSpec spec;
        spec.d_prime = dd(rng);
        spec.c = cc(rng);
        spec.meta_d = spec.d_prime * ratio(rng);
        const double mc = spec.meta_c();
        double x = mc;
        for (int k = 0; k < 3; ++k) spec.t2_criteria_s1.insert(spec.t2_criteria_s1.begin(), x -= gap(rng));
        x = mc;
        for (int k = 0; k < 3; ++k) spec.t2_criteria_s2.push_back(x += gap(rng));
        SimOptions opts;
        opts.n_trials = 2000;
        opts.seed = 100 + i;
        RatingCounts counts;
        try {
            counts = simulate_counts(spec, opts);
        } catch (const std::runtime_error&) {
            continue;  // an empty response cell; nothing to fit
        }
        const auto fit = fit_meta_d(counts, {CellPadding::Never, EdgeCorrection::WhenDegenerate, {}});
        EXPECT_TRUE(fit.params.is_ordered());
        EXPECT_NEAR(fit.params.meta_c, *fit.type1.c_prime * fit.params.meta_d, 1e-9);
        // The truth is feasible only when its meta_c matches the data's c'.
        MetaDParams truth = spec.metad_params();
        truth.meta_c = *fit.type1.c_prime * truth.meta_d;
        if (truth.is_ordered()) EXPECT_GE(fit.log_likelihood, type2_log_likelihood(counts, truth) - 1e-6);
    }
}

TEST(FitMetaD, ZeroCellsArePaddedByDefault) {
    auto counts = toy_counts();
    counts.at(Stimulus::S1, Stimulus::S2, 2) = 0;
    const auto fit = fit_meta_d(counts);
    EXPECT_TRUE(fit.padded);
    EXPECT_TRUE(std::isfinite(fit.log_likelihood));
    EXPECT_TRUE(fit.params.is_ordered());
    // Type 1 values come from the raw counts, not the padded ones.
    EXPECT_DOUBLE_EQ(fit.type1.n_s1, 90.0);
}

TEST(FitMetaD, ZeroTypeOneSensitivityIsAnError) {
    RatingCounts rc(2);
    for (auto& c : rc.cells()) c = 10;
    EXPECT_THROW(fit_meta_d(rc), std::invalid_argument);
}
