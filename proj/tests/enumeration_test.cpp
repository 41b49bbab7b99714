#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "alrisk/enumeration.hpp"
#include "alrisk/errors.hpp"
#include "alrisk/rng.hpp"

using namespace alrisk;

namespace {

LabeledPool loss_pool(std::vector<double> losses, std::vector<double> xs = {}) {
    LabeledPool pool;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        pool.features.push_back({xs.empty() ? static_cast<double>(i) : xs[i]});
        pool.labels.push_back(0.0);
    }
    pool.losses = std::move(losses);
    return pool;
}

} // namespace

TEST_CASE("loss-proportional proposal collapses both weighted estimators") {
    const LabeledPool pool = loss_pool({1, 2, 3});
    const auto moments =
        enumerate_moments(pool, ProposalRule::OptimalLoss(), 2, EstimatorKind::pure);
    CHECK(moments.mean == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(moments.variance <= 1e-18);
    CHECK(moments.trajectory_count == 6);
    CHECK(moments.probability_mass == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("uniform single draw of [1,2,3] has mean 2 and variance 2/3") {
    const LabeledPool pool = loss_pool({1, 2, 3});
    const auto moments =
        enumerate_moments(pool, ProposalRule::Uniform(), 1, EstimatorKind::naive);
    CHECK(moments.mean == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(moments.variance == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    CHECK(moments.trajectory_count == 3);
}

TEST_CASE("lure and naive have identical moments under a uniform proposal") {
    const LabeledPool pool = loss_pool({0.7, 2.4, 4.1, 1.3, 3.3});
    for (std::size_t draws = 1; draws <= 5; ++draws) {
        const auto naive =
            enumerate_moments(pool, ProposalRule::Uniform(), draws, EstimatorKind::naive);
        const auto lure =
            enumerate_moments(pool, ProposalRule::Uniform(), draws, EstimatorKind::lure);
        CHECK(naive.mean == lure.mean);
        CHECK(naive.variance == lure.variance);
    }
}

TEST_CASE("weighted estimators are unbiased for the pool risk") {
    const LabeledPool pool = loss_pool({0.2, 1.9, 3.1, 4.8}, {-0.9, 0.1, 0.4, 1.2});
    const double risk = pool_empirical_risk(pool);
    const std::vector<ProposalRule> rules = {
        ProposalRule::Uniform(),
        ProposalRule::Boltzmann(1.0),
        ProposalRule::GeometricBoltzmann(1.0),
        ProposalRule::EpsilonGreedy(0.1),
        ProposalRule::OptimalLoss(),
    };
    for (const auto& rule : rules) {
        for (std::size_t draws = 1; draws <= pool.size(); ++draws) {
            const auto pure = enumerate_moments(pool, rule, draws, EstimatorKind::pure);
            const auto lure = enumerate_moments(pool, rule, draws, EstimatorKind::lure);
            CHECK(std::abs(pure.mean - risk) <= 1e-10 * risk);
            CHECK(std::abs(lure.mean - risk) <= 1e-10 * risk);
        }
    }
}

TEST_CASE("every levelled weight has expectation 1") {
    const LabeledPool pool = loss_pool({1, 2, 3});
    {
        const auto e = enumerate_weight_expectations(pool, ProposalRule::Uniform(), 2);
        for (double v : e) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
    }
    {
        const auto e = enumerate_weight_expectations(pool, ProposalRule::OptimalLoss(), 2);
        for (double v : e) CHECK(std::abs(v - 1.0) <= 1e-10);
    }
    // Boltzmann over a fixed score table, N=5, M=3
    {
        const LabeledPool pool5 = loss_pool({0.5, 1.1, 2.7, 3.9, 0.4});
        const std::vector<double> table{0.3, -1.2, 0.8, 2.1, -0.4};
        const auto rule = ProposalRule::Boltzmann(
            1.0, [table](std::size_t candidate, std::span<const std::size_t>,
                         const LabeledPool&) { return table[candidate]; });
        const auto e = enumerate_weight_expectations(pool5, rule, 3);
        REQUIRE(e.size() == 3);
        for (double v : e) CHECK(std::abs(v - 1.0) <= 1e-10);
    }
}

TEST_CASE("decomposed variances match direct enumeration") {
    const LabeledPool pool = loss_pool({0.3, 2.9, 1.4, 4.2, 0.8}, {-1.0, 0.2, 0.3, 1.1, 1.4});
    const std::vector<ProposalRule> rules = {
        ProposalRule::Uniform(),
        ProposalRule::GeometricBoltzmann(1.0),
        ProposalRule::EpsilonGreedy(0.3),
    };
    for (const auto& rule : rules) {
        for (std::size_t draws = 1; draws <= pool.size(); ++draws) {
            const auto d = enumerate_variance_decomposition(pool, rule, draws);
            const double pure_scale =
                std::max({d.pure_variance_direct, d.pure_variance_decomposed, 1e-8});
            CHECK(std::abs(d.pure_variance_direct - d.pure_variance_decomposed) <=
                  1e-10 * pure_scale);
            const double lure_scale =
                std::max({d.lure_variance_direct, d.lure_variance_decomposed, 1e-8});
            CHECK(std::abs(d.lure_variance_direct - d.lure_variance_decomposed) <=
                  1e-10 * lure_scale);
        }
    }
}

TEST_CASE("variance ordering under uniform is strict for M > 1") {
    const LabeledPool pool = loss_pool({0.5, 1.5, 3.5, 2.0});
    for (std::size_t draws = 2; draws <= 4; ++draws) {
        const auto d = enumerate_variance_decomposition(pool, ProposalRule::Uniform(), draws);
        CHECK(d.lure_not_above_pure);
        if (draws < 4) // at M = N both variances vanish
            CHECK(d.pure_variance_direct >
                  d.lure_variance_direct + 1e-12 * d.pure_variance_direct);
    }
}

TEST_CASE("loss-proportional proposal zeroes both variances") {
    const LabeledPool pool = loss_pool({1, 2, 3, 4});
    const auto d = enumerate_variance_decomposition(pool, ProposalRule::OptimalLoss(), 3);
    CHECK(d.pure_variance_direct <= 1e-18);
    CHECK(d.lure_variance_direct <= 1e-18);
    CHECK(d.lure_not_above_pure);
}

// Constant losses: the estimators are constant only when the proposal mass is
// flat (uniform, or loss-proportional which then equals uniform). A skewed
// proposal still spreads the pure/lure weights, so their variances stay
// positive; the mean stays exactly at the pool risk either way.
TEST_CASE("constant losses") {
    const LabeledPool pool = loss_pool({1.5, 1.5, 1.5, 1.5});
    {
        const auto d = enumerate_variance_decomposition(pool, ProposalRule::Uniform(), 3);
        CHECK(d.pure_variance_direct <= 1e-18);
        CHECK(d.lure_variance_direct <= 1e-18);
    }
    {
        const auto d =
            enumerate_variance_decomposition(pool, ProposalRule::OptimalLoss(), 3);
        CHECK(d.pure_variance_direct <= 1e-18);
        CHECK(d.lure_variance_direct <= 1e-18);
    }
    {
        const std::vector<double> table{2.0, -1.0, 0.5, 1.0};
        const auto skewed = ProposalRule::Boltzmann(
            1.0, [table](std::size_t candidate, std::span<const std::size_t>,
                         const LabeledPool&) { return table[candidate]; });
        const auto d = enumerate_variance_decomposition(pool, skewed, 2);
        CHECK(d.pure_variance_direct > 1e-6);
        const auto pure = enumerate_moments(pool, skewed, 2, EstimatorKind::pure);
        CHECK(pure.mean == doctest::Approx(1.5).epsilon(1e-12));
    }
}

TEST_CASE("partial support shifts the mean by exactly the known bias") {
    const LabeledPool pool = loss_pool({1, 2, 3, 4, 5});
    const double risk = pool_empirical_risk(pool);
    const std::vector<std::size_t> ignored{1, 4};
    const auto rule = ProposalRule::Uniform().with_ignored(ignored);
    EnumOptions options;
    options.allow_partial_support = true;
    const double expected = risk + partial_support_bias(pool, ignored);
    for (std::size_t draws = 1; draws <= 3; ++draws) {
        const auto pure = enumerate_moments(pool, rule, draws, EstimatorKind::pure, options);
        const auto lure = enumerate_moments(pool, rule, draws, EstimatorKind::lure, options);
        CHECK(std::abs(pure.mean - expected) <= 1e-10 * risk);
        CHECK(std::abs(lure.mean - expected) <= 1e-10 * risk);
    }
    // unflagged partial support is refused
    CHECK_THROWS_AS(enumerate_moments(pool, rule, 2, EstimatorKind::pure), ConfigError);
}

TEST_CASE("size guard trips and can be raised explicitly") {
    const LabeledPool big = loss_pool(std::vector<double>(11, 1.0));
    CHECK_THROWS_AS(enumerate_moments(big, ProposalRule::Uniform(), 2, EstimatorKind::naive),
                    ResourceError);
    const LabeledPool pool = loss_pool({1, 2, 3, 4, 5, 6, 7, 8});
    CHECK_THROWS_AS(enumerate_moments(pool, ProposalRule::Uniform(), 7, EstimatorKind::naive),
                    ResourceError);
    EnumOptions raised;
    raised.max_draws = 8;
    const auto moments =
        enumerate_moments(pool, ProposalRule::Uniform(), 7, EstimatorKind::naive, raised);
    CHECK(moments.trajectory_count == 40320 / 1); // 8!/(8-7)!
}

TEST_CASE("fault injection is visible to the unbiasedness check") {
    const LabeledPool pool = loss_pool({1, 2, 3, 4});
    const double risk = pool_empirical_risk(pool);
    EnumOptions fault;
    fault.fault_pure_weight_shift = true;
    const auto pure =
        enumerate_moments(pool, ProposalRule::Uniform(), 2, EstimatorKind::pure, fault);
    CHECK(std::abs(pure.mean - risk) > 1e-3);
    // the unfaulted path stays clean
    const auto clean = enumerate_moments(pool, ProposalRule::Uniform(), 2, EstimatorKind::pure);
    CHECK(std::abs(clean.mean - risk) <= 1e-10 * risk);
}

// Loss-proportional draws oversample the large losses, so a single naive draw
// overestimates the pool risk in expectation whenever losses are unequal.
TEST_CASE("naive single draw overestimates under loss-proportional sampling") {
    const LabeledPool pool = loss_pool({1, 2, 3});
    const auto naive =
        enumerate_moments(pool, ProposalRule::OptimalLoss(), 1, EstimatorKind::naive);
    // E = (1 + 4 + 9)/6 = 7/3 > 2
    CHECK(naive.mean == doctest::Approx(7.0 / 3.0).epsilon(1e-13));
    CHECK(naive.mean > pool_empirical_risk(pool));

    const LabeledPool constant = loss_pool({2, 2, 2});
    const auto flat =
        enumerate_moments(constant, ProposalRule::OptimalLoss(), 1, EstimatorKind::naive);
    CHECK(flat.mean == doctest::Approx(2.0));
}
