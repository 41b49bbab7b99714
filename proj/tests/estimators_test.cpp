#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "alrisk/errors.hpp"
#include "alrisk/estimators.hpp"
#include "alrisk/pool.hpp"
#include "alrisk/proposals.hpp"
#include "alrisk/rng.hpp"

using namespace alrisk;

namespace {

LabeledPool loss_pool(std::vector<double> losses) {
    LabeledPool pool;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        pool.features.push_back({static_cast<double>(i)});
        pool.labels.push_back(0.0);
    }
    pool.losses = std::move(losses);
    return pool;
}

Trajectory make_traj(const LabeledPool& pool, std::vector<std::size_t> indices,
                     std::vector<double> masses) {
    Trajectory traj;
    traj.pool_size = pool.size();
    for (std::size_t m = 0; m < indices.size(); ++m)
        traj.steps.push_back(
            TrajectoryStep{indices[m], masses[m], (*pool.losses)[indices[m]]});
    return traj;
}

} // namespace

TEST_CASE("pure weights follow 1/(Nq) + (M-m)/N") {
    // uniform masses, N=101, M=10: first weight 1 + 9/101
    {
        std::vector<double> masses;
        for (std::size_t m = 1; m <= 10; ++m) masses.push_back(1.0 / (101.0 - m + 1.0));
        const auto w = pure_weights(masses, 10, 101);
        CHECK(w[0] == doctest::Approx(1.0 + 9.0 / 101.0).epsilon(1e-14));
        // uniform case collapses to 1 + (M - 2m + 1)/N
        for (std::size_t m = 1; m <= 10; ++m)
            CHECK(w[m - 1] ==
                  doctest::Approx(1.0 + (10.0 - 2.0 * m + 1.0) / 101.0).epsilon(1e-13));
    }
    // M = N with uniform masses: last weight is 1/N
    {
        std::vector<double> masses;
        for (std::size_t m = 1; m <= 5; ++m) masses.push_back(1.0 / (5.0 - m + 1.0));
        const auto w = pure_weights(masses, 5, 5);
        CHECK(w[4] == doctest::Approx(1.0 / 5.0));
    }
    // single uniform draw is unweighted
    {
        const std::vector<double> masses{1.0 / 5.0};
        CHECK(pure_weights(masses, 1, 5)[0] == doctest::Approx(1.0));
    }
    const std::vector<double> bad{0.0};
    CHECK_THROWS_AS(pure_weights(bad, 1, 3), ProposalError);
    const std::vector<double> short_masses{0.5};
    CHECK_THROWS_AS(pure_weights(short_masses, 2, 3), ArgumentError);
}

TEST_CASE("pure estimate hits the pool risk under loss-proportional draws") {
    const LabeledPool pool = loss_pool({2, 4});
    // drawn index 1 (loss 4) with q = 4/6 = 2/3
    const Trajectory high = make_traj(pool, {1}, {2.0 / 3.0});
    CHECK(pure_estimate(high).value == doctest::Approx(3.0).epsilon(1e-12));
    // drawn index 0 (loss 2) with q = 1/3
    const Trajectory low = make_traj(pool, {0}, {1.0 / 3.0});
    CHECK(pure_estimate(low).value == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("lure weights") {
    // uniform proposal: every weight exactly 1
    {
        std::vector<double> masses;
        for (std::size_t m = 1; m <= 4; ++m) masses.push_back(1.0 / (9.0 - m + 1.0));
        for (double v : lure_weights(masses, 4, 9)) CHECK(v == 1.0);
    }
    // M = N: every weight exactly 1 regardless of masses
    {
        const std::vector<double> masses{0.7, 0.4, 1.0};
        for (double v : lure_weights(masses, 3, 3)) CHECK(v == 1.0);
    }
    // N=2, M=1, q=2/3: v = 1 + (1/(2 * 2/3) - 1) = 0.75
    {
        const std::vector<double> masses{2.0 / 3.0};
        CHECK(lure_weights(masses, 1, 2)[0] == doctest::Approx(0.75).epsilon(1e-14));
    }
}

TEST_CASE("lure estimate") {
    const LabeledPool pool = loss_pool({2, 4});
    const Trajectory high = make_traj(pool, {1}, {2.0 / 3.0});
    CHECK(lure_estimate(high).value == doctest::Approx(3.0).epsilon(1e-12));

    // uniform proposal: lure equals naive exactly
    const LabeledPool pool5 = loss_pool({0.3, 1.7, 2.9, 0.2, 4.4});
    Philox4x64 rng(5, 0);
    const Trajectory traj = sample_trajectory(pool5, ProposalRule::Uniform(), 4, rng);
    CHECK(lure_estimate(traj).value == naive_estimate(traj).value);

    // M = N: equals the pool risk exactly
    Philox4x64 rng2(6, 0);
    const Trajectory full =
        sample_trajectory(pool5, ProposalRule::GeometricBoltzmann(1.0), 5, rng2);
    CHECK(lure_estimate(full).value == doctest::Approx(pool_empirical_risk(pool5)));
    CHECK(naive_estimate(full).value == doctest::Approx(pool_empirical_risk(pool5)));
}

TEST_CASE("naive estimate") {
    const LabeledPool pool = loss_pool({2, 4});
    const Trajectory high = make_traj(pool, {1}, {2.0 / 3.0});
    CHECK(naive_estimate(high).value == doctest::Approx(4.0));
    for (double w : naive_estimate(high).per_point_weights) CHECK(w == 1.0);

    const LabeledPool constant = loss_pool({1.5, 1.5, 1.5});
    const Trajectory traj = make_traj(constant, {2, 0}, {1.0 / 3.0, 1.0 / 2.0});
    CHECK(naive_estimate(traj).value == doctest::Approx(1.5));
}

TEST_CASE("lure constants") {
    {
        const auto constants = lure_constants(3, 5);
        CHECK(constants.c[0] == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(constants.c[1] == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
        CHECK(constants.c[2] == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
        const double sum = std::accumulate(constants.c.begin(), constants.c.end(), 0.0);
        CHECK(sum == doctest::Approx(3.0).epsilon(1e-13));
    }
    {
        const auto constants = lure_constants(4, 4);
        for (double c : constants.c) CHECK(c == 0.0);
    }
    CHECK(lure_constants(1, 2).c[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(lure_constants(5, 4), ArgumentError);
}

TEST_CASE("lure constant sums telescope to M") {
    Philox4x64 rng(8, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.next_below(400);
        const std::size_t m = 1 + rng.next_below(n - 1); // M < N
        const auto constants = lure_constants(m, n);
        double sum = 0.0;
        for (double c : constants.c) sum += c;
        CHECK(std::abs(sum - static_cast<double>(m)) <=
              1e-12 * static_cast<double>(m));
    }
}

TEST_CASE("partial-support bias") {
    const LabeledPool pool = loss_pool({1, 2, 3});
    CHECK(partial_support_bias(pool, {}) == 0.0);
    const std::vector<std::size_t> one{2};
    CHECK(partial_support_bias(pool, one) == doctest::Approx(-1.0));
    const std::vector<std::size_t> all{0, 1, 2};
    CHECK(partial_support_bias(pool, all) == doctest::Approx(-pool_empirical_risk(pool)));
}

TEST_CASE("weighted value identity holds for all three estimators") {
    const LabeledPool pool = loss_pool({0.4, 3.1, 2.2, 5.0, 1.9, 0.7});
    Philox4x64 rng(11, 0);
    for (int trial = 0; trial < 50; ++trial) {
        Philox4x64 sampler(12, static_cast<std::uint64_t>(trial));
        const std::size_t draws = 1 + sampler.next_below(pool.size());
        const Trajectory traj =
            sample_trajectory(pool, ProposalRule::GeometricBoltzmann(1.0), draws, sampler);
        for (const auto& est :
             {naive_estimate(traj), pure_estimate(traj), lure_estimate(traj)}) {
            double recomputed = 0.0;
            for (std::size_t m = 0; m < traj.draws(); ++m)
                recomputed += est.per_point_weights[m] * traj.steps[m].loss;
            recomputed /= static_cast<double>(traj.draws());
            CHECK(est.value == doctest::Approx(recomputed).epsilon(1e-12));
        }
    }
}

// Appendix-style identity: scaling each per-term estimate a_m by c_m and
// averaging reproduces the levelled estimate, for every M < N.
TEST_CASE("levelled estimate equals the c-weighted per-term combination") {
    const LabeledPool pool = loss_pool({1.2, 0.1, 4.4, 2.8, 3.6, 0.9, 1.1});
    const std::size_t n = pool.size();
    for (int trial = 0; trial < 60; ++trial) {
        Philox4x64 sampler(13, static_cast<std::uint64_t>(trial));
        const std::size_t draws = 1 + sampler.next_below(n - 1); // M < N
        const Trajectory traj =
            sample_trajectory(pool, ProposalRule::OptimalLoss(), draws, sampler);
        const auto constants = lure_constants(draws, n);

        double earlier = 0.0;
        double combined = 0.0;
        for (std::size_t m = 0; m < draws; ++m) {
            const double a_m =
                traj.steps[m].loss / (static_cast<double>(n) * traj.steps[m].mass) +
                earlier / static_cast<double>(n);
            combined += constants.c[m] * a_m;
            earlier += traj.steps[m].loss;
        }
        combined /= static_cast<double>(draws);
        const double lure = lure_estimate(traj).value;
        CHECK(std::abs(combined - lure) <=
              1e-10 * std::max(std::abs(combined), std::abs(lure)));
    }
}

TEST_CASE("loss-proportional sampling makes both weighted estimators exact") {
    Philox4x64 rng(14, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.next_below(20);
        std::vector<double> losses;
        for (std::size_t i = 0; i < n; ++i) losses.push_back(0.05 + 5.0 * rng.next_double());
        const LabeledPool pool = loss_pool(std::move(losses));
        const double risk = pool_empirical_risk(pool);
        const std::size_t draws = 1 + rng.next_below(n);
        Philox4x64 sampler(15, static_cast<std::uint64_t>(trial));
        const Trajectory traj =
            sample_trajectory(pool, ProposalRule::OptimalLoss(), draws, sampler);
        CHECK(std::abs(pure_estimate(traj).value - risk) <= 1e-10 * risk);
        CHECK(std::abs(lure_estimate(traj).value - risk) <= 1e-10 * risk);
    }
}
