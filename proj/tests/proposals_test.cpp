#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "alrisk/errors.hpp"
#include "alrisk/proposals.hpp"
#include "alrisk/rng.hpp"

using namespace alrisk;

namespace {

LabeledPool feature_pool(std::vector<double> xs, std::vector<double> losses = {}) {
    LabeledPool pool;
    for (double x : xs) {
        pool.features.push_back({x});
        pool.labels.push_back(0.0);
    }
    if (!losses.empty()) pool.losses = std::move(losses);
    return pool;
}

double total(const std::vector<double>& mass) {
    return std::accumulate(mass.begin(), mass.end(), 0.0);
}

} // namespace

TEST_CASE("uniform masses") {
    const std::vector<std::size_t> empty;
    auto mass = uniform_masses(empty, 4);
    CHECK(mass == std::vector<double>{0.25, 0.25, 0.25, 0.25});

    const std::vector<std::size_t> one{2};
    mass = uniform_masses(one, 4);
    CHECK(mass[0] == doctest::Approx(1.0 / 3.0));
    CHECK(mass[1] == doctest::Approx(1.0 / 3.0));
    CHECK(mass[2] == 0.0);
    CHECK(mass[3] == doctest::Approx(1.0 / 3.0));

    CHECK(uniform_masses(empty, 1) == std::vector<double>{1.0});

    const std::vector<std::size_t> all{0, 1, 2, 3};
    CHECK_THROWS_AS(uniform_masses(all, 4), ArgumentError);
}

TEST_CASE("boltzmann masses") {
    const std::vector<std::size_t> empty;
    {
        const std::vector<double> scores{1, 1, 1};
        const auto mass = boltzmann_masses(scores, 10.0, empty);
        for (double q : mass) CHECK(q == doctest::Approx(1.0 / 3.0));
    }
    {
        const std::vector<double> scores{0.0, std::log(2.0)};
        const auto mass = boltzmann_masses(scores, 1.0, empty);
        CHECK(mass[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(mass[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
    {
        const std::vector<double> scores{-3.0, 12.0, 5.0};
        const auto mass = boltzmann_masses(scores, 0.0, empty);
        for (double q : mass) CHECK(q == doctest::Approx(1.0 / 3.0));
    }
    // big exponents survive the max shift
    {
        const std::vector<double> scores{0.0, 650.0, 640.0};
        const auto mass = boltzmann_masses(scores, 1.0, empty);
        CHECK(std::isfinite(mass[1]));
        CHECK(total(mass) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(mass[1] > mass[2]);
    }
}

TEST_CASE("boltzmann shift invariance") {
    Philox4x64 rng(3, 0);
    const std::vector<std::size_t> history{1};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> scores;
        for (int i = 0; i < 6; ++i) scores.push_back(10.0 * rng.next_double() - 5.0);
        const double shift = 100.0 * rng.next_double() - 50.0;
        std::vector<double> shifted = scores;
        for (double& s : shifted) s += shift;
        const auto a = boltzmann_masses(scores, 1.7, history);
        const auto b = boltzmann_masses(shifted, 1.7, history);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
}

TEST_CASE("epsilon-greedy masses") {
    const std::vector<std::size_t> empty;
    {
        const auto mass = epsilon_greedy_masses(2, 0.1, empty, 4);
        CHECK(mass[0] == doctest::Approx(0.025));
        CHECK(mass[1] == doctest::Approx(0.025));
        CHECK(mass[2] == doctest::Approx(0.925));
        CHECK(mass[3] == doctest::Approx(0.025));
    }
    {
        const auto mass = epsilon_greedy_masses(2, 1.0, empty, 4);
        for (double q : mass) CHECK(q == doctest::Approx(0.25));
    }
    {
        const std::vector<std::size_t> history{0};
        const auto mass = epsilon_greedy_masses(1, 0.5, history, 2);
        CHECK(mass[0] == 0.0);
        CHECK(mass[1] == doctest::Approx(1.0));
    }
    const std::vector<std::size_t> history{1};
    CHECK_THROWS_AS(epsilon_greedy_masses(1, 0.5, history, 3), ArgumentError);
    CHECK_THROWS_AS(epsilon_greedy_masses(0, 0.0, empty, 3), ArgumentError);
    CHECK_THROWS_AS(epsilon_greedy_masses(0, 1.5, empty, 3), ArgumentError);
}

TEST_CASE("optimal-loss masses") {
    const std::vector<std::size_t> empty;
    {
        const std::vector<double> losses{1, 2, 3};
        const auto mass = optimal_loss_masses(losses, empty);
        CHECK(mass[0] == doctest::Approx(1.0 / 6.0));
        CHECK(mass[1] == doctest::Approx(2.0 / 6.0));
        CHECK(mass[2] == doctest::Approx(3.0 / 6.0));

        const std::vector<std::size_t> history{2};
        const auto rest = optimal_loss_masses(losses, history);
        CHECK(rest[0] == doctest::Approx(1.0 / 3.0));
        CHECK(rest[1] == doctest::Approx(2.0 / 3.0));
        CHECK(rest[2] == 0.0);
    }
    {
        const std::vector<double> losses{0, 5};
        const auto mass = optimal_loss_masses(losses, empty);
        CHECK(mass[0] == 0.0);
        CHECK(mass[1] == doctest::Approx(1.0));
    }
    const std::vector<double> zeros{0, 0};
    CHECK_THROWS_AS(optimal_loss_masses(zeros, empty), DegenerateProposalError);
    const std::vector<double> negative{-1, 2};
    CHECK_THROWS_AS(optimal_loss_masses(negative, empty), ProposalError);
}

TEST_CASE("geometric score sums squared distances to the history") {
    const LabeledPool pool = feature_pool({0, 1, 3});
    const std::vector<std::size_t> h0{0};
    CHECK(geometric_score(2, h0, pool) == doctest::Approx(9.0));
    CHECK(geometric_score(2, {}, pool) == 0.0);
    const std::vector<std::size_t> h01{0, 1};
    CHECK(geometric_score(2, h01, pool) == doctest::Approx(13.0));
}

TEST_CASE("every rule emits a normalized distribution with the right support") {
    const LabeledPool pool =
        feature_pool({-1.1, 0.2, 0.3, 1.2, 1.4}, {0.5, 1.0, 1.5, 2.0, 2.5});
    const std::vector<ProposalRule> rules = {
        ProposalRule::Uniform(),
        ProposalRule::Boltzmann(2.0),
        ProposalRule::GeometricBoltzmann(1.0),
        ProposalRule::EpsilonGreedy(0.2),
        ProposalRule::OptimalLoss(),
    };
    const std::vector<std::vector<std::size_t>> histories = {{}, {0}, {3, 1}, {2, 4, 0}};
    for (const auto& rule : rules) {
        for (const auto& history : histories) {
            const auto mass = rule.masses(history, pool);
            CHECK(std::abs(total(mass) - 1.0) <= 1e-12);
            const std::size_t unsampled = pool.size() - history.size();
            for (std::size_t i : history) CHECK(mass[i] == 0.0);
            for (std::size_t i = 0; i < pool.size(); ++i) {
                if (std::find(history.begin(), history.end(), i) != history.end()) continue;
                if (rule.kind() == ProposalKind::epsilon_greedy)
                    CHECK(mass[i] >= 0.2 / static_cast<double>(unsampled) - 1e-15);
                else if (rule.kind() != ProposalKind::optimal_loss)
                    CHECK(mass[i] > 0.0);
            }
        }
    }
}

TEST_CASE("geometric-boltzmann composes max-normalized scores with softmax") {
    const LabeledPool pool = feature_pool({-1.0, 0.1, 0.4, 1.3});
    const std::vector<std::size_t> history{1};
    const auto composed = ProposalRule::GeometricBoltzmann(1.0).masses(history, pool);

    std::vector<double> scores(pool.size(), 0.0);
    double top = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (i == 1) continue;
        scores[i] = geometric_score(i, history, pool);
        top = std::max(top, scores[i]);
    }
    for (double& s : scores) s /= top;
    const auto manual = boltzmann_masses(scores, 1.0, history);
    for (std::size_t i = 0; i < pool.size(); ++i)
        CHECK(composed[i] == doctest::Approx(manual[i]).epsilon(1e-14));
}

TEST_CASE("epsilon-greedy rule puts the spike on the best-scoring index") {
    // x = 3 is farthest from the sampled x = 0; ties would break low.
    const LabeledPool pool = feature_pool({0, 1, 3, 2});
    const std::vector<std::size_t> history{0};
    const auto mass = ProposalRule::EpsilonGreedy(0.1).masses(history, pool);
    CHECK(mass[2] == doctest::Approx(0.9 + 0.1 / 3.0));
    CHECK(mass[1] == doctest::Approx(0.1 / 3.0));
    CHECK(mass[3] == doctest::Approx(0.1 / 3.0));
    CHECK(mass[0] == 0.0);
}

TEST_CASE("ignored indices keep zero mass and the rest renormalizes") {
    const LabeledPool pool = feature_pool({0, 1, 2, 3, 4}, {1, 1, 1, 1, 1});
    const auto rule = ProposalRule::Uniform().with_ignored({1, 3});
    CHECK(rule.partial_support());
    const auto mass = rule.masses({}, pool);
    CHECK(mass[1] == 0.0);
    CHECK(mass[3] == 0.0);
    CHECK(mass[0] == doctest::Approx(1.0 / 3.0));
    CHECK(std::abs(total(mass) - 1.0) <= 1e-12);

    const std::vector<std::size_t> history{0, 2};
    const auto later = rule.masses(history, pool);
    CHECK(later[4] == doctest::Approx(1.0));
}
