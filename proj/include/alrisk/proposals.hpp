#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "alrisk/pool.hpp"

namespace alrisk {

// Acquisition proposal distributions over the indices not yet sampled.
//
// Every mass function returns a full-length vector (size N): exactly zero on
// sampled indices, nonnegative on unsampled ones, summing to 1 within 1e-12.

enum class ProposalKind {
    uniform,
    boltzmann,
    epsilon_greedy,
    optimal_loss,
    geometric_boltzmann,
};

std::string to_string(ProposalKind kind);
ProposalKind proposal_kind_from_string(const std::string& name);

// Score of one candidate given acquisition history: a pure function of
// (candidate, history, pool).
using ScoreFn =
    std::function<double(std::size_t candidate, std::span<const std::size_t> history,
                         const LabeledPool& pool)>;

// 1/(N - m + 1) on each unsampled index, where m - 1 = |history|.
std::vector<double> uniform_masses(std::span<const std::size_t> history, std::size_t n);

// Softmax of temperature * scores over unsampled indices, max-shifted so the
// exponent never overflows. temperature == 0 collapses to uniform.
std::vector<double> boltzmann_masses(std::span<const double> scores, double temperature,
                                     std::span<const std::size_t> history);

// 1 - eps + eps/U on best_index, eps/U on every other unsampled index, where
// U counts unsampled indices. Requires 0 < eps <= 1 (eps == 0 would leave
// indices with zero mass) and best_index unsampled.
std::vector<double> epsilon_greedy_masses(std::size_t best_index, double epsilon,
                                          std::span<const std::size_t> history,
                                          std::size_t n);

// Mass proportional to (nonnegative) loss over unsampled indices. Exact for
// both weighted estimators: every trajectory it generates evaluates to the
// pool risk. DegenerateProposalError when all unsampled losses are zero.
std::vector<double> optimal_loss_masses(std::span<const double> losses,
                                        std::span<const std::size_t> history);

// Sum of squared distances from the candidate to every already-sampled point.
// Empty history scores 0 (all candidates tie).
double geometric_score(std::size_t candidate, std::span<const std::size_t> history,
                       const LabeledPool& pool);

// A configured proposal. Immutable and shareable; `masses` is a pure function
// of (history, pool).
class ProposalRule {
public:
    static ProposalRule Uniform();
    // score defaults to geometric_score when empty
    static ProposalRule Boltzmann(double temperature, ScoreFn score = {});
    static ProposalRule EpsilonGreedy(double epsilon, ScoreFn score = {});
    static ProposalRule OptimalLoss();
    // geometric scores, max-normalized over unsampled indices, Boltzmann at
    // inverse temperature beta
    static ProposalRule GeometricBoltzmann(double beta = 1.0);

    // Explicit partial-support variant: the returned rule assigns zero mass to
    // `ignored` forever. Only meaningful for bias studies; the estimators then
    // carry a known offset of -(1/N) * sum of ignored losses.
    ProposalRule with_ignored(std::vector<std::size_t> ignored) const;

    std::vector<double> masses(std::span<const std::size_t> history,
                               const LabeledPool& pool) const;

    ProposalKind kind() const { return kind_; }
    double temperature() const { return temperature_; }
    double epsilon() const { return epsilon_; }
    bool partial_support() const { return !ignored_.empty(); }
    const std::vector<std::size_t>& ignored() const { return ignored_; }

private:
    ProposalRule(ProposalKind kind, double temperature, double epsilon, ScoreFn score)
        : kind_(kind), temperature_(temperature), epsilon_(epsilon), score_(std::move(score)) {}

    ProposalKind kind_;
    double temperature_ = 1.0;
    double epsilon_ = 0.1;
    ScoreFn score_;
    std::vector<std::size_t> ignored_;
};

} // namespace alrisk
