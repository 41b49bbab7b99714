#include "alrisk/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alrisk/errors.hpp"

namespace alrisk {

std::string to_string(ProposalKind kind) {
    switch (kind) {
        case ProposalKind::uniform: return "uniform";
        case ProposalKind::boltzmann: return "boltzmann";
        case ProposalKind::epsilon_greedy: return "epsilon_greedy";
        case ProposalKind::optimal_loss: return "optimal_loss";
        case ProposalKind::geometric_boltzmann: return "geometric_boltzmann";
    }
    return "unknown";
}

ProposalKind proposal_kind_from_string(const std::string& name) {
    if (name == "uniform") return ProposalKind::uniform;
    if (name == "boltzmann") return ProposalKind::boltzmann;
    if (name == "epsilon_greedy") return ProposalKind::epsilon_greedy;
    if (name == "optimal_loss") return ProposalKind::optimal_loss;
    if (name == "geometric_boltzmann") return ProposalKind::geometric_boltzmann;
    throw ConfigError("unknown proposal kind: " + name);
}

namespace {

// Indices not in `history` (and not in `ignored`), ascending.
std::vector<std::size_t> available_indices(std::span<const std::size_t> history, std::size_t n,
                                           std::span<const std::size_t> ignored = {}) {
    std::vector<bool> taken(n, false);
    for (std::size_t i : history) {
        if (i >= n) throw ArgumentError("proposal: history index out of range");
        taken[i] = true;
    }
    for (std::size_t i : ignored) {
        if (i >= n) throw ArgumentError("proposal: ignored index out of range");
        taken[i] = true;
    }
    std::vector<std::size_t> available;
    available.reserve(n - std::min(n, history.size()));
    for (std::size_t i = 0; i < n; ++i)
        if (!taken[i]) available.push_back(i);
    return available;
}

std::vector<double> uniform_over(const std::vector<std::size_t>& available, std::size_t n) {
    std::vector<double> mass(n, 0.0);
    const double q = 1.0 / static_cast<double>(available.size());
    for (std::size_t i : available) mass[i] = q;
    return mass;
}

std::vector<double> softmax_over(const std::vector<std::size_t>& available,
                                 std::span<const double> scores, double temperature,
                                 std::size_t n) {
    std::vector<double> mass(n, 0.0);
    if (temperature == 0.0) return uniform_over(available, n);

    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i : available) {
        if (!std::isfinite(scores[i]))
            throw ArgumentError("boltzmann: non-finite score on unsampled index");
        top = std::max(top, temperature * scores[i]);
    }
    double total = 0.0;
    for (std::size_t i : available) {
        const double e = std::exp(temperature * scores[i] - top);
        mass[i] = e;
        total += e;
    }
    for (std::size_t i : available) mass[i] /= total;
    return mass;
}

std::vector<double> epsilon_greedy_over(const std::vector<std::size_t>& available,
                                        std::size_t best_index, double epsilon, std::size_t n) {
    const double unsampled = static_cast<double>(available.size());
    std::vector<double> mass(n, 0.0);
    for (std::size_t i : available) mass[i] = epsilon / unsampled;
    mass[best_index] += 1.0 - epsilon;
    return mass;
}

std::vector<double> loss_proportional_over(const std::vector<std::size_t>& available,
                                           std::span<const double> losses, std::size_t n) {
    double total = 0.0;
    for (std::size_t i : available) {
        if (losses[i] < 0.0)
            throw ProposalError("optimal_loss: negative loss on unsampled index");
        total += losses[i];
    }
    if (total <= 0.0)
        throw DegenerateProposalError("optimal_loss: all unsampled losses are zero");
    std::vector<double> mass(n, 0.0);
    for (std::size_t i : available) mass[i] = losses[i] / total;
    return mass;
}

void require_not_exhausted(const std::vector<std::size_t>& available) {
    if (available.empty()) throw ArgumentError("proposal: history exhausts the pool");
}

} // namespace

std::vector<double> uniform_masses(std::span<const std::size_t> history, std::size_t n) {
    auto available = available_indices(history, n);
    require_not_exhausted(available);
    return uniform_over(available, n);
}

std::vector<double> boltzmann_masses(std::span<const double> scores, double temperature,
                                     std::span<const std::size_t> history) {
    if (!std::isfinite(temperature))
        throw ArgumentError("boltzmann: temperature must be finite");
    auto available = available_indices(history, scores.size());
    require_not_exhausted(available);
    return softmax_over(available, scores, temperature, scores.size());
}

std::vector<double> epsilon_greedy_masses(std::size_t best_index, double epsilon,
                                          std::span<const std::size_t> history,
                                          std::size_t n) {
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw ArgumentError("epsilon_greedy: epsilon must lie in (0, 1]");
    auto available = available_indices(history, n);
    require_not_exhausted(available);
    if (std::find(available.begin(), available.end(), best_index) == available.end())
        throw ArgumentError("epsilon_greedy: best_index already sampled");
    return epsilon_greedy_over(available, best_index, epsilon, n);
}

std::vector<double> optimal_loss_masses(std::span<const double> losses,
                                        std::span<const std::size_t> history) {
    auto available = available_indices(history, losses.size());
    require_not_exhausted(available);
    return loss_proportional_over(available, losses, losses.size());
}

double geometric_score(std::size_t candidate, std::span<const std::size_t> history,
                       const LabeledPool& pool) {
    if (candidate >= pool.size()) throw ArgumentError("geometric_score: candidate out of range");
    const auto& x = pool.features[candidate];
    double score = 0.0;
    for (std::size_t k : history) {
        const auto& xk = pool.features[k];
        double dist2 = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double diff = xk[d] - x[d];
            dist2 += diff * diff;
        }
        score += dist2;
    }
    return score;
}

ProposalRule ProposalRule::Uniform() {
    return ProposalRule(ProposalKind::uniform, 0.0, 0.0, {});
}

ProposalRule ProposalRule::Boltzmann(double temperature, ScoreFn score) {
    if (!std::isfinite(temperature))
        throw ConfigError("boltzmann proposal: temperature must be finite");
    return ProposalRule(ProposalKind::boltzmann, temperature, 0.0, std::move(score));
}

ProposalRule ProposalRule::EpsilonGreedy(double epsilon, ScoreFn score) {
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw ConfigError("epsilon_greedy proposal: epsilon must lie in (0, 1]");
    return ProposalRule(ProposalKind::epsilon_greedy, 0.0, epsilon, std::move(score));
}

ProposalRule ProposalRule::OptimalLoss() {
    return ProposalRule(ProposalKind::optimal_loss, 0.0, 0.0, {});
}

ProposalRule ProposalRule::GeometricBoltzmann(double beta) {
    if (!std::isfinite(beta))
        throw ConfigError("geometric_boltzmann proposal: beta must be finite");
    return ProposalRule(ProposalKind::geometric_boltzmann, beta, 0.0, {});
}

ProposalRule ProposalRule::with_ignored(std::vector<std::size_t> ignored) const {
    ProposalRule out = *this;
    std::sort(ignored.begin(), ignored.end());
    ignored.erase(std::unique(ignored.begin(), ignored.end()), ignored.end());
    out.ignored_ = std::move(ignored);
    return out;
}

std::vector<double> ProposalRule::masses(std::span<const std::size_t> history,
                                         const LabeledPool& pool) const {
    const std::size_t n = pool.size();
    auto available = available_indices(history, n, ignored_);
    require_not_exhausted(available);

    auto scores_of = [&](bool normalize) {
        const ScoreFn& fn = score_ ? score_ : ScoreFn(geometric_score);
        std::vector<double> scores(n, 0.0);
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t i : available) {
            scores[i] = fn(i, history, pool);
            top = std::max(top, scores[i]);
        }
        if (normalize && top > 0.0)
            for (std::size_t i : available) scores[i] /= top;
        return scores;
    };

    switch (kind_) {
        case ProposalKind::uniform:
            return uniform_over(available, n);
        case ProposalKind::boltzmann:
            return softmax_over(available, scores_of(false), temperature_, n);
        case ProposalKind::geometric_boltzmann:
            return softmax_over(available, scores_of(true), temperature_, n);
        case ProposalKind::epsilon_greedy: {
            const auto scores = scores_of(false);
            std::size_t best = available.front(); // ties break to the lowest index
            for (std::size_t i : available)
                if (scores[i] > scores[best]) best = i;
            return epsilon_greedy_over(available, best, epsilon_, n);
        }
        case ProposalKind::optimal_loss: {
            if (!pool.has_losses())
                throw ConfigError("optimal_loss proposal requires cached pool losses");
            return loss_proportional_over(available, *pool.losses, n);
        }
    }
    throw ConfigError("proposal: unknown kind");
}

} // namespace alrisk
