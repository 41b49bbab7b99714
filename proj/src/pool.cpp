#include "alrisk/pool.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>

#include "alrisk/errors.hpp"
#include "alrisk/proposals.hpp"

namespace alrisk {

void LabeledPool::validate() const {
    const std::size_t n = features.size();
    if (n == 0) throw ArgumentError("LabeledPool: pool must contain at least one point");
    if (labels.size() != n)
        throw ArgumentError("LabeledPool: labels length does not match features");
    if (losses) {
        if (losses->size() != n)
            throw ArgumentError("LabeledPool: cached losses length does not match features");
        for (double loss : *losses)
            if (!std::isfinite(loss))
                throw ArgumentError("LabeledPool: cached losses must be finite");
    }
}

LabeledPool with_losses(const LabeledPool& pool, std::vector<double> losses) {
    LabeledPool out = pool;
    out.losses = std::move(losses);
    out.validate();
    return out;
}

double pool_empirical_risk(const LabeledPool& pool) {
    if (!pool.has_losses())
        throw ConfigError("pool_empirical_risk: pool has no cached losses");
    double sum = 0.0;
    for (double loss : *pool.losses) sum += loss;
    return sum / static_cast<double>(pool.size());
}

std::vector<std::size_t> Trajectory::indices() const {
    std::vector<std::size_t> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.index);
    return out;
}

std::vector<double> Trajectory::masses() const {
    std::vector<double> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.mass);
    return out;
}

std::vector<double> Trajectory::step_losses() const {
    std::vector<double> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.loss);
    return out;
}

std::optional<TrajectoryViolation> validate_trajectory(const Trajectory& traj,
                                                       const LabeledPool& pool) {
    if (traj.pool_size != pool.size())
        return TrajectoryViolation{0, "pool size mismatch"};
    if (traj.steps.empty() || traj.steps.size() > pool.size())
        return TrajectoryViolation{0, "draw count outside [1, N]"};

    std::unordered_set<std::size_t> seen;
    for (std::size_t m = 0; m < traj.steps.size(); ++m) {
        const auto& step = traj.steps[m];
        if (step.index >= pool.size()) return TrajectoryViolation{m, "index out of range"};
        if (!seen.insert(step.index).second) return TrajectoryViolation{m, "duplicate index"};
        if (!(step.mass > 0.0)) return TrajectoryViolation{m, "zero mass"};
        if (step.mass > 1.0 + 1e-12) return TrajectoryViolation{m, "mass above 1"};
        if (pool.has_losses()) {
            const double expected = (*pool.losses)[step.index];
            if (step.loss != expected) return TrajectoryViolation{m, "loss mismatch"};
        }
    }
    return std::nullopt;
}

Trajectory sample_trajectory(const LabeledPool& pool, const ProposalRule& rule,
                             std::size_t draws, Philox4x64& rng) {
    const std::size_t n = pool.size();
    if (draws == 0) throw ArgumentError("sample_trajectory: draw count must be >= 1");
    if (draws > n) throw ArgumentError("sample_trajectory: more draws than pool points");

    Trajectory traj;
    traj.pool_size = n;
    traj.steps.reserve(draws);

    std::vector<std::size_t> history;
    history.reserve(draws);

    for (std::size_t m = 0; m < draws; ++m) {
        const std::vector<double> mass = rule.masses(history, pool);

        double total = 0.0;
        for (double q : mass) {
            if (q < 0.0) throw ProposalError("sample_trajectory: negative proposal mass");
            total += q;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw ProposalError("sample_trajectory: proposal masses do not sum to 1");

        const double u = rng.next_double();
        double cumulative = 0.0;
        std::size_t chosen = n; // sentinel
        std::size_t last_positive = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (mass[i] <= 0.0) continue;
            last_positive = i;
            cumulative += mass[i];
            if (u < cumulative) {
                chosen = i;
                break;
            }
        }
        if (chosen == n) chosen = last_positive; // u landed in rounding slack at the top
        if (chosen == n) throw ProposalError("sample_trajectory: proposal has empty support");

        const double loss =
            pool.has_losses() ? (*pool.losses)[chosen] : std::numeric_limits<double>::quiet_NaN();
        traj.steps.push_back(TrajectoryStep{chosen, mass[chosen], loss});
        history.push_back(chosen);
    }
    return traj;
}

Trajectory sample_trajectory(const LabeledPool& pool, const ProposalRule& rule,
                             std::size_t draws, std::uint64_t seed) {
    Philox4x64 rng(seed, 0);
    return sample_trajectory(pool, rule, draws, rng);
}

} // namespace alrisk
