#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alrisk/rng.hpp"

namespace alrisk {

class ProposalRule;

// Pool of N candidate points. Labels live here (the "oracle" side); losses are
// cached only when the evaluated function is fixed, and stay empty while a
// model is being trained (losses are then recomputed per candidate model).
struct LabeledPool {
    std::vector<std::vector<double>> features; // N x d
    std::vector<double> labels;                // N
    std::optional<std::vector<double>> losses; // N, cached for a fixed function

    std::size_t size() const { return features.size(); }
    bool has_losses() const { return losses.has_value(); }

    // Throws ArgumentError if the lengths disagree, N == 0, or cached losses
    // are non-finite.
    void validate() const;
};

// Copy of `pool` with the loss cache replaced.
LabeledPool with_losses(const LabeledPool& pool, std::vector<double> losses);

// Mean cached loss over the whole pool. ConfigError without a loss cache.
double pool_empirical_risk(const LabeledPool& pool);

struct TrajectoryStep {
    std::size_t index; // in [0, N)
    double mass;       // proposal probability of this index at draw time, in (0, 1]
    double loss;       // cached pool loss at index (NaN when the pool has no cache)
};

// Ordered record of one acquisition run: M distinct indices with the proposal
// mass each was drawn under. Immutable after construction by convention.
struct Trajectory {
    std::vector<TrajectoryStep> steps;
    std::size_t pool_size = 0;

    std::size_t draws() const { return steps.size(); }
    std::vector<std::size_t> indices() const;
    std::vector<double> masses() const;
    std::vector<double> step_losses() const;
};

struct TrajectoryViolation {
    std::size_t step;
    std::string message;
};

// First violation found (duplicate index, index out of range, zero or
// out-of-range mass, loss inconsistent with the pool cache), or nullopt.
std::optional<TrajectoryViolation> validate_trajectory(const Trajectory& traj,
                                                       const LabeledPool& pool);

// Sample `draws` distinct indices sequentially from `rule`, recording the mass
// the rule assigned to each drawn index. Deterministic in the generator state.
//
// Throws ArgumentError for draws == 0 or draws > N, ProposalError if the rule
// emits negative or unnormalized masses.
Trajectory sample_trajectory(const LabeledPool& pool, const ProposalRule& rule,
                             std::size_t draws, Philox4x64& rng);

// Convenience overload: fresh generator with key (seed, 0).
Trajectory sample_trajectory(const LabeledPool& pool, const ProposalRule& rule,
                             std::size_t draws, std::uint64_t seed);

} // namespace alrisk
