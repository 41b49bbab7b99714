#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "alrisk/pool.hpp"

namespace alrisk {

// Risk estimators over an acquisition trajectory of M draws from a pool of N
// points, each draw recorded with the proposal mass q_m it was taken under.
//
// All three estimators share the shape (1/M) * sum_m weight_m * loss_m and
// differ only in the weights:
//
//   naive:  weight_m = 1                                  (biased under active sampling)
//   pure:   weight_m = 1/(N q_m) + (M - m)/N              (each term unbiased for the risk)
//   lure:   weight_m = 1 + (N-M)/(N-m) * (1/((N-m+1) q_m) - 1)
//                                                         (every weight has expectation 1)
//
// Weights are computed from recorded trajectory masses only, never recomputed
// from the proposal, so this module is proposal-agnostic.

enum class EstimatorKind { naive, pure, lure };

std::string to_string(EstimatorKind kind);
EstimatorKind estimator_kind_from_string(const std::string& name);

struct WeightedRisk {
    EstimatorKind kind;
    double value;
    std::vector<double> per_point_weights; // coefficient on each drawn loss
};

// Constants c_m = N(N-M) / ((N-m)(N-m+1)) that level the per-term estimators:
// they sum to M for M < N (telescoping) and vanish identically at M = N.
struct LureConstants {
    std::vector<double> c;
    std::size_t draws = 0;
    std::size_t pool_size = 0;
};

LureConstants lure_constants(std::size_t draws, std::size_t pool_size);

std::vector<double> pure_weights(std::span<const double> masses, std::size_t draws,
                                 std::size_t pool_size);

// At M = N every weight is exactly 1 (the vanishing N-M factor takes
// precedence over the N-m = 0 denominator at m = M).
std::vector<double> lure_weights(std::span<const double> masses, std::size_t draws,
                                 std::size_t pool_size);

WeightedRisk naive_estimate(const Trajectory& traj);

// Evaluates both algebraic forms of the estimator (the per-term form a_m and
// the single-sum weight form) and requires them to agree to 1e-10 relative;
// disagreement raises InternalConsistencyError.
WeightedRisk pure_estimate(const Trajectory& traj);

WeightedRisk lure_estimate(const Trajectory& traj);

// Expected shift of both weighted estimators when the proposal permanently
// assigns zero mass to `ignored`: -(1/N) * sum of ignored losses.
double partial_support_bias(const LabeledPool& pool, std::span<const std::size_t> ignored);

} // namespace alrisk
