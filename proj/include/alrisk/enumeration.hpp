#pragma once

#include <cstdint>
#include <vector>

#include "alrisk/estimators.hpp"
#include "alrisk/pool.hpp"
#include "alrisk/proposals.hpp"

namespace alrisk {

// Exact conditional-on-pool moments by brute force: every ordered M-sequence
// of distinct indices is visited, weighted by the product of the step masses
// the proposal assigns along it. Sampling never enters; this is the
// independent oracle the estimator algebra is checked against.

struct EnumOptions {
    // Guard against factorial blowup; P(10,6) = 151,200 sequences. Raise
    // explicitly if a larger case is genuinely needed.
    std::size_t max_pool = 10;
    std::size_t max_draws = 6;
    // Rules constructed with with_ignored() are rejected unless this is set:
    // a partial-support run measures a known bias rather than unbiasedness.
    bool allow_partial_support = false;
    // Test-only: shifts every pure weight by +1/N so the self-check machinery
    // can demonstrate that it catches a broken estimator.
    bool fault_pure_weight_shift = false;
};

struct ExactMoments {
    double mean = 0.0;
    double variance = 0.0;
    // E[weight_m] for the chosen estimator kind, m = 1..M. For LURE these are
    // the E[v_m] that must all equal 1 under any valid full-support proposal.
    std::vector<double> per_step_weight_means;
    std::uint64_t trajectory_count = 0; // N!/(N-M)! under full support
    double probability_mass = 0.0;      // must come out as 1
};

struct VarianceDecomposition {
    double pure_variance_direct = 0.0;
    double pure_variance_decomposed = 0.0; // (1/M^2) sum_m E_m
    double lure_variance_direct = 0.0;
    double lure_variance_decomposed = 0.0; // (1/M^2) sum_m c_m^2 E_m
    // E_m = E over histories of Var[w_m * loss | history], w_m = 1/(N q_m).
    std::vector<double> step_conditional_variances;
    // F_m = (N/(N-m+1))^2 E_m, the weight-normalized form; reported so that
    // an ordering reversal can be inspected against the pairing assumption.
    std::vector<double> weight_normalized_variances;
    bool lure_not_above_pure = false;
    std::uint64_t trajectory_count = 0;
};

ExactMoments enumerate_moments(const LabeledPool& pool, const ProposalRule& rule,
                               std::size_t draws, EstimatorKind kind,
                               const EnumOptions& options = {});

// E[v_m] for m = 1..M (the LURE weight expectations).
std::vector<double> enumerate_weight_expectations(const LabeledPool& pool,
                                                  const ProposalRule& rule,
                                                  std::size_t draws,
                                                  const EnumOptions& options = {});

VarianceDecomposition enumerate_variance_decomposition(const LabeledPool& pool,
                                                       const ProposalRule& rule,
                                                       std::size_t draws,
                                                       const EnumOptions& options = {});

} // namespace alrisk
