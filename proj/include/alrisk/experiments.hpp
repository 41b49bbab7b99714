#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "alrisk/estimators.hpp"
#include "alrisk/models.hpp"
#include "alrisk/pool.hpp"
#include "alrisk/proposals.hpp"
#include "alrisk/results.hpp"
#include "alrisk/synth_data.hpp"

namespace alrisk {

enum class ExperimentKind {
    bias_fixed_function,
    downstream_training,
    ofb,
    oracle_check,
    sweep,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct PoolSpec {
    enum class Kind { three_cluster, population };
    Kind kind = Kind::three_cluster;
    // three_cluster: exact per-segment counts. Default 5/48/48 gives N = 101;
    // the literal cluster sizes 5/96/96 (N = 197) are available as an
    // alternate configuration.
    std::vector<std::size_t> cluster_counts{5, 48, 48};
    std::size_t sample_count = 101; // population kind: i.i.d. sample size
};

struct ProposalSpec {
    ProposalKind kind = ProposalKind::geometric_boltzmann;
    double temperature = 1.0; // boltzmann T / geometric beta
    double epsilon = 0.1;

    ProposalRule build() const;
};

struct ModelSpec {
    FeatureMapKind feature_map = FeatureMapKind::identity;
    int degree = 1;
    // Disjoint population sample the fixed (pre-trained) function is fit on.
    std::size_t fit_sample_count = 200;

    FeatureMap map() const { return FeatureMap{feature_map, degree}; }
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::bias_fixed_function;
    PoolSpec pool;
    ProposalSpec proposal;
    ModelSpec model;
    std::vector<EstimatorKind> estimators{EstimatorKind::naive, EstimatorKind::pure,
                                          EstimatorKind::lure};
    std::vector<std::size_t> m_grid{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    std::size_t trajectories = 1000;
    std::size_t eval_points = 10100;
    std::uint64_t root_seed = 1;
    std::size_t workers = 1;
    std::string output_path;
    std::string format = "csv";
    bool force_unit_weights = false; // debug: every objective trains unweighted

    void validate() const;
};

// Documented defaults per subcommand (pool, grid, trajectory count, model).
ExperimentConfig default_config(ExperimentKind kind);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// Substream ids under one root seed, so parallel and serial runs agree.
namespace streams {
constexpr std::uint64_t kPool = (1ull << 40);
constexpr std::uint64_t kFixedModel = (1ull << 40) + 1;
constexpr std::uint64_t kEval = (1ull << 40) + 2;
constexpr std::uint64_t kOraclePoolBase = (1ull << 41);
constexpr std::uint64_t kSweepPoolBase = (1ull << 42);
inline std::uint64_t trajectory(std::size_t m_slot, std::size_t index) {
    return (static_cast<std::uint64_t>(m_slot) << 32) | static_cast<std::uint64_t>(index);
}
} // namespace streams

// Fixed-function bias measurement: estimator values vs the pool risk of a
// model trained once on a disjoint sample.
ResultSet run_bias_experiment(const ExperimentConfig& cfg);

// Downstream training: one shared trajectory per draw, three weighted fits,
// population-proxy risk of each vs the full-pool fit.
ResultSet run_downstream_experiment(const ExperimentConfig& cfg);

// Overfitting-bias measurement (rows "ofb"), plus the active-learning bias of
// the naive estimator at the fixed pre-trained function (rows "alb"), both in
// the truth-minus-estimate sign convention.
ResultSet run_ofb_experiment(const ExperimentConfig& cfg);

// Estimator MSE against the pool risk along m_grid with N = 2M per entry.
ResultSet run_sweep_experiment(const ExperimentConfig& cfg);

ResultSet run_experiment(const ExperimentConfig& cfg); // dispatch on cfg.experiment

struct OracleCheckOptions {
    std::size_t pools = 50;
    std::size_t min_pool = 3;
    std::size_t max_pool = 7;
    std::uint64_t seed = 1;
    std::size_t partial_support_cases = 2; // per pool
    // Self-test hook: corrupt the pure weights inside the checked path and
    // confirm the violations surface.
    bool inject_pure_weight_fault = false;
};

struct OracleViolation {
    std::uint64_t root_seed = 0;
    std::size_t pool_index = 0; // pool substream index within the run
    std::size_t pool_size = 0;
    std::size_t draws = 0;
    std::string proposal;
    std::string check;
    double expected = 0.0;
    double actual = 0.0;
};

struct OracleReport {
    std::size_t checks_run = 0;
    std::size_t unbiasedness_checks = 0;
    std::size_t weight_expectation_checks = 0;
    std::size_t decomposition_checks = 0;
    std::size_t ordering_checks = 0;
    // Cases where the variance-ordering theorem's pairing assumption
    // (F_m >= F_{M-m+1} for m <= M/2, computed from the enumerated F values)
    // does not hold, so the ordering carries no guarantee there. A reversal is
    // a violation only when the assumption held; an unexplained reversal
    // (assumption held, ordering broken) would contradict the theorem.
    std::size_t ordering_assumption_failures = 0;
    std::size_t partial_support_checks = 0;
    std::vector<OracleViolation> violations;

    bool passed() const { return violations.empty(); }
    std::string summary() const;
};

// Drives the enumeration oracle over randomized tiny pools and every proposal
// kind: unbiasedness, E[v_m] = 1, variance decomposition consistency, the
// LURE-vs-PURE variance ordering, and the partial-support bias formula.
OracleReport run_oracle_check(const OracleCheckOptions& options = {});

// Strided thread pool; rethrows the first worker exception after joining.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

} // namespace alrisk
