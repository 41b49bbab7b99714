#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "alrisk/pool.hpp"

namespace alrisk {

enum class FeatureMapKind { identity, polynomial };

std::string to_string(FeatureMapKind kind);
FeatureMapKind feature_map_kind_from_string(const std::string& name);

// identity: raw input with a leading intercept feature, [1, x_1, ..., x_d].
// polynomial(degree): scalar input only, [1, x, x^2, ..., x^degree].
struct FeatureMap {
    FeatureMapKind kind = FeatureMapKind::identity;
    int degree = 1; // polynomial only

    std::size_t output_dim(std::size_t input_dim) const;
    std::vector<double> apply(std::span<const double> input) const;
};

struct LinearModel {
    std::vector<double> coefficients; // one per output feature, intercept included
    FeatureMap feature_map;

    double predict(std::span<const double> input) const;
    double predict_scalar(double x) const { return predict(std::span<const double>(&x, 1)); }
};

// Training set with one weight per point; weights are whatever an estimator's
// per-point coefficients came out as and are passed to the solver unmodified.
struct WeightedSampleSet {
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;
    std::vector<double> weights;

    std::size_t size() const { return inputs.size(); }
};

double squared_error_loss(double prediction, double target);

// argmin over theta of sum_m weight_m * (f_theta(x_m) - y_m)^2, solved via the
// normal equations with a fixed ridge term 1e-10 on the diagonal for rank
// safety. The same ridge applies to every fit, weighted or not, so fits are
// directly comparable. SingularSystemError if the solution is non-finite.
LinearModel fit_weighted_least_squares(const WeightedSampleSet& samples,
                                       const FeatureMap& map);

// Mean squared error on a large held-out sample standing in for the
// population risk.
double population_risk_proxy(const LinearModel& model, std::span<const double> eval_inputs,
                             std::span<const double> eval_targets);

// Squared-error losses of `model` at every pool point.
std::vector<double> pool_losses_under(const LabeledPool& pool, const LinearModel& model);

// Same trajectory (indices and masses) with losses recomputed under `model`.
Trajectory trajectory_under_model(const Trajectory& traj, const LabeledPool& pool,
                                  const LinearModel& model);

// Overfitting bias of a model trained on the trajectory's points: the proxy
// for the population risk minus the levelled estimate with losses recomputed
// under that model. Positive when the model explains its own training points
// better than fresh data.
double overfitting_bias(const LabeledPool& pool, const Trajectory& traj,
                        const LinearModel& model_star, double risk_proxy);

} // namespace alrisk
