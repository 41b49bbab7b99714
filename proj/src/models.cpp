#include "alrisk/models.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "alrisk/errors.hpp"
#include "alrisk/estimators.hpp"

namespace alrisk {

namespace {
constexpr double kRidge = 1e-10;
}

std::string to_string(FeatureMapKind kind) {
    return kind == FeatureMapKind::identity ? "identity" : "polynomial";
}

FeatureMapKind feature_map_kind_from_string(const std::string& name) {
    if (name == "identity") return FeatureMapKind::identity;
    if (name == "polynomial") return FeatureMapKind::polynomial;
    throw ConfigError("unknown feature map: " + name);
}

std::size_t FeatureMap::output_dim(std::size_t input_dim) const {
    if (kind == FeatureMapKind::identity) return input_dim + 1;
    if (input_dim != 1)
        throw ArgumentError("polynomial feature map expects scalar input");
    if (degree < 0) throw ArgumentError("polynomial degree must be >= 0");
    return static_cast<std::size_t>(degree) + 1;
}

std::vector<double> FeatureMap::apply(std::span<const double> input) const {
    std::vector<double> out;
    out.reserve(output_dim(input.size()));
    out.push_back(1.0);
    if (kind == FeatureMapKind::identity) {
        out.insert(out.end(), input.begin(), input.end());
    } else {
        if (input.size() != 1)
            throw ArgumentError("polynomial feature map expects scalar input");
        double power = 1.0;
        for (int d = 1; d <= degree; ++d) {
            power *= input[0];
            out.push_back(power);
        }
    }
    return out;
}

double LinearModel::predict(std::span<const double> input) const {
    const auto phi = feature_map.apply(input);
    if (phi.size() != coefficients.size())
        throw ArgumentError("LinearModel: coefficient/feature dimension mismatch");
    double y = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) y += coefficients[j] * phi[j];
    return y;
}

double squared_error_loss(double prediction, double target) {
    const double diff = prediction - target;
    return diff * diff;
}

LinearModel fit_weighted_least_squares(const WeightedSampleSet& samples,
                                       const FeatureMap& map) {
    const std::size_t count = samples.size();
    if (count == 0) throw ArgumentError("fit_weighted_least_squares: no samples");
    if (samples.targets.size() != count || samples.weights.size() != count)
        throw ArgumentError("fit_weighted_least_squares: input/target/weight lengths differ");
    for (double w : samples.weights)
        if (!std::isfinite(w))
            throw ArgumentError("fit_weighted_least_squares: non-finite weight");

    const std::size_t dim = map.output_dim(samples.inputs.front().size());
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd phi(dim);
    for (std::size_t m = 0; m < count; ++m) {
        const auto features = map.apply(samples.inputs[m]);
        for (std::size_t j = 0; j < dim; ++j) phi(static_cast<Eigen::Index>(j)) = features[j];
        normal.noalias() += samples.weights[m] * phi * phi.transpose();
        rhs.noalias() += samples.weights[m] * samples.targets[m] * phi;
    }
    normal.diagonal().array() += kRidge;

    const Eigen::VectorXd theta = normal.fullPivLu().solve(rhs);
    if (!theta.allFinite())
        throw SingularSystemError("fit_weighted_least_squares: non-finite solution");

    LinearModel model;
    model.feature_map = map;
    model.coefficients.assign(theta.data(), theta.data() + theta.size());
    return model;
}

double population_risk_proxy(const LinearModel& model, std::span<const double> eval_inputs,
                             std::span<const double> eval_targets) {
    if (eval_inputs.empty() || eval_inputs.size() != eval_targets.size())
        throw ArgumentError("population_risk_proxy: evaluation set empty or mismatched");
    double sum = 0.0;
    for (std::size_t i = 0; i < eval_inputs.size(); ++i)
        sum += squared_error_loss(model.predict_scalar(eval_inputs[i]), eval_targets[i]);
    return sum / static_cast<double>(eval_inputs.size());
}

std::vector<double> pool_losses_under(const LabeledPool& pool, const LinearModel& model) {
    std::vector<double> losses;
    losses.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i)
        losses.push_back(squared_error_loss(model.predict(pool.features[i]), pool.labels[i]));
    return losses;
}

Trajectory trajectory_under_model(const Trajectory& traj, const LabeledPool& pool,
                                  const LinearModel& model) {
    Trajectory out = traj;
    for (auto& step : out.steps) {
        const double pred = model.predict(pool.features[step.index]);
        step.loss = squared_error_loss(pred, pool.labels[step.index]);
    }
    return out;
}

double overfitting_bias(const LabeledPool& pool, const Trajectory& traj,
                        const LinearModel& model_star, double risk_proxy) {
    const Trajectory refreshed = trajectory_under_model(traj, pool, model_star);
    return risk_proxy - lure_estimate(refreshed).value;
}

} // namespace alrisk
