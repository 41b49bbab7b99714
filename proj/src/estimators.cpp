#include "alrisk/estimators.hpp"

#include <cmath>
#include <unordered_set>

#include "alrisk/errors.hpp"

namespace alrisk {

std::string to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::naive: return "naive";
        case EstimatorKind::pure: return "pure";
        case EstimatorKind::lure: return "lure";
    }
    return "unknown";
}

EstimatorKind estimator_kind_from_string(const std::string& name) {
    if (name == "naive") return EstimatorKind::naive;
    if (name == "pure") return EstimatorKind::pure;
    if (name == "lure") return EstimatorKind::lure;
    throw ConfigError("unknown estimator kind: " + name);
}

namespace {

void check_masses(std::span<const double> masses, std::size_t draws, std::size_t pool_size,
                  const char* who) {
    if (draws == 0 || draws > pool_size)
        throw ArgumentError(std::string(who) + ": need 1 <= M <= N");
    if (masses.size() != draws)
        throw ArgumentError(std::string(who) + ": masses length does not match M");
    for (double q : masses)
        if (!(q > 0.0)) throw ProposalError(std::string(who) + ": mass must be positive");
}

double weighted_mean(std::span<const double> weights, std::span<const double> losses) {
    double sum = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m) sum += weights[m] * losses[m];
    return sum / static_cast<double>(weights.size());
}

} // namespace

LureConstants lure_constants(std::size_t draws, std::size_t pool_size) {
    if (draws == 0 || draws > pool_size)
        throw ArgumentError("lure_constants: need 1 <= M <= N");
    const double n = static_cast<double>(pool_size);
    const double slack = n - static_cast<double>(draws); // N - M
    LureConstants out;
    out.draws = draws;
    out.pool_size = pool_size;
    out.c.resize(draws);
    for (std::size_t m = 1; m <= draws; ++m) {
        const double nm = n - static_cast<double>(m);
        out.c[m - 1] = (slack == 0.0) ? 0.0 : n * slack / (nm * (nm + 1.0));
    }
    return out;
}

std::vector<double> pure_weights(std::span<const double> masses, std::size_t draws,
                                 std::size_t pool_size) {
    check_masses(masses, draws, pool_size, "pure_weights");
    const double n = static_cast<double>(pool_size);
    std::vector<double> w(draws);
    for (std::size_t m = 1; m <= draws; ++m)
        w[m - 1] = 1.0 / (n * masses[m - 1]) + static_cast<double>(draws - m) / n;
    return w;
}

std::vector<double> lure_weights(std::span<const double> masses, std::size_t draws,
                                 std::size_t pool_size) {
    check_masses(masses, draws, pool_size, "lure_weights");
    std::vector<double> v(draws, 1.0);
    if (draws == pool_size) return v; // all weights exactly 1 at M = N
    const double n = static_cast<double>(pool_size);
    const double slack = n - static_cast<double>(draws);
    for (std::size_t m = 1; m <= draws; ++m) {
        const double nm = n - static_cast<double>(m);
        v[m - 1] = 1.0 + slack / nm * (1.0 / ((nm + 1.0) * masses[m - 1]) - 1.0);
    }
    return v;
}

WeightedRisk naive_estimate(const Trajectory& traj) {
    const std::size_t draws = traj.draws();
    if (draws == 0) throw ArgumentError("naive_estimate: empty trajectory");
    const auto losses = traj.step_losses();
    std::vector<double> ones(draws, 1.0);
    return WeightedRisk{EstimatorKind::naive, weighted_mean(ones, losses), std::move(ones)};
}

WeightedRisk pure_estimate(const Trajectory& traj) {
    const std::size_t draws = traj.draws();
    const std::size_t n = traj.pool_size;
    const auto masses = traj.masses();
    const auto losses = traj.step_losses();
    auto weights = pure_weights(masses, draws, n);
    const double value = weighted_mean(weights, losses);

    // Per-term form: a_m = loss_m/(N q_m) + (1/N) * sum of earlier losses.
    double earlier = 0.0;
    double a_sum = 0.0;
    for (std::size_t m = 0; m < draws; ++m) {
        a_sum += losses[m] / (static_cast<double>(n) * masses[m]) +
                 earlier / static_cast<double>(n);
        earlier += losses[m];
    }
    const double a_value = a_sum / static_cast<double>(draws);

    const double scale = std::max(std::abs(value), std::abs(a_value));
    if (std::abs(value - a_value) > 1e-10 * scale)
        throw InternalConsistencyError("pure_estimate: per-term and single-sum forms disagree");

    return WeightedRisk{EstimatorKind::pure, value, std::move(weights)};
}

WeightedRisk lure_estimate(const Trajectory& traj) {
    const std::size_t draws = traj.draws();
    auto weights = lure_weights(traj.masses(), draws, traj.pool_size);
    const double value = weighted_mean(weights, traj.step_losses());
    return WeightedRisk{EstimatorKind::lure, value, std::move(weights)};
}

double partial_support_bias(const LabeledPool& pool, std::span<const std::size_t> ignored) {
    if (!pool.has_losses())
        throw ConfigError("partial_support_bias: pool has no cached losses");
    std::unordered_set<std::size_t> seen;
    double sum = 0.0;
    for (std::size_t i : ignored) {
        if (i >= pool.size()) throw ArgumentError("partial_support_bias: index out of range");
        if (seen.insert(i).second) sum += (*pool.losses)[i];
    }
    return -sum / static_cast<double>(pool.size());
}

} // namespace alrisk
