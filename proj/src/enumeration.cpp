#include "alrisk/enumeration.hpp"

#include <cmath>
#include <string>

#include "alrisk/errors.hpp"

namespace alrisk {

namespace {

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

// Everything the three public entry points need, gathered in one sweep.
struct EnumResult {
    // Per estimator kind (indexed by EstimatorKind), sums shifted by the pool
    // risk so exact estimators accumulate ~0 instead of cancelling.
    double shifted_first[3] = {0, 0, 0};
    double shifted_second[3] = {0, 0, 0};
    std::vector<std::vector<double>> weight_means; // [kind][m]
    std::vector<double> step_conditional_variances; // E_m
    KahanSum probability;
    std::uint64_t count = 0;
    double pool_risk = 0.0;

    double mean(EstimatorKind kind) const {
        return pool_risk + shifted_first[static_cast<int>(kind)];
    }
    double variance(EstimatorKind kind) const {
        const int k = static_cast<int>(kind);
        return shifted_second[k] - shifted_first[k] * shifted_first[k];
    }
};

class Enumerator {
public:
    Enumerator(const LabeledPool& pool, const ProposalRule& rule, std::size_t draws,
               const EnumOptions& options)
        : pool_(pool), rule_(rule), draws_(draws), options_(options),
          n_(pool.size()) {
        if (!pool_.has_losses())
            throw ConfigError("enumeration: pool has no cached losses");
        if (draws_ == 0 || draws_ > n_)
            throw ArgumentError("enumeration: need 1 <= M <= N");
        if (n_ > options_.max_pool || draws_ > options_.max_draws)
            throw ResourceError("enumeration: pool/draw count exceeds guard (N <= " +
                                std::to_string(options_.max_pool) + ", M <= " +
                                std::to_string(options_.max_draws) +
                                "); raise EnumOptions limits explicitly to override");
        if (rule_.partial_support()) {
            if (!options_.allow_partial_support)
                throw ConfigError("enumeration: partial-support rule requires "
                                  "allow_partial_support");
            if (draws_ + rule_.ignored().size() > n_)
                throw ArgumentError("enumeration: draws exceed the rule's support");
        }
    }

    EnumResult run() {
        result_.weight_means.assign(3, std::vector<double>(draws_, 0.0));
        result_.step_conditional_variances.assign(draws_, 0.0);
        result_.pool_risk = pool_empirical_risk(pool_);
        history_.reserve(draws_);
        path_mass_.reserve(draws_);
        path_loss_.reserve(draws_);
        descend(1.0);
        if (std::abs(result_.probability.sum - 1.0) > 1e-12)
            throw ProposalError("enumeration: trajectory probabilities sum to " +
                                std::to_string(result_.probability.sum) + ", not 1");
        return std::move(result_);
    }

private:
    void descend(double prob) {
        const std::size_t depth = history_.size();
        if (depth == draws_) {
            record_terminal(prob);
            return;
        }

        const auto mass = rule_.masses(history_, pool_);
        double level_sum = 0.0;
        for (double q : mass) {
            if (q < 0.0) throw ProposalError("enumeration: negative proposal mass");
            level_sum += q;
        }
        if (std::abs(level_sum - 1.0) > 1e-12)
            throw ProposalError("enumeration: proposal level masses do not sum to 1");

        // Conditional variance of w*loss over this draw (w = 1/(N q)): for any
        // positive-mass candidate, w*loss = loss/(N q), and the q-expectation
        // of it is (1/N) * sum of available losses.
        {
            double mu = 0.0;
            for (std::size_t i = 0; i < n_; ++i)
                if (mass[i] > 0.0) mu += (*pool_.losses)[i];
            mu /= static_cast<double>(n_);
            double var = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (mass[i] <= 0.0) continue;
                const double x = (*pool_.losses)[i] / (static_cast<double>(n_) * mass[i]);
                var += mass[i] * (x - mu) * (x - mu);
            }
            result_.step_conditional_variances[depth] += prob * var;
        }

        for (std::size_t i = 0; i < n_; ++i) {
            if (mass[i] <= 0.0) continue;
            history_.push_back(i);
            path_mass_.push_back(mass[i]);
            path_loss_.push_back((*pool_.losses)[i]);
            descend(prob * mass[i]);
            history_.pop_back();
            path_mass_.pop_back();
            path_loss_.pop_back();
        }
    }

    void record_terminal(double prob) {
        ++result_.count;
        result_.probability.add(prob);

        auto pure_w = pure_weights(path_mass_, draws_, n_);
        if (options_.fault_pure_weight_shift)
            for (double& w : pure_w) w += 1.0 / static_cast<double>(n_);
        const auto lure_w = lure_weights(path_mass_, draws_, n_);

        double naive_v = 0.0, pure_v = 0.0, lure_v = 0.0;
        for (std::size_t m = 0; m < draws_; ++m) {
            naive_v += path_loss_[m];
            pure_v += pure_w[m] * path_loss_[m];
            lure_v += lure_w[m] * path_loss_[m];
            result_.weight_means[static_cast<int>(EstimatorKind::naive)][m] += prob;
            result_.weight_means[static_cast<int>(EstimatorKind::pure)][m] += prob * pure_w[m];
            result_.weight_means[static_cast<int>(EstimatorKind::lure)][m] += prob * lure_w[m];
        }
        const double inv_m = 1.0 / static_cast<double>(draws_);
        accumulate(EstimatorKind::naive, prob, naive_v * inv_m);
        accumulate(EstimatorKind::pure, prob, pure_v * inv_m);
        accumulate(EstimatorKind::lure, prob, lure_v * inv_m);
    }

    void accumulate(EstimatorKind kind, double prob, double value) {
        const double shifted = value - result_.pool_risk;
        const int k = static_cast<int>(kind);
        result_.shifted_first[k] += prob * shifted;
        result_.shifted_second[k] += prob * shifted * shifted;
    }

    const LabeledPool& pool_;
    const ProposalRule& rule_;
    std::size_t draws_;
    EnumOptions options_;
    std::size_t n_;
    std::vector<std::size_t> history_;
    std::vector<double> path_mass_;
    std::vector<double> path_loss_;
    EnumResult result_;
};

} // namespace

ExactMoments enumerate_moments(const LabeledPool& pool, const ProposalRule& rule,
                               std::size_t draws, EstimatorKind kind,
                               const EnumOptions& options) {
    const EnumResult r = Enumerator(pool, rule, draws, options).run();
    ExactMoments out;
    out.mean = r.mean(kind);
    out.variance = std::max(0.0, r.variance(kind));
    out.per_step_weight_means = r.weight_means[static_cast<int>(kind)];
    out.trajectory_count = r.count;
    out.probability_mass = r.probability.sum;
    return out;
}

std::vector<double> enumerate_weight_expectations(const LabeledPool& pool,
                                                  const ProposalRule& rule,
                                                  std::size_t draws,
                                                  const EnumOptions& options) {
    const EnumResult r = Enumerator(pool, rule, draws, options).run();
    return r.weight_means[static_cast<int>(EstimatorKind::lure)];
}

VarianceDecomposition enumerate_variance_decomposition(const LabeledPool& pool,
                                                       const ProposalRule& rule,
                                                       std::size_t draws,
                                                       const EnumOptions& options) {
    const EnumResult r = Enumerator(pool, rule, draws, options).run();
    const std::size_t n = pool.size();

    VarianceDecomposition out;
    out.pure_variance_direct = std::max(0.0, r.variance(EstimatorKind::pure));
    out.lure_variance_direct = std::max(0.0, r.variance(EstimatorKind::lure));
    out.step_conditional_variances = r.step_conditional_variances;
    out.trajectory_count = r.count;

    const auto constants = lure_constants(draws, n);
    const double inv_m2 = 1.0 / (static_cast<double>(draws) * static_cast<double>(draws));
    out.weight_normalized_variances.resize(draws);
    for (std::size_t m = 1; m <= draws; ++m) {
        const double e_m = r.step_conditional_variances[m - 1];
        const double c_m = constants.c[m - 1];
        out.pure_variance_decomposed += e_m;
        out.lure_variance_decomposed += c_m * c_m * e_m;
        const double ratio = static_cast<double>(n) / (static_cast<double>(n - m) + 1.0);
        out.weight_normalized_variances[m - 1] = ratio * ratio * e_m;
    }
    out.pure_variance_decomposed *= inv_m2;
    out.lure_variance_decomposed *= inv_m2;
    out.lure_not_above_pure =
        out.lure_variance_direct <= out.pure_variance_direct * (1.0 + 1e-12) + 1e-18;
    return out;
}

} // namespace alrisk
