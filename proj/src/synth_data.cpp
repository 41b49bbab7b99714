#include "alrisk/synth_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alrisk/errors.hpp"

namespace alrisk {

PopulationSpec PopulationSpec::three_cluster() {
    return PopulationSpec{{
        {-1.2, -0.8, 0.12},
        {0.0, 0.5, 0.95},
        {1.0, 1.5, 0.95},
    }};
}

void PopulationSpec::validate() const {
    if (segments.empty()) throw ConfigError("population: no segments");
    auto sorted = segments;
    std::sort(sorted.begin(), sorted.end(),
              [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
    double prev_hi = -std::numeric_limits<double>::infinity();
    for (const auto& seg : sorted) {
        if (!(seg.lo < seg.hi)) throw ConfigError("population: segment needs lo < hi");
        if (!(seg.density > 0.0)) throw ConfigError("population: segment density must be > 0");
        if (seg.lo < prev_hi) throw ConfigError("population: segments overlap");
        prev_hi = seg.hi;
    }
}

std::vector<double> PopulationSpec::segment_probabilities() const {
    validate();
    std::vector<double> mass;
    mass.reserve(segments.size());
    double total = 0.0;
    for (const auto& seg : segments) {
        mass.push_back(seg.density * (seg.hi - seg.lo));
        total += mass.back();
    }
    for (double& m : mass) m /= total;
    return mass;
}

double target_response(double x) {
    if (x <= 0.0) return 0.0;
    return x * (std::pow(std::abs(x), 1.5) + std::sin(20.0 * x) / 4.0);
}

std::pair<std::vector<double>, std::vector<double>>
sample_population(const PopulationSpec& spec, std::size_t count, Philox4x64& rng) {
    if (count == 0) throw ArgumentError("sample_population: count must be >= 1");
    const auto probs = spec.segment_probabilities();

    std::vector<double> inputs, targets;
    inputs.reserve(count);
    targets.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double u = rng.next_double();
        std::size_t seg = probs.size() - 1;
        double cumulative = 0.0;
        for (std::size_t k = 0; k < probs.size(); ++k) {
            cumulative += probs[k];
            if (u < cumulative) {
                seg = k;
                break;
            }
        }
        const auto& s = spec.segments[seg];
        const double x = s.lo + (s.hi - s.lo) * rng.next_double();
        inputs.push_back(x);
        targets.push_back(target_response(x));
    }
    return {std::move(inputs), std::move(targets)};
}

LabeledPool build_pool(const PopulationSpec& spec, const std::vector<std::size_t>& counts,
                       Philox4x64& rng) {
    spec.validate();
    if (counts.size() != spec.segments.size())
        throw ConfigError("build_pool: one count per segment required");

    LabeledPool pool;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const auto& s = spec.segments[k];
        for (std::size_t i = 0; i < counts[k]; ++i) {
            const double x = s.lo + (s.hi - s.lo) * rng.next_double();
            pool.features.push_back({x});
            pool.labels.push_back(target_response(x));
        }
    }
    pool.validate();
    return pool;
}

LabeledPool build_pool(const PopulationSpec& spec, const std::vector<std::size_t>& counts,
                       std::uint64_t seed) {
    Philox4x64 rng(seed, 0);
    return build_pool(spec, counts, rng);
}

} // namespace alrisk
