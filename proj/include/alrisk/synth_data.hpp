#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "alrisk/pool.hpp"
#include "alrisk/rng.hpp"

namespace alrisk {

// Synthetic scalar population: inputs from a piecewise-uniform density over
// disjoint segments, deterministic nonlinear response.

struct Segment {
    double lo;
    double hi;
    double density;
};

struct PopulationSpec {
    std::vector<Segment> segments;

    // Three clusters: a small isolated one on the negative axis and two dense
    // ones on the positive axis. Stated densities carry total mass 0.998;
    // sampling renormalizes.
    static PopulationSpec three_cluster();

    void validate() const;
    // Renormalized probability of each segment (density * width / total).
    std::vector<double> segment_probabilities() const;
};

// y = max(0, x) * (|x|^(3/2) + sin(20 x)/4); identically 0 for x <= 0.
double target_response(double x);

// `count` inputs from the renormalized piecewise density (segment chosen by
// mass, then uniform within), with their responses.
std::pair<std::vector<double>, std::vector<double>>
sample_population(const PopulationSpec& spec, std::size_t count, Philox4x64& rng);

// Pool with exactly counts[k] points uniform in segment k. Labels are the
// target responses; no loss cache (losses depend on the evaluated function).
LabeledPool build_pool(const PopulationSpec& spec, const std::vector<std::size_t>& counts,
                       Philox4x64& rng);
LabeledPool build_pool(const PopulationSpec& spec, const std::vector<std::size_t>& counts,
                       std::uint64_t seed);

} // namespace alrisk
