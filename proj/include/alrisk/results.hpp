#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace alrisk {

// One estimator evaluation on one trajectory (or one derived quantity per
// trajectory; the experiment id says which).
struct ResultRow {
    std::string experiment;
    std::string estimator;
    std::size_t draws = 0;     // M
    std::int64_t trajectory = 0;
    double value = 0.0;
    double bias = 0.0;         // value - reference
    std::string reference;     // pool_risk | population_proxy
    std::uint64_t seed = 0;
};

struct AggregateRow {
    std::string experiment;
    std::string estimator;
    std::size_t draws = 0;
    double mean = 0.0;
    double sd = 0.0;
    double se = 0.0;
    std::size_t n = 0; // finite rows included
};

struct ResultSet {
    std::vector<ResultRow> rows;
    std::vector<AggregateRow> aggregates;
    nlohmann::json config; // resolved run configuration, for provenance
};

// Mean/sd/se over the finite values of the matching rows, grouped by
// (experiment, estimator, M) in first-appearance order.
std::vector<AggregateRow> aggregate_rows(const std::vector<ResultRow>& rows);

// CSV layout: a per-trajectory section under the header
//   experiment,estimator,M,trajectory,value,bias,reference,seed
// and, when aggregates exist, an aggregate section introduced by the line
// "# aggregates" under its own header. Numbers carry 17 significant digits so
// a re-import reproduces every double bit-exactly.
std::string to_csv(const ResultSet& results);
ResultSet from_csv(const std::string& text);

nlohmann::json to_json(const ResultSet& results);
ResultSet result_set_from_json(const nlohmann::json& j);

void export_results(const ResultSet& results, const std::filesystem::path& path,
                    const std::string& format); // "csv" or "json"
ResultSet import_results(const std::filesystem::path& path);

} // namespace alrisk
