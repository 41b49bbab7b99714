#include "alrisk/results.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "alrisk/errors.hpp"

namespace alrisk {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

} // namespace

std::vector<AggregateRow> aggregate_rows(const std::vector<ResultRow>& rows) {
    struct Bucket {
        AggregateRow agg;
        std::vector<double> values;
    };
    std::vector<Bucket> buckets;
    for (const auto& row : rows) {
        Bucket* bucket = nullptr;
        for (auto& b : buckets)
            if (b.agg.experiment == row.experiment && b.agg.estimator == row.estimator &&
                b.agg.draws == row.draws) {
                bucket = &b;
                break;
            }
        if (!bucket) {
            buckets.push_back({AggregateRow{row.experiment, row.estimator, row.draws,
                                            0.0, 0.0, 0.0, 0},
                               {}});
            bucket = &buckets.back();
        }
        if (std::isfinite(row.value)) bucket->values.push_back(row.value);
    }

    std::vector<AggregateRow> out;
    out.reserve(buckets.size());
    for (auto& b : buckets) {
        const std::size_t n = b.values.size();
        b.agg.n = n;
        if (n > 0) {
            double sum = 0.0;
            for (double v : b.values) sum += v;
            const double mean = sum / static_cast<double>(n);
            double ss = 0.0;
            for (double v : b.values) ss += (v - mean) * (v - mean);
            b.agg.mean = mean;
            b.agg.sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
            b.agg.se = b.agg.sd / std::sqrt(static_cast<double>(n));
        }
        out.push_back(b.agg);
    }
    return out;
}

std::string to_csv(const ResultSet& results) {
    std::string out = "experiment,estimator,M,trajectory,value,bias,reference,seed\n";
    for (const auto& r : results.rows) {
        out += r.experiment + ',' + r.estimator + ',' + std::to_string(r.draws) + ',' +
               std::to_string(r.trajectory) + ',' + fmt17(r.value) + ',' + fmt17(r.bias) +
               ',' + r.reference + ',' + std::to_string(r.seed) + '\n';
    }
    if (!results.aggregates.empty()) {
        out += "# aggregates\n";
        out += "experiment,estimator,M,mean,sd,se,n\n";
        for (const auto& a : results.aggregates) {
            out += a.experiment + ',' + a.estimator + ',' + std::to_string(a.draws) + ',' +
                   fmt17(a.mean) + ',' + fmt17(a.sd) + ',' + fmt17(a.se) + ',' +
                   std::to_string(a.n) + '\n';
        }
    }
    return out;
}

ResultSet from_csv(const std::string& text) {
    ResultSet out;
    std::istringstream in(text);
    std::string line;
    bool in_aggregates = false;
    bool saw_row_header = false;
    bool saw_agg_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line == "# aggregates") {
            in_aggregates = true;
            continue;
        }
        if (!in_aggregates) {
            if (!saw_row_header) {
                saw_row_header = true; // header line
                continue;
            }
            const auto f = split_csv_line(line);
            if (f.size() != 8) throw ConfigError("csv import: malformed row: " + line);
            ResultRow row;
            row.experiment = f[0];
            row.estimator = f[1];
            row.draws = static_cast<std::size_t>(std::strtoull(f[2].c_str(), nullptr, 10));
            row.trajectory = std::strtoll(f[3].c_str(), nullptr, 10);
            row.value = parse_double(f[4]);
            row.bias = parse_double(f[5]);
            row.reference = f[6];
            row.seed = std::strtoull(f[7].c_str(), nullptr, 10);
            out.rows.push_back(std::move(row));
        } else {
            if (!saw_agg_header) {
                saw_agg_header = true;
                continue;
            }
            const auto f = split_csv_line(line);
            if (f.size() != 7) throw ConfigError("csv import: malformed aggregate: " + line);
            AggregateRow agg;
            agg.experiment = f[0];
            agg.estimator = f[1];
            agg.draws = static_cast<std::size_t>(std::strtoull(f[2].c_str(), nullptr, 10));
            agg.mean = parse_double(f[3]);
            agg.sd = parse_double(f[4]);
            agg.se = parse_double(f[5]);
            agg.n = static_cast<std::size_t>(std::strtoull(f[6].c_str(), nullptr, 10));
            out.aggregates.push_back(std::move(agg));
        }
    }
    return out;
}

nlohmann::json to_json(const ResultSet& results) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : results.rows) {
        rows.push_back({{"experiment", r.experiment},
                        {"estimator", r.estimator},
                        {"M", r.draws},
                        {"trajectory", r.trajectory},
                        {"value", r.value},
                        {"bias", r.bias},
                        {"reference", r.reference},
                        {"seed", r.seed}});
    }
    nlohmann::json aggregates = nlohmann::json::array();
    for (const auto& a : results.aggregates) {
        aggregates.push_back({{"experiment", a.experiment},
                              {"estimator", a.estimator},
                              {"M", a.draws},
                              {"mean", a.mean},
                              {"sd", a.sd},
                              {"se", a.se},
                              {"n", a.n}});
    }
    return {{"config", results.config}, {"rows", rows}, {"aggregates", aggregates}};
}

ResultSet result_set_from_json(const nlohmann::json& j) {
    ResultSet out;
    out.config = j.value("config", nlohmann::json::object());
    // non-finite doubles serialize as null
    auto num = [](const nlohmann::json& v) {
        return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    for (const auto& r : j.at("rows")) {
        out.rows.push_back(ResultRow{r.at("experiment"), r.at("estimator"), r.at("M"),
                                     r.at("trajectory"), num(r.at("value")),
                                     num(r.at("bias")), r.at("reference"), r.at("seed")});
    }
    for (const auto& a : j.at("aggregates")) {
        out.aggregates.push_back(AggregateRow{a.at("experiment"), a.at("estimator"),
                                              a.at("M"), a.at("mean"), a.at("sd"),
                                              a.at("se"), a.at("n")});
    }
    return out;
}

void export_results(const ResultSet& results, const std::filesystem::path& path,
                    const std::string& format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("export: cannot open " + path.string());
    if (format == "csv") {
        out << to_csv(results);
    } else if (format == "json") {
        out << to_json(results).dump(2) << '\n';
    } else {
        throw ConfigError("export: unknown format " + format);
    }
    if (!out) throw ConfigError("export: write failed for " + path.string());
}

ResultSet import_results(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("import: cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    if (path.extension() == ".json") return result_set_from_json(nlohmann::json::parse(text));
    return from_csv(text);
}

} // namespace alrisk
