// Command-line harness: seeded Monte Carlo experiments over the risk
// estimators, the exhaustive-enumeration self-check, and result conversion.
//
// Exit codes: 0 success, 1 configuration/runtime error, 2 invariant-check
// failure (oracle violations or an exceeded singular-fit budget).

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "alrisk/errors.hpp"
#include "alrisk/experiments.hpp"
#include "alrisk/results.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInvariant = 2;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string out;
    std::string format;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON experiment config");
    cmd->add_option("--seed", flags.seed, "root seed (overrides config)");
    cmd->add_option("--workers", flags.workers, "worker thread count (overrides config)");
    cmd->add_option("--out", flags.out, "output path (overrides config)");
    cmd->add_option("--format", flags.format, "csv|json (overrides config)")
        ->check(CLI::IsMember({"csv", "json"}));
}

alrisk::ExperimentConfig load_config(const CommonFlags& flags,
                                     alrisk::ExperimentKind kind) {
    alrisk::ExperimentConfig cfg;
    if (flags.config_path.empty()) {
        cfg = alrisk::default_config(kind);
    } else {
        std::ifstream in(flags.config_path);
        if (!in) throw alrisk::ConfigError("cannot open config: " + flags.config_path);
        cfg = alrisk::config_from_json(nlohmann::json::parse(in));
        if (cfg.experiment != kind)
            throw alrisk::ConfigError("config experiment '" +
                                      alrisk::to_string(cfg.experiment) +
                                      "' does not match subcommand '" +
                                      alrisk::to_string(kind) + "'");
    }
    if (flags.seed) cfg.root_seed = *flags.seed;
    if (flags.workers) cfg.workers = *flags.workers;
    if (!flags.out.empty()) cfg.output_path = flags.out;
    if (!flags.format.empty()) cfg.format = flags.format;
    cfg.validate();
    return cfg;
}

int run_and_export(const alrisk::ExperimentConfig& cfg) {
    const alrisk::ResultSet results = alrisk::run_experiment(cfg);
    const std::string path = cfg.output_path.empty()
                                 ? alrisk::to_string(cfg.experiment) + "." + cfg.format
                                 : cfg.output_path;
    alrisk::export_results(results, path, cfg.format);
    std::cout << results.rows.size() << " rows, " << results.aggregates.size()
              << " aggregates -> " << path << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo harness for unbiased risk estimation under active sampling"};
    app.require_subcommand(1);

    CommonFlags bias_flags, train_flags, ofb_flags, sweep_flags, oracle_flags;
    auto* bias = app.add_subcommand("bias", "fixed-function estimator bias vs pool risk");
    add_common(bias, bias_flags);
    auto* train = app.add_subcommand("train", "downstream weighted-training comparison");
    add_common(train, train_flags);
    auto* ofb = app.add_subcommand("ofb", "overfitting-bias and sampling-bias measurement");
    add_common(ofb, ofb_flags);
    auto* sweep = app.add_subcommand("sweep", "estimator MSE along an M grid with N = 2M");
    add_common(sweep, sweep_flags);

    auto* oracle = app.add_subcommand("oracle", "exhaustive-enumeration invariant checks");
    add_common(oracle, oracle_flags);
    std::size_t oracle_pools = 50;
    std::size_t oracle_min_pool = 3, oracle_max_pool = 7;
    bool oracle_inject_fault = false;
    oracle->add_option("--pools", oracle_pools, "number of randomized pools");
    oracle->add_option("--min-pool", oracle_min_pool, "smallest pool size");
    oracle->add_option("--max-pool", oracle_max_pool, "largest pool size");
    oracle->add_flag("--inject-fault", oracle_inject_fault,
                     "corrupt the pure weights to verify the checks detect it");

    auto* convert = app.add_subcommand("export", "convert results between csv and json");
    std::string convert_in, convert_out, convert_format = "csv";
    convert->add_option("--in", convert_in, "input results file (.csv or .json)")
        ->required();
    convert->add_option("--out", convert_out, "output path")->required();
    convert->add_option("--format", convert_format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (bias->parsed())
            return run_and_export(
                load_config(bias_flags, alrisk::ExperimentKind::bias_fixed_function));
        if (train->parsed())
            return run_and_export(
                load_config(train_flags, alrisk::ExperimentKind::downstream_training));
        if (ofb->parsed())
            return run_and_export(load_config(ofb_flags, alrisk::ExperimentKind::ofb));
        if (sweep->parsed())
            return run_and_export(load_config(sweep_flags, alrisk::ExperimentKind::sweep));
        if (oracle->parsed()) {
            alrisk::OracleCheckOptions options;
            options.pools = oracle_pools;
            options.min_pool = oracle_min_pool;
            options.max_pool = oracle_max_pool;
            options.inject_pure_weight_fault = oracle_inject_fault;
            if (oracle_flags.seed) options.seed = *oracle_flags.seed;
            const alrisk::OracleReport report = alrisk::run_oracle_check(options);
            std::cout << report.summary();
            return report.passed() ? kExitOk : kExitInvariant;
        }
        if (convert->parsed()) {
            const alrisk::ResultSet results = alrisk::import_results(convert_in);
            alrisk::export_results(results, convert_out, convert_format);
            std::cout << results.rows.size() << " rows -> " << convert_out << '\n';
            return kExitOk;
        }
    } catch (const alrisk::InvariantViolation& err) {
        std::cerr << "invariant failure: " << err.what() << '\n';
        return kExitInvariant;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
