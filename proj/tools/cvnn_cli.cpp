#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cvnn/experiment.hpp"

using namespace cvnn;

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::string> out;
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "experiment config file (key = value)");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--workers", f.workers, "concurrent runs");
    cmd->add_option("--seed", f.seed, "base seed");
    cmd->add_option("--set", f.sets, "override a config key, KEY=VALUE (repeatable)");
}

ExperimentConfig resolve(const CommonFlags& f) {
    ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
    for (const auto& kv : f.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError(kv, "--set expects KEY=VALUE");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (f.out) cfg.out = *f.out;
    if (f.workers) cfg.workers = *f.workers;
    if (f.seed) cfg.base_seed = *f.seed;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cvnn: complex- and real-valued MLP experiments"};
    app.require_subcommand(1);

    CommonFlags run_flags, plan_flags;
    auto* run = app.add_subcommand("run", "train the configured models and write reports");
    add_common(run, run_flags);
    auto* plan = app.add_subcommand("plan", "print matched widths and parameter counts");
    add_common(plan, plan_flags);

    std::string merge_dir;
    std::optional<std::string> merge_out;
    auto* merge = app.add_subcommand("merge", "combine summary.jsonl files into one table");
    merge->add_option("dir", merge_dir, "directory holding summaries")->required();
    merge->add_option("--out", merge_out, "write the table here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfigError;
    }

    try {
        if (*run) {
            const ExperimentConfig cfg = resolve(run_flags);
            const ExperimentOutcome outcome = run_experiment(cfg, std::cout);
            if (outcome.exit_code == kExitAllRunsFailed) std::cerr << "error: every run failed\n";
            return outcome.exit_code;
        }
        if (*plan) {
            std::cout << plan_only(resolve(plan_flags));
            return kExitOk;
        }
        if (*merge) {
            const std::string table = format_merged_table(report_merge(merge_dir));
            if (merge_out) {
                std::ofstream(*merge_out) << table;
            } else {
                std::cout << table;
            }
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const MergeError& e) {
        std::cerr << "merge error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
