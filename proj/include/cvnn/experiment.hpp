#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cvnn/capacity.hpp"
#include "cvnn/errors.hpp"
#include "cvnn/init.hpp"
#include "cvnn/training.hpp"

namespace cvnn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDataError = 3;
inline constexpr int kExitAllRunsFailed = 4;

/// Invalid configuration. field() names the offending key.
class ConfigError : public ValidationError {
public:
    ConfigError(std::string field, const std::string& message)
        : ValidationError("config field '" + field + "': " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class MergeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class WidthMode { fixed, budget };

/// Flat key = value experiment manifest. Keys match the member names.
struct ExperimentConfig {
    std::string dataset = "mnist";  // mnist | synthetic_complex | synthetic_real | cifar10 | cifar100 | reuters
    std::string domain = "both";    // real | complex | both
    int k = 0;
    WidthMode width_mode = WidthMode::fixed;
    Count m = 64;
    Count budget = 500000;
    std::string activation = "relu";
    std::string head = "softmax_abs2";
    int runs = 10;
    int epochs = 100;
    std::uint64_t base_seed = 0;
    InitScheme init_scheme = InitScheme::complex_variance_scaled;
    FanMode fan_mode = FanMode::fan_in;
    std::string out = "results";
    Eigen::Index batch_size = 128;
    double lr = 1e-3;
    int workers = 1;

    // synthetic task
    Eigen::Index n_samples = 10000;
    Eigen::Index d = 25;
    double sigma = 0.2;
    double origin_radius = SyntheticSpec{}.origin_radius;
    std::uint64_t data_seed = 0;
    bool export_data = false;

    void set(const std::string& key, const std::string& value);  // throws ConfigError
    void validate() const;
    std::vector<Domain> domains() const;
};

/// Parses "key = value" lines; '#' starts a comment.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Input dimension and class count for a dataset name.
struct DatasetDims {
    Count n = 0;
    Count c = 0;
};
DatasetDims dataset_dims(const ExperimentConfig& cfg);

/// Plans for the configured domains, built with capacity's matched-pair rules.
std::vector<NetworkPlan> experiment_plans(const ExperimentConfig& cfg);

/// One summary record per (dataset, k, activation, domain).
struct DomainSummary {
    std::string dataset;
    int k = 0;
    std::string activation;
    std::string domain;
    std::string width_mode;
    std::vector<Count> widths;
    Count params_without_bias = 0;
    Count params_with_bias = 0;
    std::optional<Count> budget;
    int runs = 0;
    int failed_runs = 0;
    std::vector<double> test_accs;  // final test accuracy per successful run
    std::optional<double> best_test_acc;
    std::optional<double> best_train_acc;
    std::optional<std::uint64_t> best_seed;
    std::optional<double> mean_test_acc;
    std::optional<double> var_test_acc;
    std::optional<double> delta_correlation;
    std::optional<int> convergence_lag;

    friend bool operator==(const DomainSummary&, const DomainSummary&) = default;
};

std::string to_json_line(const DomainSummary& s);
DomainSummary summary_from_json_line(const std::string& line);

DomainSummary summarize(const ExperimentConfig& cfg, const NetworkPlan& plan, const std::vector<RunResult>& runs);

struct ExperimentOutcome {
    std::vector<DomainSummary> summaries;
    int exit_code = kExitOk;
};

/// Loads or generates the dataset, trains every configured domain, writes
/// per-run CSVs and summary.jsonl under cfg.out. Throws ConfigError for
/// invalid configs and std::runtime_error (data errors) for missing data.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, std::ostream& log);

/// Human-readable plan listing (widths and parameter totals per domain).
std::string plan_only(const ExperimentConfig& cfg);

/// Dataset could not be loaded or generated.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Dataset load_experiment_data(const ExperimentConfig& cfg);

struct MergedRow {
    DomainSummary summary;
    std::filesystem::path source;
};

/// Collects every *.jsonl summary under `dir` into one table keyed by
/// (dataset, k, activation, domain), sorted by key. Throws MergeError naming
/// both files when a key appears twice.
std::vector<MergedRow> report_merge(const std::filesystem::path& dir);

/// CSV rendering of merged rows.
std::string format_merged_table(const std::vector<MergedRow>& rows);

}  // namespace cvnn
