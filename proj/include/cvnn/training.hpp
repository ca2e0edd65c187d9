#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cvnn/datasets.hpp"
#include "cvnn/loss.hpp"
#include "cvnn/model.hpp"

namespace cvnn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// First and second moments for every real parameter plane of a model, in
/// the order (W.re, W.im, b.re, b.im) per layer.
struct AdamState {
    std::vector<RealMatrix> m;
    std::vector<RealMatrix> v;
    long t = 0;

    static AdamState for_model(const Model& model);
};

/// One bias-corrected Adam update of a single plane; t is the 1-based step.
void adam_update(RealMatrix& param, const RealMatrix& grad, RealMatrix& m, RealMatrix& v, long t,
                 const AdamConfig& cfg);

/// Applies one step to every plane of the model (real-domain models skip the
/// imaginary planes). Throws EvaluationError on a non-finite gradient, before
/// touching any parameter.
void adam_step(Model& model, const GradientSet& grads, AdamState& state, const AdamConfig& cfg);

struct TrainConfig {
    int epochs = 100;
    Eigen::Index batch_size = 128;
    AdamConfig adam;
    LossKind loss = LossKind::categorical_ce;
    int runs = 10;
    std::uint64_t base_seed = 0;

    void validate() const;
};

struct WeightStats {
    double mean_abs_re = 0.0;
    double mean_abs_im = 0.0;
    double mean_magnitude = 0.0;
};

/// Means over every entry of every weight matrix (biases excluded).
WeightStats weight_stats(const Model& model);

struct EpochDiagnostics {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double train_acc = 0.0;
    double test_acc = 0.0;
    double mean_abs_re = 0.0;
    double mean_abs_im = 0.0;
    double mean_magnitude = 0.0;
};

struct RunResult {
    std::uint64_t seed = 0;
    double final_test_acc = 0.0;
    double final_train_acc = 0.0;
    std::vector<EpochDiagnostics> diagnostics;
    bool failed = false;
    std::string failure;  // reason when failed
};

/// What to build for a run; init.seed is replaced by the run seed.
struct ModelSpec {
    NetworkPlan plan;
    Activation hidden = Activation::split_relu;
    Activation head = Activation::softmax_intensity;
    InitSpec init;
};

double accuracy(const RealMatrix& probs, const RealMatrix& labels);

/// Trains `model` in place. Minibatches are reshuffled every epoch from a
/// stream derived from `seed`. Train loss/accuracy are running means over the
/// epoch's minibatches; test accuracy is evaluated after each epoch. Pole hits
/// and non-finite losses or gradients end the run with failed = true.
RunResult train_model(Model& model, const Dataset& data, const TrainConfig& cfg, std::uint64_t seed);

RunResult train_run(const ModelSpec& spec, const Dataset& data, const TrainConfig& cfg, std::uint64_t seed);

/// cfg.runs independent runs with seeds base_seed + i, at most `workers` at a time.
std::vector<RunResult> train_runs(const ModelSpec& spec, const Dataset& data, const TrainConfig& cfg, int workers = 1);

struct BestOfRuns {
    std::optional<RunResult> best;  // empty when every run failed
    std::size_t succeeded = 0;
    std::size_t failed = 0;
};

/// Highest final test accuracy among non-failed runs, ties to the lower seed.
BestOfRuns best_of_runs(const std::vector<RunResult>& results);

struct FollowScore {
    std::optional<double> delta_correlation;  // empty for constant series
    std::optional<int> re_converged_epoch;
    std::optional<int> im_converged_epoch;
    std::optional<int> convergence_lag;  // im minus re
};

/// Pearson correlation of per-epoch increments of mean |Re W| and mean |Im W|,
/// and the lag between their convergence epochs. A series has converged at
/// the first epoch from which three consecutive increments stay below 1e-4
/// times the series range. Needs at least 10 epochs.
FollowScore follow_score(const std::vector<EpochDiagnostics>& trajectory);

void write_run_csv(const RunResult& run, const std::filesystem::path& path);

}  // namespace cvnn
