#include "cvnn/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "cvnn/errors.hpp"
#include "cvnn/rng.hpp"

namespace cvnn {

AdamState AdamState::for_model(const Model& model) {
    AdamState s;
    for (const auto& l : model.layers) {
        for (const RealMatrix* p : {&l.weights.re(), &l.weights.im(), &l.bias.re(), &l.bias.im()}) {
            s.m.push_back(RealMatrix::Zero(p->rows(), p->cols()));
            s.v.push_back(RealMatrix::Zero(p->rows(), p->cols()));
        }
    }
    return s;
}

void adam_update(RealMatrix& param, const RealMatrix& grad, RealMatrix& m, RealMatrix& v, long t,
                 const AdamConfig& cfg) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    param.array() -= cfg.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.eps);
}

void adam_step(Model& model, const GradientSet& grads, AdamState& state, const AdamConfig& cfg) {
    if (grads.layers.size() != model.layers.size() || state.m.size() != 4 * model.layers.size()) {
        throw ConsistencyError("adam_step: gradient/state layout does not match the model");
    }
    for (const auto& g : grads.layers) {
        if (!g.weights.all_finite() || !g.bias.all_finite()) throw EvaluationError("non-finite gradient");
    }
    ++state.t;
    const bool real = model.domain == Domain::real;
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        auto& l = model.layers[i];
        const auto& g = grads.layers[i];
        const std::size_t base = 4 * i;
        adam_update(l.weights.re(), g.weights.re(), state.m[base], state.v[base], state.t, cfg);
        adam_update(l.bias.re(), g.bias.re(), state.m[base + 2], state.v[base + 2], state.t, cfg);
        if (!real) {
            adam_update(l.weights.im(), g.weights.im(), state.m[base + 1], state.v[base + 1], state.t, cfg);
            adam_update(l.bias.im(), g.bias.im(), state.m[base + 3], state.v[base + 3], state.t, cfg);
        }
    }
}

void TrainConfig::validate() const {
    if (epochs < 1) throw ValidationError("epochs must be >= 1");
    if (runs < 1) throw ValidationError("runs must be >= 1");
    if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
    if (!(adam.lr > 0.0)) throw ValidationError("learning rate must be > 0");
}

WeightStats weight_stats(const Model& model) {
    if (model.layers.empty()) throw ValidationError("weight_stats: model has no weight matrices");
    double re = 0.0, im = 0.0, mag = 0.0;
    Eigen::Index count = 0;
    for (const auto& l : model.layers) {
        const auto& wr = l.weights.re().array();
        const auto& wi = l.weights.im().array();
        re += wr.abs().sum();
        im += wi.abs().sum();
        mag += (wr.square() + wi.square()).sqrt().sum();
        count += l.weights.size();
    }
    const double n = static_cast<double>(count);
    return {re / n, im / n, mag / n};
}

double accuracy(const RealMatrix& probs, const RealMatrix& labels) {
    if (probs.rows() == 0) return 0.0;
    const auto predicted = argmax_rows(probs);
    const auto truth = argmax_rows(labels);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == truth[i];
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

namespace {

std::size_t count_hits(const RealMatrix& probs, const RealMatrix& labels) {
    const auto predicted = argmax_rows(probs);
    const auto truth = argmax_rows(labels);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == truth[i];
    return hits;
}

double evaluate_accuracy(const Model& model, const ComplexTensor& x, const RealMatrix& y) {
    constexpr Eigen::Index chunk = 2048;
    std::size_t hits = 0;
    for (Eigen::Index start = 0; start < x.rows(); start += chunk) {
        const Eigen::Index n = std::min(chunk, x.rows() - start);
        const ComplexTensor xs(x.re().middleRows(start, n), x.im().middleRows(start, n));
        hits += count_hits(predict(model, xs).re(), y.middleRows(start, n));
    }
    return x.rows() == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(x.rows());
}

}  // namespace

RunResult train_model(Model& model, const Dataset& data, const TrainConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    model.validate();
    if (model.input_dim() != data.n_features() || model.output_dim() != data.n_classes()) {
        throw DimensionError("train: model " + std::to_string(model.input_dim()) + "->" +
                             std::to_string(model.output_dim()) + " does not fit data with " +
                             std::to_string(data.n_features()) + " features and " + std::to_string(data.n_classes()) +
                             " classes");
    }

    RunResult result;
    result.seed = seed;
    AdamState state = AdamState::for_model(model);
    const Eigen::Index n = data.x_train.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));

    try {
        for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
            std::iota(order.begin(), order.end(), Eigen::Index{0});
            Rng rng(Rng::derive_seed(seed, static_cast<std::uint64_t>(epoch)));
            for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

            double loss_sum = 0.0;
            std::size_t hits = 0;
            for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
                const Eigen::Index b = std::min(cfg.batch_size, n - start);
                const std::vector<Eigen::Index> idx(order.begin() + start, order.begin() + start + b);
                const ComplexTensor xb = data.x_train.gather_rows(idx);
                RealMatrix yb(b, data.y_train.cols());
                for (Eigen::Index r = 0; r < b; ++r) yb.row(r) = data.y_train.row(idx[static_cast<std::size_t>(r)]);

                const Tape tape = forward(model, xb);
                const RealMatrix& probs = tape.output().re();
                if (!probs.allFinite()) throw EvaluationError("non-finite model output");
                const double loss = loss_value(cfg.loss, probs, yb);
                if (!std::isfinite(loss)) throw EvaluationError("non-finite loss");
                loss_sum += loss * static_cast<double>(b);
                hits += count_hits(probs, yb);

                const GradientSet grads = backward(tape, model, loss_grad(cfg.loss, probs, yb));
                adam_step(model, grads, state, cfg.adam);
            }

            EpochDiagnostics diag;
            diag.epoch = epoch;
            diag.train_loss = loss_sum / static_cast<double>(n);
            diag.train_acc = static_cast<double>(hits) / static_cast<double>(n);
            diag.test_acc = evaluate_accuracy(model, data.x_test, data.y_test);
            const WeightStats ws = weight_stats(model);
            diag.mean_abs_re = ws.mean_abs_re;
            diag.mean_abs_im = ws.mean_abs_im;
            diag.mean_magnitude = ws.mean_magnitude;
            result.diagnostics.push_back(diag);
        }
    } catch (const PoleError& e) {
        result.failed = true;
        result.failure = e.what();
    } catch (const EvaluationError& e) {
        result.failed = true;
        result.failure = e.what();
    } catch (const ValidationError& e) {
        // probabilities that no longer normalize (overflowed intensities)
        result.failed = true;
        result.failure = e.what();
    }

    if (!result.diagnostics.empty()) {
        result.final_test_acc = result.diagnostics.back().test_acc;
        result.final_train_acc = result.diagnostics.back().train_acc;
    }
    return result;
}

RunResult train_run(const ModelSpec& spec, const Dataset& data, const TrainConfig& cfg, std::uint64_t seed) {
    InitSpec init = spec.init;
    init.seed = seed;
    Model model = build_model(spec.plan, spec.hidden, spec.head, init);
    return train_model(model, data, cfg, seed);
}

std::vector<RunResult> train_runs(const ModelSpec& spec, const Dataset& data, const TrainConfig& cfg, int workers) {
    cfg.validate();
    std::vector<RunResult> results(static_cast<std::size_t>(cfg.runs));
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (int i = next++; i < cfg.runs; i = next++) {
            try {
                results[static_cast<std::size_t>(i)] =
                    train_run(spec, data, cfg, cfg.base_seed + static_cast<std::uint64_t>(i));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };

    const int n = std::clamp(workers, 1, cfg.runs);
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < n; ++w) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
    return results;
}

BestOfRuns best_of_runs(const std::vector<RunResult>& results) {
    BestOfRuns out;
    const RunResult* best = nullptr;
    for (const auto& r : results) {
        if (r.failed) {
            ++out.failed;
            continue;
        }
        ++out.succeeded;
        if (best == nullptr || r.final_test_acc > best->final_test_acc ||
            (r.final_test_acc == best->final_test_acc && r.seed < best->seed)) {
            best = &r;
        }
    }
    if (best != nullptr) out.best = *best;
    return out;
}

namespace {

std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return std::nullopt;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::optional<int> converged_epoch(const std::vector<EpochDiagnostics>& traj, const std::vector<double>& series) {
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    const double range = *hi - *lo;
    if (range == 0.0) return std::nullopt;
    const double eps = 1e-4 * range;
    // increment i is series[i] - series[i - 1], attributed to epoch traj[i].epoch
    for (std::size_t i = 1; i + 2 < series.size(); ++i) {
        bool flat = true;
        for (std::size_t j = i; j < i + 3; ++j) flat = flat && std::abs(series[j] - series[j - 1]) < eps;
        if (flat) return traj[i].epoch;
    }
    return std::nullopt;
}

}  // namespace

FollowScore follow_score(const std::vector<EpochDiagnostics>& trajectory) {
    if (trajectory.size() < 10) {
        throw ValidationError("follow_score: needs at least 10 epochs, got " + std::to_string(trajectory.size()));
    }
    std::vector<double> re, im;
    for (const auto& d : trajectory) {
        re.push_back(d.mean_abs_re);
        im.push_back(d.mean_abs_im);
    }
    std::vector<double> dre(re.size() - 1), dim(im.size() - 1);
    for (std::size_t i = 1; i < re.size(); ++i) {
        dre[i - 1] = re[i] - re[i - 1];
        dim[i - 1] = im[i] - im[i - 1];
    }
    FollowScore s;
    s.delta_correlation = pearson(dre, dim);
    s.re_converged_epoch = converged_epoch(trajectory, re);
    s.im_converged_epoch = converged_epoch(trajectory, im);
    if (s.re_converged_epoch && s.im_converged_epoch) s.convergence_lag = *s.im_converged_epoch - *s.re_converged_epoch;
    return s;
}

void write_run_csv(const RunResult& run, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(10);
    out << "epoch,train_loss,train_acc,test_acc,mean_abs_re,mean_abs_im,mean_magnitude\n";
    for (const auto& d : run.diagnostics) {
        out << d.epoch << ',' << d.train_loss << ',' << d.train_acc << ',' << d.test_acc << ',' << d.mean_abs_re << ','
            << d.mean_abs_im << ',' << d.mean_magnitude << '\n';
    }
}

}  // namespace cvnn
