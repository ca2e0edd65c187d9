#include "cvnn/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace cvnn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) throw ConfigError(key, "expected a number, got '" + value + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError(key, "expected true or false, got '" + value + "'");
}

bool is_synthetic(const std::string& dataset) {
    return dataset == "synthetic_complex" || dataset == "synthetic_real";
}

const std::vector<std::string>& known_datasets() {
    static const std::vector<std::string> names = {"mnist", "synthetic_complex", "synthetic_real",
                                                   "cifar10", "cifar100", "reuters"};
    return names;
}

std::string width_mode_name(WidthMode w) { return w == WidthMode::fixed ? "fixed" : "budget"; }

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "dataset") {
        dataset = value;
    } else if (key == "domain") {
        domain = value;
    } else if (key == "k") {
        k = parse_number<int>(key, value);
    } else if (key == "width_mode") {
        if (value == "fixed") width_mode = WidthMode::fixed;
        else if (value == "budget") width_mode = WidthMode::budget;
        else throw ConfigError(key, "expected fixed or budget, got '" + value + "'");
    } else if (key == "m") {
        m = parse_number<Count>(key, value);
    } else if (key == "budget") {
        budget = parse_number<Count>(key, value);
    } else if (key == "activation") {
        activation = value;
    } else if (key == "head") {
        head = value;
    } else if (key == "runs") {
        runs = parse_number<int>(key, value);
    } else if (key == "epochs") {
        epochs = parse_number<int>(key, value);
    } else if (key == "base_seed") {
        base_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "init_scheme") {
        try {
            init_scheme = parse_init_scheme(value);
        } catch (const ValidationError& e) {
            throw ConfigError(key, e.what());
        }
    } else if (key == "fan_mode") {
        try {
            fan_mode = parse_fan_mode(value);
        } catch (const ValidationError& e) {
            throw ConfigError(key, e.what());
        }
    } else if (key == "out") {
        out = value;
    } else if (key == "batch_size") {
        batch_size = parse_number<Eigen::Index>(key, value);
    } else if (key == "lr") {
        lr = parse_number<double>(key, value);
    } else if (key == "workers") {
        workers = parse_number<int>(key, value);
    } else if (key == "n_samples") {
        n_samples = parse_number<Eigen::Index>(key, value);
    } else if (key == "d") {
        d = parse_number<Eigen::Index>(key, value);
    } else if (key == "sigma") {
        sigma = parse_number<double>(key, value);
    } else if (key == "origin_radius") {
        origin_radius = parse_number<double>(key, value);
    } else if (key == "data_seed") {
        data_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "export_data") {
        export_data = parse_bool(key, value);
    } else {
        throw ConfigError(key, "unknown key");
    }
}

void ExperimentConfig::validate() const {
    const auto& names = known_datasets();
    if (std::find(names.begin(), names.end(), dataset) == names.end()) {
        throw ConfigError("dataset", "unknown dataset '" + dataset + "'");
    }
    if (domain != "real" && domain != "complex" && domain != "both") {
        throw ConfigError("domain", "expected real, complex or both, got '" + domain + "'");
    }
    if (k < 0 || k % 2 != 0) throw ConfigError("k", "must be even and >= 0, got " + std::to_string(k));
    if (width_mode == WidthMode::fixed && (m < 2 || m % 2 != 0)) {
        throw ConfigError("m", "must be even and >= 2, got " + std::to_string(m));
    }
    if (width_mode == WidthMode::budget && budget < 1) throw ConfigError("budget", "must be positive");
    Activation hidden{}, out{};
    try {
        hidden = parse_activation(activation);
    } catch (const ValidationError& e) {
        throw ConfigError("activation", e.what());
    }
    if (is_output_head(hidden)) throw ConfigError("activation", "'" + activation + "' is an output head");
    try {
        out = parse_activation(head);
    } catch (const ValidationError& e) {
        throw ConfigError("head", e.what());
    }
    if (!is_output_head(out)) throw ConfigError("head", "'" + head + "' is not an output head");
    if (init_scheme == InitScheme::real_glorot) {
        throw ConfigError("init_scheme", "complex models need complex_variance_scaled, complex_half_variance or zeros");
    }
    if (runs < 1) throw ConfigError("runs", "must be >= 1");
    if (epochs < 1) throw ConfigError("epochs", "must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size", "must be >= 1");
    if (!(lr > 0.0)) throw ConfigError("lr", "must be positive");
    if (workers < 1) throw ConfigError("workers", "must be >= 1");
    if (dataset == "synthetic_complex" && domain != "complex") {
        throw ConfigError("domain", "synthetic_complex has complex inputs; a real model cannot consume them");
    }
    if (is_synthetic(dataset)) {
        if (n_samples < 10) throw ConfigError("n_samples", "must be >= 10");
        if (d < 1) throw ConfigError("d", "must be >= 1");
        if (!(sigma >= 0.0)) throw ConfigError("sigma", "must be >= 0");
        if (!(origin_radius > 0.0)) throw ConfigError("origin_radius", "must be positive");
    }
}

std::vector<Domain> ExperimentConfig::domains() const {
    if (domain == "real") return {Domain::real};
    if (domain == "complex") return {Domain::complex};
    return {Domain::real, Domain::complex};
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        }
        cfg.set(trim(body.substr(0, eq)), body.substr(eq + 1));
    }
    return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    return parse_config(in);
}

DatasetDims dataset_dims(const ExperimentConfig& cfg) {
    if (cfg.dataset == "mnist") return {784, 10};
    if (cfg.dataset == "cifar10") return {3072, 10};
    if (cfg.dataset == "cifar100") return {3072, 100};
    if (cfg.dataset == "reuters") return {10000, 46};
    if (cfg.dataset == "synthetic_complex") return {cfg.d, 5};
    if (cfg.dataset == "synthetic_real") return {cfg.d, 3};
    throw ConfigError("dataset", "unknown dataset '" + cfg.dataset + "'");
}

std::vector<NetworkPlan> experiment_plans(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto [n, c] = dataset_dims(cfg);
    const MatchedPair pair = cfg.width_mode == WidthMode::fixed ? build_fixed_pair(n, c, cfg.m, cfg.k)
                                                                 : build_budget_pair(n, c, cfg.budget, cfg.k);
    std::vector<NetworkPlan> plans;
    for (Domain d : cfg.domains()) plans.push_back(d == Domain::real ? pair.real : pair.complex);
    return plans;
}

// ---------------------------------------------------------------------------
// Summary records.
// ---------------------------------------------------------------------------

namespace {

template <typename T>
json opt_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

}  // namespace

std::string to_json_line(const DomainSummary& s) {
    json j;
    j["dataset"] = s.dataset;
    j["k"] = s.k;
    j["activation"] = s.activation;
    j["domain"] = s.domain;
    j["width_mode"] = s.width_mode;
    j["widths"] = s.widths;
    j["params_without_bias"] = s.params_without_bias;
    j["params_with_bias"] = s.params_with_bias;
    j["budget"] = opt_json(s.budget);
    j["runs"] = s.runs;
    j["failed_runs"] = s.failed_runs;
    j["test_accs"] = s.test_accs;
    j["best_test_acc"] = opt_json(s.best_test_acc);
    j["best_train_acc"] = opt_json(s.best_train_acc);
    j["best_seed"] = opt_json(s.best_seed);
    j["mean_test_acc"] = opt_json(s.mean_test_acc);
    j["var_test_acc"] = opt_json(s.var_test_acc);
    j["delta_correlation"] = opt_json(s.delta_correlation);
    j["convergence_lag"] = opt_json(s.convergence_lag);
    return j.dump();
}

DomainSummary summary_from_json_line(const std::string& line) {
    const json j = json::parse(line);
    DomainSummary s;
    s.dataset = j.at("dataset").get<std::string>();
    s.k = j.at("k").get<int>();
    s.activation = j.at("activation").get<std::string>();
    s.domain = j.at("domain").get<std::string>();
    s.width_mode = j.at("width_mode").get<std::string>();
    s.widths = j.at("widths").get<std::vector<Count>>();
    s.params_without_bias = j.at("params_without_bias").get<Count>();
    s.params_with_bias = j.at("params_with_bias").get<Count>();
    s.budget = opt_from<Count>(j, "budget");
    s.runs = j.at("runs").get<int>();
    s.failed_runs = j.at("failed_runs").get<int>();
    s.test_accs = j.at("test_accs").get<std::vector<double>>();
    s.best_test_acc = opt_from<double>(j, "best_test_acc");
    s.best_train_acc = opt_from<double>(j, "best_train_acc");
    s.best_seed = opt_from<std::uint64_t>(j, "best_seed");
    s.mean_test_acc = opt_from<double>(j, "mean_test_acc");
    s.var_test_acc = opt_from<double>(j, "var_test_acc");
    s.delta_correlation = opt_from<double>(j, "delta_correlation");
    s.convergence_lag = opt_from<int>(j, "convergence_lag");
    return s;
}

DomainSummary summarize(const ExperimentConfig& cfg, const NetworkPlan& plan, const std::vector<RunResult>& runs) {
    DomainSummary s;
    s.dataset = cfg.dataset;
    s.k = cfg.k;
    s.activation = cfg.activation;
    s.domain = std::string(domain_name(plan.domain));
    s.width_mode = width_mode_name(cfg.width_mode);
    s.widths = plan.hidden_widths;
    const PlanCounts counts = plan_counts(plan);
    s.params_without_bias = counts.without_bias;
    s.params_with_bias = counts.with_bias;
    if (cfg.width_mode == WidthMode::budget) s.budget = cfg.budget;
    s.runs = static_cast<int>(runs.size());

    for (const auto& r : runs) {
        if (r.failed) ++s.failed_runs;
        else s.test_accs.push_back(r.final_test_acc);
    }
    const BestOfRuns best = best_of_runs(runs);
    if (best.best) {
        s.best_test_acc = best.best->final_test_acc;
        s.best_train_acc = best.best->final_train_acc;
        s.best_seed = best.best->seed;
        double mean = 0.0;
        for (double a : s.test_accs) mean += a;
        mean /= static_cast<double>(s.test_accs.size());
        double var = 0.0;
        for (double a : s.test_accs) var += (a - mean) * (a - mean);
        var /= static_cast<double>(s.test_accs.size());
        s.mean_test_acc = mean;
        s.var_test_acc = var;
        if (best.best->diagnostics.size() >= 10) {
            const FollowScore fs = follow_score(best.best->diagnostics);
            s.delta_correlation = fs.delta_correlation;
            s.convergence_lag = fs.convergence_lag;
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Running.
// ---------------------------------------------------------------------------

Dataset load_experiment_data(const ExperimentConfig& cfg) {
    if (is_synthetic(cfg.dataset)) {
        SyntheticSpec spec;
        spec.n_samples = cfg.n_samples;
        spec.d = cfg.d;
        spec.sigma = cfg.sigma;
        spec.origin_radius = cfg.origin_radius;
        spec.seed = cfg.data_seed;
        spec.mode = cfg.dataset == "synthetic_complex" ? SyntheticMode::complex : SyntheticMode::real_projection;
        try {
            return gen_synthetic(spec);
        } catch (const ValidationError& e) {
            throw DataError(std::string("synthetic generation failed: ") + e.what());
        }
    }
    if (cfg.dataset == "mnist") {
        const fs::path base = dataset_cache_dir();
        for (const fs::path& dir : {base / "mnist", base}) {
            if (fs::exists(dir / "train-images-idx3-ubyte")) {
                try {
                    return load_mnist(dir);
                } catch (const std::exception& e) {
                    throw DataError("mnist: " + std::string(e.what()));
                }
            }
        }
        throw DataError("mnist: train-images-idx3-ubyte not found in " + base.string() + " or " +
                        (base / "mnist").string() + " (set CVNN_DATA_DIR)");
    }
    throw DataError(cfg.dataset + ": no loader; this dataset supports plan only");
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
    const std::vector<NetworkPlan> plans = experiment_plans(cfg);
    const Dataset data = load_experiment_data(cfg);

    const fs::path out_dir(cfg.out);
    fs::create_directories(out_dir);
    if (cfg.export_data) export_csv(data, out_dir / (cfg.dataset + ".csv"));

    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.batch_size = cfg.batch_size;
    tc.adam.lr = cfg.lr;
    tc.runs = cfg.runs;
    tc.base_seed = cfg.base_seed;
    const Activation hidden = parse_activation(cfg.activation);
    const Activation head = parse_activation(cfg.head);
    tc.loss = head == Activation::sigmoid_intensity ? LossKind::binary_ce : LossKind::categorical_ce;

    ExperimentOutcome outcome;
    bool any_success = false;
    std::ofstream summary(out_dir / "summary.jsonl");
    for (const NetworkPlan& plan : plans) {
        ModelSpec spec;
        spec.plan = plan;
        spec.hidden = hidden;
        spec.head = head;
        spec.init.fan_mode = cfg.fan_mode;
        spec.init.scheme = plan.domain == Domain::complex ? cfg.init_scheme : InitScheme::real_glorot;

        const std::string dom(domain_name(plan.domain));
        log << "[" << cfg.dataset << " k=" << cfg.k << " " << cfg.activation << " " << dom << "] "
            << cfg.runs << " runs x " << cfg.epochs << " epochs\n";
        const std::vector<RunResult> runs = train_runs(spec, data, tc, cfg.workers);
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const auto name = cfg.dataset + "_k" + std::to_string(cfg.k) + "_" + cfg.activation + "_" + dom +
                              "_seed" + std::to_string(runs[i].seed) + ".csv";
            write_run_csv(runs[i], out_dir / name);
            if (runs[i].failed) log << "  seed " << runs[i].seed << " failed: " << runs[i].failure << "\n";
        }
        DomainSummary s = summarize(cfg, plan, runs);
        if (s.best_test_acc) {
            any_success = true;
            log << "  best test acc " << *s.best_test_acc << " (seed " << *s.best_seed << ")\n";
        }
        summary << to_json_line(s) << "\n";
        outcome.summaries.push_back(std::move(s));
    }
    outcome.exit_code = any_success ? kExitOk : kExitAllRunsFailed;
    return outcome;
}

std::string plan_only(const ExperimentConfig& cfg) {
    std::ostringstream os;
    const auto [n, c] = dataset_dims(cfg);
    os << "dataset " << cfg.dataset << " (n=" << n << ", c=" << c << "), k=" << cfg.k << ", ";
    if (cfg.width_mode == WidthMode::fixed) os << "fixed width m=" << cfg.m;
    else os << "parameter budget " << cfg.budget;
    os << "\n";
    for (const NetworkPlan& plan : experiment_plans(cfg)) {
        const PlanCounts counts = plan_counts(plan);
        os << domain_name(plan.domain) << ": widths [";
        for (std::size_t i = 0; i < plan.hidden_widths.size(); ++i) {
            os << (i ? ", " : "") << plan.hidden_widths[i];
        }
        os << "] params " << counts.without_bias << " (with bias " << counts.with_bias << ")\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Merging.
// ---------------------------------------------------------------------------

std::vector<MergedRow> report_merge(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw MergeError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    using Key = std::tuple<std::string, int, std::string, std::string>;
    std::map<Key, MergedRow> rows;
    for (const auto& file : files) {
        std::ifstream in(file);
        std::string line;
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            DomainSummary s;
            try {
                s = summary_from_json_line(line);
            } catch (const json::exception& e) {
                throw MergeError("malformed summary in " + file.string() + ": " + e.what());
            }
            Key key{s.dataset, s.k, s.activation, s.domain};
            if (auto it = rows.find(key); it != rows.end()) {
                throw MergeError("duplicate key (" + s.dataset + ", k=" + std::to_string(s.k) + ", " +
                                 s.activation + ", " + s.domain + ") in " + it->second.source.string() +
                                 " and " + file.string());
            }
            rows.emplace(std::move(key), MergedRow{std::move(s), file});
        }
    }
    std::vector<MergedRow> out;
    out.reserve(rows.size());
    for (auto& [key, row] : rows) out.push_back(std::move(row));
    return out;
}

std::string format_merged_table(const std::vector<MergedRow>& rows) {
    std::ostringstream os;
    os << "dataset,k,activation,domain,params,params_with_bias,best_test_acc,mean_test_acc,var_test_acc\n";
    auto opt = [](const std::optional<double>& v) {
        if (!v) return std::string("NA");
        std::ostringstream s;
        s.precision(6);
        s << *v;
        return s.str();
    };
    for (const auto& r : rows) {
        const DomainSummary& s = r.summary;
        os << s.dataset << "," << s.k << "," << s.activation << "," << s.domain << "," << s.params_without_bias
           << "," << s.params_with_bias << "," << opt(s.best_test_acc) << "," << opt(s.mean_test_acc) << ","
           << opt(s.var_test_acc) << "\n";
    }
    return os.str();
}

}  // namespace cvnn
