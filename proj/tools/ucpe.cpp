// ucpe: size use case models, train and apply the hybrid estimator, and
// benchmark it against the UCP baselines.
//
// Exit codes: 0 success, 1 bad input or usage, 2 internal failure.

#include "ucpe/config.hpp"
#include "ucpe/reports.hpp"
#include "ucpe/synth.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace ucpe;
namespace fs = std::filesystem;

struct Globals {
    std::string config;
    std::string weights;
    std::string out;
    std::string format;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
};

// Hybrid settings that can be given as flags on train and benchmark.
struct HybridFlags {
    std::size_t min_leaf = 0;
    double theta = 0, svm_c = 0, svm_gamma = 0;
    std::size_t max_neurons = 0;
    bool stage_defaults = false;
    CLI::Option *min_leaf_opt{}, *theta_opt{}, *c_opt{}, *gamma_opt{}, *neurons_opt{};

    void add(CLI::App* cmd) {
        min_leaf_opt = cmd->add_option("--min-leaf", min_leaf, "smallest productivity cluster");
        theta_opt = cmd->add_option("--theta", theta, "split when max child variance < theta * parent variance");
        c_opt = cmd->add_option("--svm-c", svm_c, "SVM penalty C");
        gamma_opt = cmd->add_option("--svm-gamma", svm_gamma, "SVM kernel gamma");
        neurons_opt = cmd->add_option("--max-neurons", max_neurons, "RBF network size limit");
        cmd->add_flag("--stage-defaults", stage_defaults, "start from each stage's own defaults instead of the tuned set");
    }

    void apply(HybridConfig& h) const {
        if (min_leaf_opt->count()) h.cluster.min_leaf = min_leaf;
        if (theta_opt->count()) h.cluster.theta = theta;
        if (c_opt->count()) h.svm.penalty_c = svm_c;
        if (gamma_opt->count()) h.svm.gamma = svm_gamma;
        if (neurons_opt->count()) h.rbf.max_neurons = max_neurons;
    }
};

// flag > config file > default
RunConfig resolve(const Globals& g, const HybridFlags* hybrid = nullptr) {
    RunConfig c;
    if (hybrid && hybrid->stage_defaults) c.hybrid = HybridConfig::stage_defaults();
    if (!g.config.empty()) apply_config_file(c, g.config);
    if (g.seed_opt->count()) c.seed = g.seed;
    if (!g.weights.empty()) {
        c.weights = load_weights(g.weights);
        c.weights_source = g.weights;
    }
    if (!g.format.empty()) c.format = parse_report_format(g.format);
    if (!g.out.empty()) c.out = g.out;
    if (hybrid) hybrid->apply(c.hybrid);
    return c;
}

void log_config(const std::string& command, const RunConfig& c) {
    std::cerr << "ucpe " << command << ": config " << to_json(c).dump() << '\n';
}

template <std::size_t N>
std::array<int, N> ratings(const std::vector<int>& v, const char* flag, const char* family) {
    if (v.size() != N) throw ValidationError(std::string(flag) + " needs " + std::to_string(N) + " ratings, got " + std::to_string(v.size()));
    std::array<int, N> out{};
    std::copy(v.begin(), v.end(), out.begin());
    validate_ratings(out, family);
    return out;
}

std::array<std::uint32_t, 3> counts(const std::vector<long long>& v, const char* what) {
    if (v.size() != 3) throw ValidationError(std::string(what) + " needs simple,average,complex counts");
    std::array<std::uint32_t, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
        if (v[i] < 0 || v[i] > 1000000) throw ValidationError(std::string(what) + " counts must lie in [0, 1000000]");
        out[i] = static_cast<std::uint32_t>(v[i]);
    }
    return out;
}

UseCaseCounts from_transactions(const std::vector<long long>& transactions) {
    UseCaseCounts u;
    for (long long t : transactions) {
        if (t < 0) throw ValidationError("transaction counts must be nonnegative");
        switch (classify_use_case(static_cast<std::uint32_t>(t))) {
        case UseCaseClass::simple: ++u.simple; break;
        case UseCaseClass::average: ++u.average; break;
        case UseCaseClass::complex: ++u.complex; break;
        }
    }
    return u;
}

// Output goes to --out when given, stdout otherwise.
template <class F>
void emit(const std::string& path, F&& body) {
    if (path.empty()) {
        body(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    body(out);
    if (!out) throw ValidationError("failed writing '" + path + "'");
}

std::vector<ProjectRecord> read_dataset(const std::string& path) {
    auto loaded = load_dataset(path);
    for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
    return std::move(loaded.records);
}

// size ------------------------------------------------------------------------

struct SizeArgs {
    std::string model;
    std::vector<long long> actors, use_cases, transactions;
    std::vector<int> tech, env;
};

int cmd_size(const Globals& g, const SizeArgs& a) {
    const RunConfig c = resolve(g);
    validate(c.weights);
    log_config("size", c);
    ActorCounts actors;
    UseCaseCounts usecases;
    FactorRatings ratings_in;
    std::vector<long long> act = a.actors, uc = a.use_cases, tr = a.transactions;
    std::vector<int> tech = a.tech, env = a.env;
    if (!a.model.empty()) {
        const auto j = config_detail::read_json(a.model, "model description");
        config_detail::only_keys(j, {"actors", "use_cases", "use_case_transactions", "technical", "environmental"},
                                 "model description");
        try {
            if (j.contains("actors")) act = j["actors"].get<std::vector<long long>>();
            if (j.contains("use_cases")) uc = j["use_cases"].get<std::vector<long long>>();
            if (j.contains("use_case_transactions")) tr = j["use_case_transactions"].get<std::vector<long long>>();
            if (j.contains("technical")) tech = j["technical"].get<std::vector<int>>();
            if (j.contains("environmental")) env = j["environmental"].get<std::vector<int>>();
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("model description '" + a.model + "': " + e.what());
        }
    }
    if (act.empty()) throw ValidationError("actor counts are required (--actors S,A,C)");
    if (uc.empty() && tr.empty()) throw ValidationError("use case counts are required (--use-cases S,A,C or --transactions)");
    if (!uc.empty() && !tr.empty()) throw ValidationError("give either use case counts or transactions, not both");
    const auto ac = counts(act, "actors");
    actors = {ac[0], ac[1], ac[2]};
    if (!uc.empty()) {
        const auto u = counts(uc, "use cases");
        usecases = {u[0], u[1], u[2]};
    } else {
        usecases = from_transactions(tr);
    }
    if (!tech.empty()) ratings_in.technical = ratings<kTechnicalFactors>(tech, "technical", "F");
    if (!env.empty()) ratings_in.environmental = ratings<kEnvironmentalFactors>(env, "environmental", "E");
    const UcpBreakdown b = compute_ucp(actors, usecases, ratings_in, c.weights);
    emit(c.out, [&](std::ostream& o) { write_breakdown(o, b, c.format); });
    return 0;
}

// train -----------------------------------------------------------------------

int cmd_train(const Globals& g, const HybridFlags& h, const std::string& data_path) {
    RunConfig c = resolve(g, &h);
    if (c.out.empty()) c.out = "model.json";
    validate(c);
    log_config("train", c);
    const auto data = read_dataset(data_path);
    const HybridModel m = train_hybrid(data, c.hybrid);
    save_model(m, c.out);
    write_training_summary(std::cout, m, c.format);
    std::cerr << "model written to " << c.out << '\n';
    return 0;
}

// estimate --------------------------------------------------------------------

struct EstimateArgs {
    std::string model;
    double ucp = 0;
    CLI::Option* ucp_opt = nullptr;
    std::vector<int> env;
    std::string data;
    bool json_lines = false;
};

int cmd_estimate(const Globals& g, const EstimateArgs& a) {
    const RunConfig c = resolve(g);
    log_config("estimate", c);
    const HybridModel m = load_model(a.model);
    if (!a.data.empty()) {
        if (a.ucp_opt->count() || !a.env.empty()) throw ValidationError("--data cannot be combined with --ucp/--env");
        const auto rows = read_dataset(a.data);
        emit(c.out, [&](std::ostream& o) {
            if (a.json_lines) {
                for (const auto& r : rows) o << prediction_json(predict_effort(m, r.env, r.ucp), r.ucp, r.id).dump() << '\n';
                return;
            }
            std::vector<std::vector<std::string>> grid{{"id", "ucp", "actual_effort", "effort", "label", "label_name"}};
            for (const auto& r : rows) {
                const auto p = predict_effort(m, r.env, r.ucp);
                grid.push_back({r.id, detail::num(r.ucp, c.format), detail::num(r.effort, c.format), detail::num(p.effort, c.format),
                                std::to_string(p.label), p.label_name});
            }
            detail::write_grid(o, grid, c.format);
        });
        return 0;
    }
    if (!a.ucp_opt->count()) throw ValidationError("--ucp is required (or --data)");
    if (a.env.empty()) throw ValidationError("--env is required (or --data)");
    const auto env = ratings<kEnvironmentalFactors>(a.env, "--env", "E");
    const auto p = predict_effort(m, env, a.ucp);
    emit(c.out, [&](std::ostream& o) {
        if (a.json_lines) o << prediction_json(p, a.ucp).dump() << '\n';
        else write_prediction(o, p, a.ucp, c.format);
    });
    return 0;
}

// benchmark -------------------------------------------------------------------

struct BenchmarkArgs {
    std::string data;
    std::vector<std::string> models;
    std::size_t guess_runs = 0, threads = 0;
    CLI::Option *runs_opt{}, *threads_opt{};
    std::string name;
};

int cmd_benchmark(const Globals& g, const HybridFlags& h, const BenchmarkArgs& a) {
    RunConfig c = resolve(g, &h);
    if (!a.models.empty()) c.models = a.models;
    if (a.runs_opt->count()) c.guess_runs = a.guess_runs;
    if (a.threads_opt->count()) c.threads = a.threads;
    if (c.out.empty()) c.out = "benchmark-report";
    validate(c);
    log_config("benchmark", c);
    const auto data = read_dataset(a.data);
    const std::string name = a.name.empty() ? fs::path(a.data).stem().string() : a.name;
    const BenchmarkResult r = run_benchmark(data, c.benchmark_options(), name);

    write_metrics_report(std::cout, r, c.format);
    if (r.scott_knott) {
        std::cout << '\n';
        write_scott_knott(std::cout, r, c.format);
    }
    const auto files = write_benchmark_files(r, c.out, c.format);
    {
        std::ofstream cfg(fs::path(c.out) / "config.json", std::ios::binary);
        cfg << to_json(c).dump(2) << '\n';
    }
    for (const auto& f : files) std::cerr << "wrote " << f << '\n';
    return 0;
}

// synth -----------------------------------------------------------------------

struct SynthArgs {
    std::string profile = "dataset1";
    std::size_t n = 0;
    CLI::Option* n_opt = nullptr;
    SynthProfile custom;
};

int cmd_synth(const Globals& g, const SynthArgs& a) {
    const RunConfig c = resolve(g);
    log_config("synth", c);
    std::vector<ProjectRecord> rows;
    if (a.profile == "custom") {
        rows = synth_generate(a.custom, a.n_opt->count() ? a.n : a.custom.default_n, c.seed);
    } else {
        if (!is_builtin_profile(a.profile)) throw ValidationError("unknown profile '" + a.profile + "'");
        rows = synth_generate(a.profile, a.n_opt->count() ? a.n : default_size(a.profile), c.seed);
    }
    emit(c.out, [&](std::ostream& o) { write_dataset(o, rows); });
    return 0;
}

// describe --------------------------------------------------------------------

int cmd_describe(const Globals& g, const std::string& data_path) {
    const RunConfig c = resolve(g);
    log_config("describe", c);
    const DatasetStats s = describe(read_dataset(data_path));
    emit(c.out, [&](std::ostream& o) { write_stats(o, s, c.format); });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Use case points sizing and effort estimation"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "JSON configuration file")->check(CLI::ExistingFile);
    g.seed_opt = app.add_option("--seed", g.seed, "seed for every random draw (default 20571)");
    app.add_option("--weights", g.weights, "JSON weight table {technical: [13], environmental: [8]}")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "output file, artifact path or report directory");
    app.add_option("--format", g.format, "table or delimited")->check(CLI::IsMember({"table", "delimited"}));

    SizeArgs size;
    auto* size_cmd = app.add_subcommand("size", "compute UAW, UUC, TCF, EF and UCP");
    size_cmd->add_option("--model", size.model, "JSON model description")->check(CLI::ExistingFile);
    size_cmd->add_option("--actors", size.actors, "simple,average,complex actor counts")->delimiter(',');
    size_cmd->add_option("--use-cases", size.use_cases, "simple,average,complex use case counts")->delimiter(',');
    size_cmd->add_option("--transactions", size.transactions, "transactions per use case")->delimiter(',');
    size_cmd->add_option("--tech", size.tech, "13 technical ratings (default all 0)")->delimiter(',');
    size_cmd->add_option("--env", size.env, "8 environmental ratings (default all 0)")->delimiter(',');

    HybridFlags train_flags;
    std::string train_data;
    auto* train_cmd = app.add_subcommand("train", "train the hybrid model and write an artifact to --out");
    train_cmd->add_option("dataset", train_data, "dataset file")->required()->check(CLI::ExistingFile);
    train_flags.add(train_cmd);

    EstimateArgs est;
    auto* est_cmd = app.add_subcommand("estimate", "estimate effort with a trained model");
    est_cmd->add_option("--model", est.model, "trained model artifact")->required()->check(CLI::ExistingFile);
    est.ucp_opt = est_cmd->add_option("--ucp", est.ucp, "size in use case points");
    est_cmd->add_option("--env", est.env, "8 environmental ratings")->delimiter(',');
    est_cmd->add_option("--data", est.data, "estimate every row of a dataset file")->check(CLI::ExistingFile);
    est_cmd->add_flag("--json-lines", est.json_lines, "one JSON object per estimate");

    HybridFlags bench_flags;
    BenchmarkArgs bench;
    auto* bench_cmd = app.add_subcommand("benchmark", "leave-one-out comparison of the models");
    bench_cmd->add_option("dataset", bench.data, "dataset file")->required()->check(CLI::ExistingFile);
    bench_cmd->add_option("--models", bench.models, "any of hybrid,karner,sw,nassif")->delimiter(',');
    bench.runs_opt = bench_cmd->add_option("--guess-runs", bench.guess_runs, "random guessing runs for SP0");
    bench.threads_opt = bench_cmd->add_option("--threads", bench.threads, "folds evaluated in parallel");
    bench_cmd->add_option("--name", bench.name, "dataset name in reports (default: file stem)");
    bench_flags.add(bench_cmd);

    SynthArgs syn;
    auto* syn_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    syn_cmd->add_option("--profile", syn.profile, "dataset1, dataset2, dataset3 or custom")->capture_default_str();
    syn.n_opt = syn_cmd->add_option("--n", syn.n, "rows (default: the profile's size)");
    syn_cmd->add_option("--productivity-mean", syn.custom.productivity_mean, "custom profile")->capture_default_str();
    syn_cmd->add_option("--productivity-sd", syn.custom.productivity_sd, "custom profile")->capture_default_str();
    syn_cmd->add_option("--ucp-mean", syn.custom.ucp_mean, "custom profile")->capture_default_str();
    syn_cmd->add_option("--ucp-sd", syn.custom.ucp_sd, "custom profile")->capture_default_str();
    syn_cmd->add_option("--signal-share", syn.custom.signal_share, "custom profile")->capture_default_str();
    syn_cmd->add_option("--effort-noise", syn.custom.effort_noise, "custom profile")->capture_default_str();

    std::string describe_data;
    auto* desc_cmd = app.add_subcommand("describe", "mean, sd, skewness and kurtosis of UCP, effort and productivity");
    desc_cmd->add_option("dataset", describe_data, "dataset file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (size_cmd->parsed()) return cmd_size(g, size);
        if (train_cmd->parsed()) return cmd_train(g, train_flags, train_data);
        if (est_cmd->parsed()) return cmd_estimate(g, est);
        if (bench_cmd->parsed()) return cmd_benchmark(g, bench_flags, bench);
        if (syn_cmd->parsed()) return cmd_synth(g, syn);
        if (desc_cmd->parsed()) return cmd_describe(g, describe_data);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ArtifactError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const StageError& e) {
        std::cerr << "error: training failed in stage " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
