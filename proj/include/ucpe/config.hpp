#pragma once

// Run configuration shared by the command-line tool: a JSON config file read
// over built-in defaults, then command-line flags over that.
//
//   {
//     "seed": 20571,
//     "weights": "weights.json" | {"technical": [...13], "environmental": [...8]},
//     "format": "table" | "delimited",
//     "out": "path",
//     "hybrid": {"cluster": {...}, "svm": {...}, "rbf": {...}},
//     "benchmark": {"models": ["karner", ...], "guess_runs": 1000, "threads": 1},
//     "nassif_map": {"breakpoints": [b1, b2, b3], "levels": [l1, l2, l3, l4]}
//   }

#include "ucpe/artifact.hpp"
#include "ucpe/benchmark.hpp"
#include "ucpe/error.hpp"
#include "ucpe/ucp.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace ucpe {

struct RunConfig {
    std::uint64_t seed = kDefaultGuessSeed;
    WeightTable weights = WeightTable::defaults();
    std::string weights_source = "default";
    ReportFormat format = ReportFormat::table;
    std::string out;
    HybridConfig hybrid;
    std::vector<std::string> models = known_models();
    std::size_t guess_runs = kDefaultGuessRuns;
    std::size_t threads = 1;
    std::optional<NassifProductivityMap> nassif_map;

    BenchmarkOptions benchmark_options() const {
        BenchmarkOptions o;
        o.models = models;
        o.hybrid = hybrid;
        o.weights = weights;
        o.nassif_map = nassif_map;
        o.seed = seed;
        o.guess_runs = guess_runs;
        o.threads = threads;
        return o;
    }
};

namespace config_detail {

using json = nlohmann::json;

inline json read_json(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(std::string("cannot open ") + what + " '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError(std::string(what) + " '" + path + "' is not valid JSON: " + e.what());
    }
}

template <std::size_t N>
std::array<double, N> fixed_reals(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != N) {
        throw ValidationError(std::string("'") + key + "' must be an array of " + std::to_string(N) + " numbers");
    }
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        if (!j.at(key)[i].is_number()) throw ValidationError(std::string("'") + key + "' must hold numbers only");
        out[i] = j.at(key)[i].get<double>();
    }
    return out;
}

inline void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        bool ok = false;
        for (const char* allowed : keys) ok = ok || k == allowed;
        if (!ok) throw ValidationError("unknown key '" + k + "' in " + where);
    }
}

inline std::size_t count(const json& j, const std::string& key) {
    if (!j.is_number_integer() || j.get<long long>() < 0) throw ValidationError("'" + key + "' must be a nonnegative integer");
    return j.get<std::size_t>();
}

}  // namespace config_detail

inline WeightTable weights_from_json(const nlohmann::json& j) {
    config_detail::only_keys(j, {"technical", "environmental"}, "weight table");
    WeightTable w;
    w.technical = config_detail::fixed_reals<kTechnicalFactors>(j, "technical");
    w.environmental = config_detail::fixed_reals<kEnvironmentalFactors>(j, "environmental");
    validate(w);
    return w;
}

inline WeightTable load_weights(const std::string& path) {
    return weights_from_json(config_detail::read_json(path, "weight file"));
}

inline NassifProductivityMap nassif_map_from_json(const nlohmann::json& j) {
    config_detail::only_keys(j, {"breakpoints", "levels"}, "nassif_map");
    NassifProductivityMap m;
    m.breakpoints = config_detail::fixed_reals<3>(j, "breakpoints");
    m.levels = config_detail::fixed_reals<4>(j, "levels");
    validate(m);
    return m;
}

/// Applies a config document over `c`. Relative weight-file paths resolve
/// against `base_dir`.
inline void apply_config(RunConfig& c, const nlohmann::json& j, const std::string& base_dir = ".") {
    using config_detail::count;
    config_detail::only_keys(j, {"seed", "weights", "format", "out", "hybrid", "benchmark", "nassif_map"}, "config");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ValidationError("'seed' must be a nonnegative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("weights")) {
        const auto& w = j["weights"];
        if (w.is_string()) {
            std::filesystem::path p = w.get<std::string>();
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            c.weights = load_weights(p.string());
            c.weights_source = p.string();
        } else {
            c.weights = weights_from_json(w);
            c.weights_source = "config";
        }
    }
    if (j.contains("format")) {
        if (!j["format"].is_string()) throw ValidationError("'format' must be a string");
        c.format = parse_report_format(j["format"].get<std::string>());
    }
    if (j.contains("out")) {
        if (!j["out"].is_string()) throw ValidationError("'out' must be a string");
        c.out = j["out"].get<std::string>();
    }
    if (j.contains("hybrid")) {
        try {
            c.hybrid = hybrid_config_from(j["hybrid"], c.hybrid);
        } catch (const std::exception& e) {
            throw ValidationError(std::string("config 'hybrid': ") + e.what());
        }
    }
    if (j.contains("benchmark")) {
        const auto& b = j["benchmark"];
        config_detail::only_keys(b, {"models", "guess_runs", "threads"}, "'benchmark'");
        if (b.contains("models")) {
            if (!b["models"].is_array()) throw ValidationError("'models' must be an array of names");
            c.models.clear();
            for (const auto& m : b["models"]) {
                if (!m.is_string()) throw ValidationError("'models' must be an array of names");
                c.models.push_back(m.get<std::string>());
            }
        }
        if (b.contains("guess_runs")) c.guess_runs = count(b["guess_runs"], "guess_runs");
        if (b.contains("threads")) c.threads = count(b["threads"], "threads");
    }
    if (j.contains("nassif_map")) c.nassif_map = nassif_map_from_json(j["nassif_map"]);
}

inline void apply_config_file(RunConfig& c, const std::string& path) {
    const auto j = config_detail::read_json(path, "config file");
    apply_config(c, j, std::filesystem::path(path).parent_path().string());
}

/// Checks everything a command could trip over later, so bad settings are
/// reported as usage errors rather than stage failures.
inline void validate(const RunConfig& c) {
    validate(c.weights);
    validate(c.hybrid.cluster);
    validate(c.hybrid.svm);
    validate(c.hybrid.rbf);
    if (c.models.empty()) throw ValidationError("no models selected");
    for (const auto& m : c.models) {
        if (!is_known_model(m)) throw ValidationError("unknown model '" + m + "' (expected karner, sw, nassif or hybrid)");
    }
    if (c.guess_runs < 2) throw ValidationError("guess_runs must be at least 2");
    if (c.threads < 1) throw ValidationError("threads must be at least 1");
    if (c.nassif_map) validate(*c.nassif_map);
}

/// Everything that can change a result, as one JSON object.
inline nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j;
    j["seed"] = c.seed;
    j["weights"] = {{"source", c.weights_source},
                    {"technical", c.weights.technical},
                    {"environmental", c.weights.environmental}};
    j["format"] = c.format == ReportFormat::table ? "table" : "delimited";
    j["out"] = c.out;
    j["hybrid"] = to_json(c.hybrid);
    j["benchmark"] = {{"models", c.models}, {"guess_runs", c.guess_runs}, {"threads", c.threads}};
    if (c.nassif_map) {
        j["nassif_map"] = {{"breakpoints", c.nassif_map->breakpoints}, {"levels", c.nassif_map->levels}};
    } else {
        j["nassif_map"] = "fitted";
    }
    return j;
}

}  // namespace ucpe
