#pragma once

// Trained hybrid models as versioned JSON documents.
//
// Keys are sorted and numbers use the shortest text that reads back to the
// same double, so save -> load -> save reproduces the file byte for byte.
// Infinities and NaN (the LOO trace can hold them) are stored as strings.

#include "ucpe/error.hpp"
#include "ucpe/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace ucpe {

inline constexpr int kArtifactVersion = 1;
inline constexpr const char* kArtifactFormat = "ucpe-hybrid-model";

namespace artifact_detail {

using json = nlohmann::json;

inline json real(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline double real(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        if (s == "nan") return NAN;
    }
    throw std::runtime_error("expected a number, got " + j.dump());
}

inline json reals(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(real(x));
    return a;
}

inline std::vector<double> reals(const json& j) {
    if (!j.is_array()) throw std::runtime_error("expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : j) out.push_back(real(x));
    return out;
}

inline std::size_t count(const json& j) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        throw std::runtime_error("expected a nonnegative integer, got " + j.dump());
    }
    return j.get<std::size_t>();
}

inline json pair(const RbfInput& p) { return json::array({real(p[0]), real(p[1])}); }

inline RbfInput pair(const json& j) {
    if (!j.is_array() || j.size() != 2) throw std::runtime_error("expected a pair of numbers");
    return {real(j[0]), real(j[1])};
}

inline ValueScale scale_from(const std::string& s) {
    if (s == "linear") return ValueScale::linear;
    if (s == "log") return ValueScale::log;
    throw std::runtime_error("unknown scale '" + s + "'");
}

inline StopRule stop_rule_from(const std::string& s) {
    if (s == "loo_no_improvement") return StopRule::loo_no_improvement;
    if (s == "fixed_count") return StopRule::fixed_count;
    throw std::runtime_error("unknown stop rule '" + s + "'");
}

// Runs `body`, turning any failure into an ArtifactError naming `section`.
template <class F>
auto in_section(const std::string& section, F&& body) {
    try {
        return body();
    } catch (const ArtifactError&) {
        throw;
    } catch (const std::exception& e) {
        throw ArtifactError(section, e.what());
    }
}

}  // namespace artifact_detail

// Config sections are shared with the configuration file reader.

inline nlohmann::json to_json(const ClusterConfig& c) {
    return {{"min_leaf", c.min_leaf}, {"theta", artifact_detail::real(c.theta)}};
}

inline nlohmann::json to_json(const SvmConfig& c) {
    return {{"penalty_c", artifact_detail::real(c.penalty_c)},
            {"gamma", c.gamma ? artifact_detail::real(*c.gamma) : nlohmann::json(nullptr)},
            {"epsilon", artifact_detail::real(c.epsilon)},
            {"max_iterations", c.max_iterations},
            {"kernel_cache_entries", c.kernel_cache_entries}};
}

inline nlohmann::json to_json(const RbfTrainConfig& c) {
    return {{"max_neurons", c.max_neurons},
            {"ridge", artifact_detail::real(c.ridge)},
            {"stop_rule", to_string(c.stop_rule)},
            {"spread", artifact_detail::real(c.spread)},
            {"effort_floor", artifact_detail::real(c.effort_floor)},
            {"input_scale", to_string(c.input_scale)},
            {"target_scale", to_string(c.target_scale)},
            {"linear_terms", c.linear_terms}};
}

inline nlohmann::json to_json(const HybridConfig& c) {
    return {{"cluster", to_json(c.cluster)}, {"svm", to_json(c.svm)}, {"rbf", to_json(c.rbf)}};
}

/// Reads the keys present in `j` over `base`; unknown keys are rejected.
inline ClusterConfig cluster_config_from(const nlohmann::json& j, ClusterConfig base = {}) {
    using namespace artifact_detail;
    for (const auto& [k, v] : j.items()) {
        if (k == "min_leaf") base.min_leaf = count(v);
        else if (k == "theta") base.theta = real(v);
        else throw std::runtime_error("unknown cluster setting '" + k + "'");
    }
    validate(base);
    return base;
}

inline SvmConfig svm_config_from(const nlohmann::json& j, SvmConfig base = {}) {
    using namespace artifact_detail;
    for (const auto& [k, v] : j.items()) {
        if (k == "penalty_c") base.penalty_c = real(v);
        else if (k == "gamma") base.gamma = v.is_null() ? std::nullopt : std::optional<double>(real(v));
        else if (k == "epsilon") base.epsilon = real(v);
        else if (k == "max_iterations") base.max_iterations = count(v);
        else if (k == "kernel_cache_entries") base.kernel_cache_entries = count(v);
        else throw std::runtime_error("unknown svm setting '" + k + "'");
    }
    validate(base);
    return base;
}

inline RbfTrainConfig rbf_config_from(const nlohmann::json& j, RbfTrainConfig base = {}) {
    using namespace artifact_detail;
    for (const auto& [k, v] : j.items()) {
        if (k == "max_neurons") base.max_neurons = count(v);
        else if (k == "ridge") base.ridge = real(v);
        else if (k == "stop_rule") base.stop_rule = stop_rule_from(v.get<std::string>());
        else if (k == "spread") base.spread = real(v);
        else if (k == "effort_floor") base.effort_floor = real(v);
        else if (k == "input_scale") base.input_scale = scale_from(v.get<std::string>());
        else if (k == "target_scale") base.target_scale = scale_from(v.get<std::string>());
        else if (k == "linear_terms") base.linear_terms = v.get<bool>();
        else throw std::runtime_error("unknown rbf setting '" + k + "'");
    }
    validate(base);
    return base;
}

inline HybridConfig hybrid_config_from(const nlohmann::json& j, HybridConfig base = {}) {
    if (!j.is_object()) throw std::runtime_error("hybrid settings must be an object");
    for (const auto& [k, v] : j.items()) {
        if (k == "cluster") base.cluster = cluster_config_from(v, base.cluster);
        else if (k == "svm") base.svm = svm_config_from(v, base.svm);
        else if (k == "rbf") base.rbf = rbf_config_from(v, base.rbf);
        else throw std::runtime_error("unknown hybrid section '" + k + "'");
    }
    return base;
}

inline nlohmann::json model_to_json(const HybridModel& m) {
    using namespace artifact_detail;
    if (!m.trained()) throw ValidationError("cannot save an untrained model");
    json labels = json::array();
    for (const auto& l : m.labels) {
        labels.push_back({{"id", l.id}, {"name", l.name}, {"medoid_productivity", real(l.medoid_productivity)}});
    }

    json nodes = json::array();
    for (const auto& n : m.tree.nodes) {
        nodes.push_back({{"members", n.cluster.members},
                         {"medoid", n.cluster.medoid},
                         {"medoid_value", real(n.cluster.medoid_value)},
                         {"variance", real(n.cluster.variance)},
                         {"children", n.children ? json(*n.children) : json(nullptr)}});
    }

    json binaries = json::array();
    for (const auto& b : m.classifier.binary_models) {
        json sv = json::array();
        for (const auto& v : b.support_vectors) sv.push_back(reals(v));
        binaries.push_back({{"support_vectors", sv},
                            {"dual_coefficients", reals(b.dual_coefficients)},
                            {"bias", real(b.bias)},
                            {"gamma", real(b.gamma)},
                            {"penalty_c", real(b.penalty_c)},
                            {"converged", b.converged},
                            {"iterations", b.iterations}});
    }

    const RbfnnModel& r = m.regressor;
    json neurons = json::array();
    for (const auto& n : r.neurons) neurons.push_back({{"center", pair(n.center)}, {"spread", real(n.spread)}});

    return {
        {"format", kArtifactFormat},
        {"version", kArtifactVersion},
        {"config", to_json(m.config)},
        {"dataset", {{"fingerprint", m.dataset_fingerprint}, {"training_rows", m.training_rows}}},
        {"labels", labels},
        {"tree", {{"nodes", nodes}, {"leaves", m.tree.leaves}}},
        {"classifier",
         {{"class_labels", m.classifier.class_labels},
          {"gamma", real(m.classifier.gamma)},
          {"scaler", {{"offsets", reals(m.classifier.scaler.offsets)}, {"divisors", reals(m.classifier.scaler.divisors)}}},
          {"binary_models", binaries},
          {"training_accuracy", real(m.classifier_training_accuracy)}}},
        {"regressor",
         {{"normalizer",
           {{"scale", to_string(r.normalizer.scale)}, {"mean", pair(r.normalizer.mean)}, {"deviation", pair(r.normalizer.deviation)}}},
          {"neurons", neurons},
          {"output_weights", reals(r.output_weights)},
          {"output_bias", real(r.output_bias)},
          {"linear_terms", r.linear_terms},
          {"linear_weights", pair(r.linear_weights)},
          {"target_scale", to_string(r.target_scale)},
          {"effort_floor", real(r.effort_floor)},
          {"selection_trace", reals(r.selection_trace)},
          {"selected_rows", r.selected_rows}}},
    };
}

inline std::string model_to_string(const HybridModel& m) { return model_to_json(m).dump(2) + "\n"; }

inline HybridModel model_from_json(const nlohmann::json& doc) {
    using namespace artifact_detail;
    if (!doc.is_object()) throw ArtifactError("document", "top level is not an object");
    in_section("format", [&] {
        if (doc.at("format").get<std::string>() != kArtifactFormat) throw std::runtime_error("not a hybrid model file");
        return 0;
    });
    in_section("version", [&] {
        const int v = doc.at("version").get<int>();
        if (v != kArtifactVersion) {
            throw std::runtime_error("file version " + std::to_string(v) + ", this build reads version " +
                                     std::to_string(kArtifactVersion));
        }
        return 0;
    });

    HybridModel m;
    m.config = in_section("config", [&] { return hybrid_config_from(doc.at("config"), HybridConfig{}); });
    in_section("dataset", [&] {
        const auto& d = doc.at("dataset");
        m.dataset_fingerprint = d.at("fingerprint").get<std::string>();
        m.training_rows = count(d.at("training_rows"));
        return 0;
    });
    in_section("labels", [&] {
        for (const auto& l : doc.at("labels")) {
            m.labels.push_back({count(l.at("id")), l.at("name").get<std::string>(), real(l.at("medoid_productivity"))});
        }
        if (m.labels.empty()) throw std::runtime_error("no labels");
        for (std::size_t i = 0; i < m.labels.size(); ++i) {
            if (m.labels[i].id != i) throw std::runtime_error("label ids must be 0..L-1 in order");
        }
        return 0;
    });
    in_section("tree", [&] {
        const auto& t = doc.at("tree");
        for (const auto& n : t.at("nodes")) {
            ClusterTree::Node node;
            for (const auto& x : n.at("members")) node.cluster.members.push_back(count(x));
            node.cluster.medoid = count(n.at("medoid"));
            node.cluster.medoid_value = real(n.at("medoid_value"));
            node.cluster.variance = real(n.at("variance"));
            if (!n.at("children").is_null()) {
                const auto& c = n.at("children");
                if (c.size() != 2) throw std::runtime_error("a node needs exactly two children");
                node.children = std::array<std::size_t, 2>{count(c[0]), count(c[1])};
            }
            m.tree.nodes.push_back(std::move(node));
        }
        for (const auto& x : t.at("leaves")) m.tree.leaves.push_back(count(x));
        for (const auto& n : m.tree.nodes) {
            if (n.children && ((*n.children)[0] >= m.tree.nodes.size() || (*n.children)[1] >= m.tree.nodes.size())) {
                throw std::runtime_error("child index out of range");
            }
        }
        for (std::size_t leaf : m.tree.leaves) {
            if (leaf >= m.tree.nodes.size()) throw std::runtime_error("leaf index out of range");
        }
        if (m.tree.leaves.size() != m.labels.size()) throw std::runtime_error("leaf count differs from label count");
        return 0;
    });
    in_section("classifier", [&] {
        const auto& c = doc.at("classifier");
        for (const auto& x : c.at("class_labels")) m.classifier.class_labels.push_back(count(x));
        m.classifier.gamma = real(c.at("gamma"));
        m.classifier.scaler.offsets = reals(c.at("scaler").at("offsets"));
        m.classifier.scaler.divisors = reals(c.at("scaler").at("divisors"));
        for (const auto& b : c.at("binary_models")) {
            BinarySvmModel bm;
            for (const auto& v : b.at("support_vectors")) bm.support_vectors.push_back(reals(v));
            bm.dual_coefficients = reals(b.at("dual_coefficients"));
            bm.bias = real(b.at("bias"));
            bm.gamma = real(b.at("gamma"));
            bm.penalty_c = real(b.at("penalty_c"));
            bm.converged = b.at("converged").get<bool>();
            bm.iterations = count(b.at("iterations"));
            if (bm.dual_coefficients.size() != bm.support_vectors.size()) {
                throw std::runtime_error("support vector and coefficient counts differ");
            }
            for (const auto& v : bm.support_vectors) {
                if (v.size() != kEnvironmentalFactors) throw std::runtime_error("support vector has the wrong dimension");
            }
            m.classifier.binary_models.push_back(std::move(bm));
        }
        m.classifier_training_accuracy = real(c.at("training_accuracy"));
        const std::size_t l = m.classifier.class_labels.size();
        if (l == 0) throw std::runtime_error("no classes");
        if (m.classifier.binary_models.size() != l * (l - 1) / 2) throw std::runtime_error("wrong number of pairwise models");
        for (std::size_t k : m.classifier.class_labels) {
            if (k >= m.labels.size()) throw std::runtime_error("class label out of range");
        }
        if (m.classifier.scaler.offsets.size() != kEnvironmentalFactors ||
            m.classifier.scaler.divisors.size() != kEnvironmentalFactors) {
            throw std::runtime_error("scaler has the wrong dimension");
        }
        return 0;
    });
    in_section("regressor", [&] {
        const auto& r = doc.at("regressor");
        RbfnnModel& g = m.regressor;
        g.normalizer.scale = scale_from(r.at("normalizer").at("scale").get<std::string>());
        g.normalizer.mean = pair(r.at("normalizer").at("mean"));
        g.normalizer.deviation = pair(r.at("normalizer").at("deviation"));
        for (const auto& n : r.at("neurons")) g.neurons.push_back({pair(n.at("center")), real(n.at("spread"))});
        g.output_weights = reals(r.at("output_weights"));
        g.output_bias = real(r.at("output_bias"));
        g.linear_terms = r.at("linear_terms").get<bool>();
        g.linear_weights = pair(r.at("linear_weights"));
        g.target_scale = scale_from(r.at("target_scale").get<std::string>());
        g.effort_floor = real(r.at("effort_floor"));
        g.selection_trace = reals(r.at("selection_trace"));
        for (const auto& x : r.at("selected_rows")) g.selected_rows.push_back(count(x));
        if (g.output_weights.size() != g.neurons.size()) throw std::runtime_error("weight and neuron counts differ");
        g.trained = true;
        return 0;
    });
    return m;
}

inline HybridModel model_from_string(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ArtifactError("document", std::string("not valid JSON (truncated or corrupted?): ") + e.what());
    }
    return model_from_json(doc);
}

inline void save_model(const HybridModel& m, const std::string& path) {
    const std::string text = model_to_string(m);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write model '" + path + "'");
    out << text;
    if (!out) throw ValidationError("failed writing model '" + path + "'");
}

inline HybridModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open model '" + path + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_from_string(text);
}

}  // namespace ucpe
