#pragma once

// The two-stage hybrid estimator.
//
// Training: productivity = effort / ucp per row; bisecting k-medoids over
// productivity gives ordinal labels; the SVM learns label from environmental
// ratings; the RBF network learns effort from (ucp, actual productivity).
// Estimation: ratings -> label -> that label's medoid productivity -> network.

#include "ucpe/cluster.hpp"
#include "ucpe/dataset.hpp"
#include "ucpe/error.hpp"
#include "ucpe/rbfnn.hpp"
#include "ucpe/svm.hpp"

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace ucpe {

/// Stage settings. The defaults here differ from each stage's own defaults:
/// coarser productivity clusters (the classifier cannot separate a dozen
/// levels from 8 ratings), a wide, nearly linear SVM kernel with a hard
/// margin, and a regressor with log scales plus direct linear terms so it
/// extrapolates over heavy-tailed UCP.
struct HybridConfig {
    ClusterConfig cluster{5, 0.7};
    SvmConfig svm{100.0, 0.02};
    RbfTrainConfig rbf = tuned_rbf();

    static RbfTrainConfig tuned_rbf() {
        RbfTrainConfig c;
        c.input_scale = ValueScale::log;
        c.target_scale = ValueScale::log;
        c.linear_terms = true;
        return c;
    }

    /// Every stage on its own defaults.
    static HybridConfig stage_defaults() { return {ClusterConfig{}, SvmConfig{}, RbfTrainConfig{}}; }
};

struct HybridModel {
    std::vector<ProductivityLabel> labels;
    ClusterTree tree;
    MulticlassSvmModel classifier;
    RbfnnModel regressor;
    HybridConfig config;
    std::string dataset_fingerprint;
    std::size_t training_rows = 0;
    double classifier_training_accuracy = 0.0;

    bool trained() const noexcept { return classifier.trained() && regressor.trained && !labels.empty(); }
};

struct HybridPrediction {
    double effort = 0.0;
    std::size_t label = 0;
    std::string label_name;
    double medoid_productivity = 0.0;
    double regressor_output = 0.0;  // before the effort floor
    bool clamped = false;
};

/// FNV-1a over the serialized dataset.
inline std::string dataset_fingerprint(const std::vector<ProjectRecord>& records) {
    std::ostringstream text;
    write_dataset(text, records);
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text.str()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = hex[h & 0xf];
    return out;
}

inline HybridModel train_hybrid(const std::vector<ProjectRecord>& records, const HybridConfig& config = {}) {
    if (records.size() < 2) throw ValidationError("hybrid training needs at least 2 projects");
    std::vector<ProjectRecord> rows(records);
    for (auto& r : rows) {
        validate(r);
        r.productivity = r.effort / r.ucp;
    }

    HybridModel model;
    model.config = config;
    model.training_rows = rows.size();
    model.dataset_fingerprint = dataset_fingerprint(rows);

    std::vector<double> productivity;
    for (const auto& r : rows) productivity.push_back(r.productivity);
    std::vector<std::size_t> row_label;
    try {
        model.tree = bisect(productivity, config.cluster);
        model.labels = make_labels(model.tree);
        row_label = row_labels(model.tree);
    } catch (const std::exception& e) {
        throw StageError("cluster", e.what());
    }

    std::vector<FeatureVector> features;
    for (const auto& r : rows) features.push_back(to_features(r.env));
    try {
        model.classifier = train_multiclass(features, row_label, config.svm);
    } catch (const std::exception& e) {
        throw StageError("classify", e.what());
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) hits += model.classifier.predict(features[i]) == row_label[i];
    model.classifier_training_accuracy = static_cast<double>(hits) / static_cast<double>(rows.size());

    std::vector<RbfRow> regression;
    for (const auto& r : rows) regression.push_back({r.ucp, r.productivity, r.effort});
    try {
        model.regressor = train_rbfnn(regression, config.rbf);
    } catch (const std::exception& e) {
        throw StageError("regress", e.what());
    }
    return model;
}

inline HybridPrediction predict_effort(const HybridModel& model, const EnvironmentalRatings& env, double ucp) {
    if (!model.trained()) throw ValidationError("hybrid model is not trained");
    validate_ratings(env, "environmental");
    if (!(ucp > 0.0) || !std::isfinite(ucp)) throw ValidationError("ucp must be positive");
    HybridPrediction p;
    p.label = predict_label(model.classifier, env);
    const ProductivityLabel& label = model.labels.at(p.label);
    p.label_name = label.name;
    p.medoid_productivity = label.medoid_productivity;
    const RbfPrediction r = model.regressor.predict_detailed(ucp, p.medoid_productivity);
    p.effort = r.effort;
    p.regressor_output = r.raw;
    p.clamped = r.clamped;
    return p;
}

}  // namespace ucpe
