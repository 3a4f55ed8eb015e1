#pragma once

// Text output for the size, describe, train and estimate commands. The CLI
// prints exactly what these write.

#include "ucpe/benchmark.hpp"
#include "ucpe/dataset.hpp"
#include "ucpe/pipeline.hpp"
#include "ucpe/ucp.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <ostream>
#include <string>

namespace ucpe {

inline void write_breakdown(std::ostream& out, const UcpBreakdown& b, ReportFormat f) {
    using detail::num;
    detail::write_grid(out,
                       {{"quantity", "value"},
                        {"UAW", num(b.uaw, f)},
                        {"UUC", num(b.uuc, f)},
                        {"UUCP", num(b.uucp, f)},
                        {"TCF", num(b.tcf, f, 4)},
                        {"EF", num(b.ef, f, 4)},
                        {"UCP", num(b.ucp, f)}},
                       f);
}

inline void write_stats(std::ostream& out, const DatasetStats& s, ReportFormat f) {
    auto opt = [&](const std::optional<double>& v) { return v ? detail::num(*v, f) : std::string("n/a"); };
    std::vector<std::vector<std::string>> rows{{"variable", "n", "mean", "sd", "skewness", "kurtosis"}};
    auto add = [&](const char* name, const VariableStats& v) {
        rows.push_back({name, std::to_string(s.n), detail::num(v.mean, f), detail::num(v.sd, f), opt(v.skewness), opt(v.kurtosis)});
    };
    add("UCP", s.ucp);
    add("Effort", s.effort);
    add("Productivity", s.productivity);
    detail::write_grid(out, rows, f);
}

inline void write_training_summary(std::ostream& out, const HybridModel& m, ReportFormat f) {
    std::vector<std::size_t> members(m.labels.size(), 0);
    for (std::size_t k = 0; k < m.tree.leaf_count(); ++k) members.at(k) = m.tree.leaf(k).members.size();
    std::vector<std::vector<std::string>> rows{{"label", "name", "medoid_productivity", "members"}};
    for (const auto& l : m.labels) {
        rows.push_back({std::to_string(l.id), l.name, detail::num(l.medoid_productivity, f, 4), std::to_string(members[l.id])});
    }
    detail::write_grid(out, rows, f);
    if (f == ReportFormat::table) out << '\n';
    detail::write_grid(out,
                       {{"quantity", "value"},
                        {"training_rows", std::to_string(m.training_rows)},
                        {"dataset_fingerprint", m.dataset_fingerprint},
                        {"labels", std::to_string(m.labels.size())},
                        {"classifier_training_accuracy", detail::num(m.classifier_training_accuracy, f, 4)},
                        {"regressor_neurons", std::to_string(m.regressor.neurons.size())},
                        {"regressor_loo_mse", detail::format_number(m.regressor.loo_mse())}},
                       f);
}

inline nlohmann::json prediction_json(const HybridPrediction& p, double ucp, const std::string& id = {}) {
    nlohmann::json j;
    if (!id.empty()) j["id"] = id;
    j["ucp"] = ucp;
    j["effort"] = p.effort;
    j["label"] = p.label;
    j["label_name"] = p.label_name;
    j["medoid_productivity"] = p.medoid_productivity;
    j["clamped"] = p.clamped;
    return j;
}

inline void write_prediction(std::ostream& out, const HybridPrediction& p, double ucp, ReportFormat f) {
    detail::write_grid(out,
                       {{"quantity", "value"},
                        {"ucp", detail::num(ucp, f)},
                        {"effort", detail::num(p.effort, f)},
                        {"label", std::to_string(p.label)},
                        {"label_name", p.label_name},
                        {"medoid_productivity", detail::num(p.medoid_productivity, f, 4)},
                        {"clamped", p.clamped ? "yes" : "no"}},
                       f);
}

}  // namespace ucpe
