#pragma once

// Leave-one-out comparison of the hybrid estimator against the UCP baselines,
// and the report files that go with it.

#include "ucpe/baselines.hpp"
#include "ucpe/metrics.hpp"
#include "ucpe/pipeline.hpp"
#include "ucpe/stats.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ucpe {

inline const std::vector<std::string>& known_models() {
    static const std::vector<std::string> names{"karner", "sw", "nassif", "hybrid"};
    return names;
}

inline bool is_known_model(const std::string& name) {
    for (const auto& k : known_models()) {
        if (k == name) return true;
    }
    return false;
}

struct BenchmarkOptions {
    std::vector<std::string> models = known_models();
    HybridConfig hybrid;
    WeightTable weights = WeightTable::defaults();
    std::optional<NassifProductivityMap> nassif_map;
    std::uint64_t seed = kDefaultGuessSeed;
    std::size_t guess_runs = kDefaultGuessRuns;
    std::size_t threads = 1;
};

inline std::vector<NassifRow> nassif_rows(const std::vector<ProjectRecord>& records) {
    std::vector<NassifRow> rows;
    for (const auto& r : records) rows.push_back({r.ucp, r.effort / r.ucp, r.effort, r.env});
    return rows;
}

inline ModelBuilder make_builder(const std::string& name, const BenchmarkOptions& opt) {
    if (name == "karner") {
        return [](const std::vector<ProjectRecord>&) -> Predictor {
            return [](const ProjectRecord& r) { return karner_estimate(r.ucp); };
        };
    }
    if (name == "sw") {
        return [](const std::vector<ProjectRecord>&) -> Predictor {
            return [](const ProjectRecord& r) { return sw_estimate(r.ucp, r.env); };
        };
    }
    if (name == "nassif") {
        return [weights = opt.weights, map = opt.nassif_map](const std::vector<ProjectRecord>& train) -> Predictor {
            const auto rows = nassif_rows(train);
            const NassifModel m = nassif_fit(rows, weights, map);
            return [m, weights](const ProjectRecord& r) { return nassif_estimate(m, r.ucp, r.env, weights); };
        };
    }
    if (name == "hybrid") {
        return [config = opt.hybrid](const std::vector<ProjectRecord>& train) -> Predictor {
            auto model = std::make_shared<const HybridModel>(train_hybrid(train, config));
            return [model](const ProjectRecord& r) { return predict_effort(*model, r.env, r.ucp).effort; };
        };
    }
    throw ValidationError("unknown model '" + name + "' (expected karner, sw, nassif or hybrid)");
}

struct ModelResult {
    std::string name;
    std::vector<PredictionRecord> records;
    MetricReport metrics;
};

struct BenchmarkResult {
    std::string dataset;
    std::size_t n = 0;
    std::vector<ModelResult> models;
    std::optional<SignificanceReport> significance;  // two or more models
    std::optional<ScottKnottResult> scott_knott;     // two or more models

    const ModelResult& model(const std::string& name) const {
        for (const auto& m : models) {
            if (m.name == name) return m;
        }
        throw ValidationError("model '" + name + "' was not benchmarked");
    }
};

inline BenchmarkResult run_benchmark(const std::vector<ProjectRecord>& data, const BenchmarkOptions& opt,
                                     const std::string& dataset_name = "dataset") {
    if (opt.models.empty()) throw ValidationError("no models to benchmark");
    for (std::size_t i = 0; i < opt.models.size(); ++i) {
        if (!is_known_model(opt.models[i])) make_builder(opt.models[i], opt);  // throws with the name
        for (std::size_t j = 0; j < i; ++j) {
            if (opt.models[i] == opt.models[j]) throw ValidationError("model '" + opt.models[i] + "' listed twice");
        }
    }
    BenchmarkResult res;
    res.dataset = dataset_name;
    res.n = data.size();
    std::vector<std::pair<std::string, std::vector<double>>> errors;
    for (const auto& name : opt.models) {
        ModelResult m;
        m.name = name;
        m.records = loocv(data, make_builder(name, opt), name, opt.threads);
        m.metrics = metric_report(m.records, opt.guess_runs, opt.seed);
        errors.emplace_back(name, absolute_errors(m.records));
        res.models.push_back(std::move(m));
    }
    if (errors.size() >= 2) {
        res.significance = significance_report(errors);
        res.scott_knott = scott_knott_boxcox(errors);
    }
    return res;
}

// Reports --------------------------------------------------------------------

enum class ReportFormat { table, delimited };

inline ReportFormat parse_report_format(const std::string& s) {
    if (s == "table") return ReportFormat::table;
    if (s == "delimited") return ReportFormat::delimited;
    throw ValidationError("format must be 'table' or 'delimited', got '" + s + "'");
}

namespace detail {

inline std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

/// Rows of cells, written either padded into columns or comma separated.
inline void write_grid(std::ostream& out, const std::vector<std::vector<std::string>>& rows, ReportFormat format) {
    if (format == ReportFormat::delimited) {
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
            out << '\n';
        }
        return;
    }
    std::vector<std::size_t> width;
    for (const auto& row : rows) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line += "  ";
            line += row[i];
            if (i + 1 < row.size()) line.append(width[i] - row[i].size(), ' ');
        }
        out << line << '\n';
    }
}

inline std::string num(double v, ReportFormat f, int digits = 2) {
    return f == ReportFormat::delimited ? format_number(v) : fixed(v, digits);
}

// Nassif's membership functions and defuzzification are reconstructed, so
// every report flags it.
inline bool is_approximate(const std::string& model) { return model == "nassif"; }

inline void write_approximate_note(std::ostream& out, const BenchmarkResult& r) {
    for (const auto& m : r.models) {
        if (is_approximate(m.name)) out << m.name << ": approximate baseline\n";
    }
}

}  // namespace detail

/// Models as columns, one row per measure, the dataset in the first column.
inline void write_metrics_report(std::ostream& out, const BenchmarkResult& r, ReportFormat f) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> head{"dataset", "measure"};
    for (const auto& m : r.models) head.push_back(m.name);
    rows.push_back(head);
    auto add = [&](const std::string& measure, auto get, int digits) {
        std::vector<std::string> row{r.dataset, measure};
        for (const auto& m : r.models) row.push_back(detail::num(get(m.metrics), f, digits));
        rows.push_back(row);
    };
    add("SA%", [](const MetricReport& m) { return 100.0 * m.sa; }, 2);
    add("delta", [](const MetricReport& m) { return m.abs_effect_size; }, 2);
    add("delta_signed", [](const MetricReport& m) { return m.effect_size; }, 2);
    add("MAE", [](const MetricReport& m) { return m.mae; }, 2);
    add("MBRE", [](const MetricReport& m) { return m.mbre; }, 2);
    add("MIBRE", [](const MetricReport& m) { return m.mibre; }, 2);
    add("MAE_p0", [](const MetricReport& m) { return m.baseline_mae; }, 2);
    add("SP0", [](const MetricReport& m) { return m.baseline_sd; }, 2);
    if (f == ReportFormat::delimited) {
        std::vector<std::string> row{r.dataset, "approximate_baseline"};
        for (const auto& m : r.models) row.push_back(detail::is_approximate(m.name) ? "1" : "0");
        rows.push_back(row);
    }
    detail::write_grid(out, rows, f);
    if (f == ReportFormat::table) detail::write_approximate_note(out, r);
}

/// SA of the hybrid model with each other model's MAE as the baseline:
/// 100 * (1 - MAE_hybrid / MAE_other).
inline void write_relative_report(std::ostream& out, const BenchmarkResult& r, ReportFormat f,
                                  const std::string& subject = "hybrid") {
    const ModelResult& own = r.model(subject);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> head{"dataset", "measure"};
    std::vector<std::string> row{r.dataset, "SA%"};
    for (const auto& m : r.models) {
        if (m.name == subject) continue;
        head.push_back(m.name + "_as_baseline");
        row.push_back(detail::num(100.0 * (1.0 - own.metrics.mae / m.metrics.mae), f));
    }
    rows.push_back(head);
    rows.push_back(row);
    detail::write_grid(out, rows, f);
    if (f == ReportFormat::table) detail::write_approximate_note(out, r);
}

/// Lower-triangular matrix: '*' where the rank-sum test rejects at alpha.
inline void write_significance_matrix(std::ostream& out, const BenchmarkResult& r, ReportFormat f) {
    if (!r.significance) return;
    if (f == ReportFormat::delimited) {
        std::vector<std::vector<std::string>> rows{{"model_a", "model_b", "rank_sum", "p_value", "exact", "significant"}};
        for (const auto& e : r.significance->entries) {
            rows.push_back({e.model_a, e.model_b, detail::num(e.result.statistic, f), detail::num(e.result.p_value, f),
                            e.result.exact ? "1" : "0", e.significant ? "1" : "0"});
        }
        detail::write_grid(out, rows, f);
        return;
    }
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> head{""};
    for (std::size_t j = 0; j + 1 < r.models.size(); ++j) head.push_back(r.models[j].name);
    rows.push_back(head);
    for (std::size_t i = 1; i < r.models.size(); ++i) {
        std::vector<std::string> row{r.models[i].name};
        for (std::size_t j = 0; j < i; ++j) {
            const auto* e = r.significance->find(r.models[i].name, r.models[j].name);
            row.push_back(e->significant ? "* p=" + detail::fixed(e->result.p_value, 4)
                                         : "  p=" + detail::fixed(e->result.p_value, 4));
        }
        rows.push_back(row);
    }
    detail::write_grid(out, rows, f);
    out << "* significant at alpha = " << detail::fixed(r.significance->alpha, 2) << '\n';
    detail::write_approximate_note(out, r);
}

/// Groups from worst (first) to best (last).
inline void write_scott_knott(std::ostream& out, const BenchmarkResult& r, ReportFormat f) {
    if (!r.scott_knott) return;
    const auto& sk = *r.scott_knott;
    std::vector<std::vector<std::string>> rows{{"group", "model", "mean_transformed_ae"}};
    for (std::size_t g = 0; g < sk.groups.size(); ++g) {
        for (const auto& m : sk.groups[g]) rows.push_back({std::to_string(g + 1), m, detail::num(sk.means.at(m), f, 4)});
    }
    detail::write_grid(out, rows, f);
    if (f == ReportFormat::table) {
        out << "box-cox lambda " << detail::fixed(sk.boxcox_lambda, 4) << ", shift " << detail::fixed(sk.boxcox_shift, 4)
            << "; the last group has the smallest errors\n";
        detail::write_approximate_note(out, r);
    }
}

/// x = position in the Scott-Knott ordering, y = mean transformed absolute
/// error, with min and max of the transformed errors for error bars.
inline void write_plot_data(std::ostream& out, const BenchmarkResult& r) {
    if (!r.scott_knott) return;
    const auto& sk = *r.scott_knott;
    out << "x,model,group,mean,min,max\n";
    std::size_t x = 0;
    for (std::size_t g = 0; g < sk.groups.size(); ++g) {
        for (const auto& name : sk.groups[g]) {
            double lo = 1e300, hi = -1e300;
            for (const auto& rec : r.model(name).records) {
                const double t = boxcox_value(absolute_error(rec.actual, rec.predicted) + sk.boxcox_shift, sk.boxcox_lambda);
                lo = std::min(lo, t);
                hi = std::max(hi, t);
            }
            out << ++x << ',' << name << ',' << g + 1 << ',' << detail::format_number(sk.means.at(name)) << ','
                << detail::format_number(lo) << ',' << detail::format_number(hi) << '\n';
        }
    }
}

inline void write_predictions(std::ostream& out, const BenchmarkResult& r) {
    out << "model,fold,actual,predicted,abs_error\n";
    for (const auto& m : r.models) {
        for (const auto& rec : m.records) {
            out << m.name << ',' << rec.fold_index << ',' << detail::format_number(rec.actual) << ','
                << detail::format_number(rec.predicted) << ',' << detail::format_number(absolute_error(rec.actual, rec.predicted)) << '\n';
        }
    }
}

/// Writes every report into `dir`; returns the paths written, in order.
inline std::vector<std::string> write_benchmark_files(const BenchmarkResult& r, const std::string& dir, ReportFormat f) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string ext = f == ReportFormat::delimited ? ".csv" : ".txt";
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, auto&& body) {
        const std::string path = (fs::path(dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ValidationError("cannot write report '" + path + "'");
        body(out);
        if (!out) throw ValidationError("failed writing report '" + path + "'");
        written.push_back(path);
    };
    emit("metrics" + ext, [&](std::ostream& o) { write_metrics_report(o, r, f); });
    bool has_hybrid = false;
    for (const auto& m : r.models) has_hybrid = has_hybrid || m.name == "hybrid";
    if (has_hybrid && r.models.size() >= 2) {
        emit("relative" + ext, [&](std::ostream& o) { write_relative_report(o, r, f); });
    }
    if (r.significance) emit("significance" + ext, [&](std::ostream& o) { write_significance_matrix(o, r, f); });
    if (r.scott_knott) {
        emit("scott_knott" + ext, [&](std::ostream& o) { write_scott_knott(o, r, f); });
        emit("plot_multiple_comparison.csv", [&](std::ostream& o) { write_plot_data(o, r); });
    }
    emit("predictions.csv", [&](std::ostream& o) { write_predictions(o, r); });
    return written;
}

}  // namespace ucpe
