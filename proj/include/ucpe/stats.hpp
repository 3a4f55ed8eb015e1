#pragma once

// Significance testing over absolute residuals: Wilcoxon rank-sum, Box-Cox,
// and Scott-Knott grouping of model means.

#include "ucpe/error.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace ucpe {

struct RankSumResult {
    double statistic = 0.0;  // rank sum of the first sample (midranks)
    double p_value = 1.0;
    bool exact = false;

    bool significant(double alpha = 0.05) const { return p_value < alpha; }
};

/// Midranks of the pooled sample, 1-based.
inline std::vector<double> midranks(std::span<const double> pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }
    return rank;
}

/// Two-sided rank-sum test. The exact permutation distribution of the
/// (tied) rank sum is used unless both samples have at least 10 values; then
/// the normal approximation with continuity and tie correction. Very
/// unbalanced samples whose exact table would be huge also use the normal form.
inline RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ValidationError("rank-sum test needs two nonempty samples");
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto rank = midranks(pooled);
    const std::size_t na = a.size(), nb = b.size(), n = pooled.size();

    RankSumResult res;
    for (std::size_t i = 0; i < na; ++i) res.statistic += rank[i];
    if (std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled.front(); })) {
        res.p_value = 1.0;
        res.exact = true;
        return res;
    }

    if ((na < 10 || nb < 10) && 2.0 * static_cast<double>(n) * static_cast<double>(n + 1) / 2.0 <= 2e5) {
        // Doubled midranks are integers. Count subsets of the smaller sample's
        // size by their doubled rank sum.
        const bool first_small = na <= nb;
        const std::size_t k = first_small ? na : nb;
        std::vector<long> doubled(n);
        for (std::size_t i = 0; i < n; ++i) doubled[i] = std::lround(2.0 * rank[i]);
        const long total = std::accumulate(doubled.begin(), doubled.end(), 0L);
        std::vector<std::vector<long double>> ways(k + 1, std::vector<long double>(static_cast<std::size_t>(total) + 1, 0.0L));
        ways[0][0] = 1.0L;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = std::min(k, i + 1); c >= 1; --c) {
                const auto& from = ways[c - 1];
                auto& to = ways[c];
                for (long s = total; s >= doubled[i]; --s) to[static_cast<std::size_t>(s)] += from[static_cast<std::size_t>(s - doubled[i])];
            }
        }
        long observed = 0;
        for (std::size_t i = first_small ? 0 : na; i < (first_small ? na : n); ++i) observed += doubled[i];
        long double all = 0, le = 0, ge = 0;
        for (long s = 0; s <= total; ++s) {
            const long double w = ways[k][static_cast<std::size_t>(s)];
            all += w;
            if (s <= observed) le += w;
            if (s >= observed) ge += w;
        }
        res.p_value = std::min(1.0, static_cast<double>(2.0L * std::min(le, ge) / all));
        res.exact = true;
        return res;
    }

    const double dna = static_cast<double>(na), dnb = static_cast<double>(nb), dn = static_cast<double>(n);
    const double mean = dna * (dn + 1.0) / 2.0;
    double tie_sum = 0.0;
    {
        std::vector<double> sorted(pooled);
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_sum += t * t * t - t;
            i = j + 1;
        }
    }
    const double var = dna * dnb / 12.0 * ((dn + 1.0) - tie_sum / (dn * (dn - 1.0)));
    const double z = std::max(0.0, std::abs(res.statistic - mean) - 0.5) / std::sqrt(var);
    res.p_value = std::min(1.0, std::erfc(z / std::numbers::sqrt2));
    return res;
}

struct PairwiseTest {
    std::string model_a, model_b;
    RankSumResult result;
    bool significant = false;
};

struct SignificanceReport {
    std::vector<PairwiseTest> entries;  // every unordered pair, in input order
    double alpha = 0.05;

    const PairwiseTest* find(const std::string& a, const std::string& b) const {
        for (const auto& e : entries) {
            if ((e.model_a == a && e.model_b == b) || (e.model_a == b && e.model_b == a)) return &e;
        }
        return nullptr;
    }
};

inline SignificanceReport significance_report(const std::vector<std::pair<std::string, std::vector<double>>>& errors,
                                              double alpha = 0.05) {
    SignificanceReport rep;
    rep.alpha = alpha;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        for (std::size_t j = i + 1; j < errors.size(); ++j) {
            PairwiseTest t{errors[i].first, errors[j].first, wilcoxon_rank_sum(errors[i].second, errors[j].second), false};
            t.significant = t.result.significant(alpha);
            rep.entries.push_back(std::move(t));
        }
    }
    return rep;
}

struct BoxCoxResult {
    std::vector<double> values;
    double lambda = 1.0;
    double shift = 0.0;  // added before transforming
};

inline double boxcox_value(double v, double lambda) {
    return std::abs(lambda) < 1e-6 ? std::log(v) : (std::pow(v, lambda) - 1.0) / lambda;
}

/// Profile log-likelihood of lambda for positive data.
inline double boxcox_llf(std::span<const double> v, double lambda) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0, log_sum = 0.0;
    for (double x : v) {
        mean += boxcox_value(x, lambda);
        log_sum += std::log(x);
    }
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (boxcox_value(x, lambda) - mean) * (boxcox_value(x, lambda) - mean);
    return -0.5 * n * std::log(ss / n) + (lambda - 1.0) * log_sum;
}

/// Box-Cox with lambda chosen by golden-section search of the profile
/// likelihood over [lo, hi]. Values are shifted by 1 - min first when min <= 0.
inline BoxCoxResult boxcox(std::span<const double> values, double lo = -5.0, double hi = 5.0) {
    if (values.empty()) throw ValidationError("Box-Cox of an empty sample");
    if (!(lo < hi)) throw ValidationError("Box-Cox search range is empty");
    BoxCoxResult res;
    const double min = *std::min_element(values.begin(), values.end());
    res.shift = min <= 0.0 ? 1.0 - min : 0.0;
    std::vector<double> v;
    for (double x : values) v.push_back(x + res.shift);
    for (double x : v) {
        if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("Box-Cox needs positive finite values");
    }

    if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) {
        res.lambda = 1.0;
    } else {
        const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = lo, b = hi;
        double c = b - ratio * (b - a), d = a + ratio * (b - a);
        double fc = boxcox_llf(v, c), fd = boxcox_llf(v, d);
        while (b - a > 1e-7) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = boxcox_llf(v, c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = boxcox_llf(v, d);
            }
        }
        res.lambda = (a + b) / 2.0;
    }
    for (double x : v) res.values.push_back(boxcox_value(x, res.lambda));
    return res;
}

struct ScottKnottResult {
    /// Groups ordered by descending mean: the last group holds the smallest errors.
    std::vector<std::vector<std::string>> groups;
    std::map<std::string, double> means;
    double boxcox_lambda = 1.0;
    double boxcox_shift = 0.0;

    std::size_t group_of(const std::string& model) const {
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (std::find(groups[g].begin(), groups[g].end(), model) != groups[g].end()) return g;
        }
        throw ValidationError("model '" + model + "' is not in the Scott-Knott result");
    }
};

/// Scott & Knott (1974) clustering of model means. `samples` are
/// (already transformed) per-model observations of equal length.
inline ScottKnottResult scott_knott(const std::vector<std::pair<std::string, std::vector<double>>>& samples,
                                    double alpha = 0.05) {
    ScottKnottResult res;
    if (samples.empty()) return res;
    const std::size_t r = samples.front().second.size();
    for (const auto& [name, v] : samples) {
        if (v.size() != r || r == 0) throw ValidationError("Scott-Knott needs equal-length, nonempty samples");
    }

    struct Entry {
        std::string name;
        double mean;
    };
    std::vector<Entry> order;
    double within = 0.0;
    for (const auto& [name, v] : samples) {
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(r);
        for (double x : v) within += (x - m) * (x - m);
        order.push_back({name, m});
        res.means[name] = m;
    }
    if (samples.size() < 2) {
        res.groups.push_back({samples.front().first});
        return res;
    }
    std::stable_sort(order.begin(), order.end(), [](const Entry& a, const Entry& b) { return a.mean > b.mean; });

    const double nu = static_cast<double>(samples.size() * (r - 1));
    const double mse = nu > 0 ? within / nu : 0.0;
    const double se2 = mse / static_cast<double>(r);
    const double pi = std::numbers::pi;

    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, order.size()}};
    std::vector<std::pair<std::size_t, std::size_t>> leaves;
    while (!stack.empty()) {
        const auto [lo, hi] = stack.back();
        stack.pop_back();
        const std::size_t k = hi - lo;
        if (k < 2) {
            leaves.push_back({lo, hi});
            continue;
        }
        double grand = 0.0;
        for (std::size_t i = lo; i < hi; ++i) grand += order[i].mean;
        grand /= static_cast<double>(k);

        double best_b0 = -1.0;
        std::size_t best_cut = lo + 1;
        for (std::size_t cut = lo + 1; cut < hi; ++cut) {
            double s1 = 0.0, s2 = 0.0;
            for (std::size_t i = lo; i < cut; ++i) s1 += order[i].mean;
            for (std::size_t i = cut; i < hi; ++i) s2 += order[i].mean;
            const double k1 = static_cast<double>(cut - lo), k2 = static_cast<double>(hi - cut);
            const double b0 = k1 * std::pow(s1 / k1 - grand, 2) + k2 * std::pow(s2 / k2 - grand, 2);
            if (b0 > best_b0) {
                best_b0 = b0;
                best_cut = cut;
            }
        }
        double spread = 0.0;
        for (std::size_t i = lo; i < hi; ++i) spread += std::pow(order[i].mean - grand, 2);
        const double sigma2 = (spread + nu * se2) / (static_cast<double>(k) + nu);
        bool split = false;
        if (sigma2 > 0.0) {
            const double lambda = pi / (2.0 * (pi - 2.0)) * best_b0 / sigma2;
            const boost::math::chi_squared chi(static_cast<double>(k) / (pi - 2.0));
            split = lambda > boost::math::quantile(boost::math::complement(chi, alpha));
        } else {
            split = best_b0 > 0.0;  // no noise at all: any difference separates
        }
        if (split) {
            // Right part pushed first so the left (larger means) pops first.
            stack.push_back({best_cut, hi});
            stack.push_back({lo, best_cut});
        } else {
            leaves.push_back({lo, hi});
        }
    }
    std::sort(leaves.begin(), leaves.end());
    for (const auto& [lo, hi] : leaves) {
        std::vector<std::string> g;
        for (std::size_t i = lo; i < hi; ++i) g.push_back(order[i].name);
        res.groups.push_back(std::move(g));
    }
    return res;
}

/// Box-Cox on the pooled absolute errors (one lambda for every model), then
/// Scott-Knott on the transformed values.
inline ScottKnottResult scott_knott_boxcox(const std::vector<std::pair<std::string, std::vector<double>>>& errors,
                                           double alpha = 0.05) {
    std::vector<double> pooled;
    for (const auto& [name, v] : errors) pooled.insert(pooled.end(), v.begin(), v.end());
    if (pooled.empty()) return {};
    const BoxCoxResult bc = boxcox(pooled);
    std::vector<std::pair<std::string, std::vector<double>>> transformed;
    std::size_t offset = 0;
    for (const auto& [name, v] : errors) {
        transformed.emplace_back(name, std::vector<double>(bc.values.begin() + static_cast<std::ptrdiff_t>(offset),
                                                           bc.values.begin() + static_cast<std::ptrdiff_t>(offset + v.size())));
        offset += v.size();
    }
    ScottKnottResult res = scott_knott(transformed, alpha);
    res.boxcox_lambda = bc.lambda;
    res.boxcox_shift = bc.shift;
    return res;
}

}  // namespace ucpe
