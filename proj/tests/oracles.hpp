#pragma once

// Brute-force reference computations used only by tests. Nothing here shares
// code with the library paths it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace ucpe::oracle {

/// Best medoid of a subset: least summed |distance|, lowest row index on ties.
inline std::size_t medoid(const std::vector<double>& v, const std::vector<std::size_t>& rows) {
    std::size_t best = rows.front();
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t c : rows) {
        double cost = 0.0;
        for (std::size_t r : rows) cost += std::fabs(v[r] - v[c]);
        if (cost < best_cost) {
            best_cost = cost;
            best = c;
        }
    }
    return best;
}

inline double cost(const std::vector<double>& v, const std::vector<std::size_t>& rows) {
    const std::size_t m = medoid(v, rows);
    double c = 0.0;
    for (std::size_t r : rows) c += std::fabs(v[r] - v[m]);
    return c;
}

inline double variance(const std::vector<double>& v, const std::vector<std::size_t>& rows) {
    const double center = v[medoid(v, rows)];
    double s = 0.0;
    for (std::size_t r : rows) s += (v[r] - center) * (v[r] - center);
    return s / static_cast<double>(rows.size());
}

struct Split {
    std::vector<std::size_t> a, b;
};

/// Every 2-partition reaching the minimal summed distance-to-medoid.
inline std::vector<Split> best_splits(const std::vector<double>& v, const std::vector<std::size_t>& rows) {
    const std::size_t n = rows.size();
    std::vector<Split> best;
    double best_cost = std::numeric_limits<double>::infinity();
    // rows[0] always sits in part a, so each unordered partition is seen once.
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
        std::vector<std::size_t> a{rows[0]}, b;
        for (std::size_t i = 1; i < n; ++i) ((mask >> (i - 1)) & 1 ? b : a).push_back(rows[i]);
        if (b.empty()) continue;
        const double c = cost(v, a) + cost(v, b);
        if (c < best_cost - 1e-12) {
            best_cost = c;
            best = {{a, b}};
        } else if (std::fabs(c - best_cost) <= 1e-12) {
            best.push_back({a, b});
        }
    }
    return best;
}

/// Leaves of the bisecting recursion, as a set of row sets. Empty optional
/// when tied optimal splits would lead to different trees.
inline std::optional<std::set<std::vector<std::size_t>>> bisect_leaves(const std::vector<double>& v,
                                                                        std::size_t min_leaf, double theta) {
    std::set<std::vector<std::size_t>> leaves;
    std::vector<std::vector<std::size_t>> stack;
    std::vector<std::size_t> all(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) all[i] = i;
    stack.push_back(all);
    while (!stack.empty()) {
        auto rows = stack.back();
        stack.pop_back();
        if (rows.size() < 2 || rows.size() < 2 * min_leaf) {
            leaves.insert(rows);
            continue;
        }
        const auto splits = best_splits(v, rows);
        std::vector<const Split*> accepted;
        for (const auto& s : splits) {
            const bool sizes_ok = s.a.size() >= min_leaf && s.b.size() >= min_leaf;
            const bool tighter = std::max(variance(v, s.a), variance(v, s.b)) < theta * variance(v, rows);
            if (sizes_ok && tighter) accepted.push_back(&s);
        }
        if (accepted.empty()) {
            leaves.insert(rows);
        } else if (accepted.size() == 1 && splits.size() == 1) {
            stack.push_back(accepted.front()->a);
            stack.push_back(accepted.front()->b);
        } else {
            return std::nullopt;
        }
    }
    return leaves;
}

/// Expected MAE of guessing each target with a uniformly drawn other actual.
inline double random_guess_mae(const std::vector<double>& y) {
    const std::size_t n = y.size();
    double total = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t r = 0; r < n; ++r) {
            if (r != t) total += std::fabs(y[t] - y[r]) / static_cast<double>(n - 1);
        }
    }
    return total / static_cast<double>(n);
}

/// Two-sided exact rank-sum p-value by enumerating every way to pick the
/// first sample's positions among the pooled midranks.
inline double exact_rank_sum_p(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::size_t n = pooled.size();
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n; ++i) {
        double less = 0, equal = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (pooled[j] < pooled[i]) ++less;
            if (pooled[j] == pooled[i]) ++equal;
        }
        rank[i] = less + (equal + 1.0) / 2.0;
    }
    double observed = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) observed += rank[i];

    std::uint64_t total = 0, le = 0, ge = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcountll(mask)) != a.size()) continue;
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if ((mask >> i) & 1) w += rank[i];
        }
        ++total;
        if (w <= observed + 1e-9) ++le;
        if (w >= observed - 1e-9) ++ge;
    }
    const double p = 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
    return std::min(1.0, p);
}

/// Dense Gaussian elimination with partial pivoting, for small systems.
inline std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

}  // namespace ucpe::oracle
