#include "c2m/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace c2m {

std::vector<std::size_t> hungarian_min_cost(const std::vector<double>& cost, std::size_t n) {
    if (cost.size() != n * n) throw ShapeError("hungarian: cost matrix is not n x n");
    if (n == 0) return {};
    // Potentials formulation, 1-based with a virtual column 0.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_to(n + 1);
    std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (std::size_t row = 1; row <= n; ++row) {
        owner[0] = row;
        std::size_t col = 0;
        std::fill(min_to.begin(), min_to.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[col] = 1;
            const std::size_t i = owner[col];
            double delta = inf;
            std::size_t next = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double c = cost[(i - 1) * n + (j - 1)] - u[i] - v[j];
                if (c < min_to[j]) {
                    min_to[j] = c;
                    way[j] = col;
                }
                if (min_to[j] < delta) {
                    delta = min_to[j];
                    next = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            col = next;
        } while (owner[col] != 0);
        do {
            const std::size_t prev = way[col];
            owner[col] = owner[prev];
            col = prev;
        } while (col != 0);
    }
    std::vector<std::size_t> assignment(n);
    for (std::size_t j = 1; j <= n; ++j) assignment[owner[j] - 1] = j - 1;
    return assignment;
}

namespace {

void check_lengths(const Labeling& a, const Labeling& b, const char* what) {
    if (a.size() != b.size()) {
        throw ShapeError(std::string(what) + ": labelings have lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
    }
}

std::map<Label, std::size_t> index_labels(const Labeling& y) {
    std::map<Label, std::size_t> idx;
    for (Label l : y) idx.emplace(l, 0);
    std::size_t next = 0;
    for (auto& [label, slot] : idx) slot = next++;
    return idx;
}

}  // namespace

std::vector<std::vector<std::size_t>> contingency(const Labeling& pred, const Labeling& truth) {
    check_lengths(pred, truth, "contingency");
    const auto pi = index_labels(pred);
    const auto ti = index_labels(truth);
    std::vector<std::vector<std::size_t>> table(pi.size(), std::vector<std::size_t>(ti.size(), 0));
    for (std::size_t i = 0; i < pred.size(); ++i) ++table[pi.at(pred[i])][ti.at(truth[i])];
    return table;
}

double acc(const Labeling& pred, const Labeling& truth) {
    check_lengths(pred, truth, "acc");
    if (pred.empty()) throw ValidationError("acc: empty labelings");
    const auto table = contingency(pred, truth);
    const std::size_t rows = table.size(), cols = table.front().size();
    const std::size_t s = std::max(rows, cols);
    std::vector<double> cost(s * s, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) cost[i * s + j] = -static_cast<double>(table[i][j]);
    const auto assignment = hungarian_min_cost(cost, s);
    std::size_t matched = 0;
    for (std::size_t i = 0; i < rows; ++i)
        if (assignment[i] < cols) matched += table[i][assignment[i]];
    return static_cast<double>(matched) / static_cast<double>(pred.size());
}

double nmi(const Labeling& pred, const Labeling& truth) {
    check_lengths(pred, truth, "nmi");
    if (pred.empty()) throw ValidationError("nmi: empty labelings");
    const auto table = contingency(pred, truth);
    const double n = static_cast<double>(pred.size());
    std::vector<double> row(table.size(), 0.0), col(table.front().size(), 0.0);
    for (std::size_t i = 0; i < table.size(); ++i)
        for (std::size_t j = 0; j < table[i].size(); ++j) {
            row[i] += static_cast<double>(table[i][j]);
            col[j] += static_cast<double>(table[i][j]);
        }
    // Terms are summed in sorted order so relabeling either side, or
    // swapping the arguments, cannot change the result by a single ulp.
    auto sorted_sum = [](std::vector<double> terms) {
        std::sort(terms.begin(), terms.end());
        double s = 0.0;
        for (double t : terms) s += t;
        return s;
    };
    auto entropy = [&](const std::vector<double>& counts) {
        std::vector<double> terms;
        for (double c : counts)
            if (c > 0.0) terms.push_back(-(c / n) * std::log(c / n));
        return sorted_sum(std::move(terms));
    };
    const double hp = entropy(row), ht = entropy(col);
    if (row.size() == 1 && col.size() == 1) return 1.0;
    if (row.size() == 1 || col.size() == 1) return 0.0;

    std::vector<double> terms;
    for (std::size_t i = 0; i < table.size(); ++i)
        for (std::size_t j = 0; j < table[i].size(); ++j) {
            const double c = static_cast<double>(table[i][j]);
            if (c > 0.0) terms.push_back((c / n) * std::log(c * n / (row[i] * col[j])));
        }
    const double mi = sorted_sum(std::move(terms));
    const double lo = std::min(hp, ht), hi = std::max(hp, ht);
    return std::clamp(mi / std::sqrt(lo * hi), 0.0, 1.0);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("spearman: samples differ in length");
    if (a.size() < 2) throw ValidationError("spearman: need at least 2 samples");
    const auto ra = average_ranks(a), rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return cov / std::sqrt(va * vb);
}

std::size_t corrected_mislabels(const Labeling& pred, const Labeling& truth) {
    const double a = acc(pred, truth);
    return static_cast<std::size_t>(std::llround(static_cast<double>(pred.size()) * (1.0 - a)));
}

std::size_t hamming(const Labeling& a, const Labeling& b) {
    check_lengths(a, b, "hamming");
    std::size_t h = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) ++h;
    return h;
}

}  // namespace c2m
