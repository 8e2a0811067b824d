#pragma once

// Independent reference implementations used to check the library.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "c2m/datasets.hpp"

namespace c2m::oracle {

// Best matched fraction over every injective map from predicted labels to
// true labels (with unmatched labels counted as misses).
inline double brute_force_acc(const Labeling& pred, const Labeling& truth) {
    std::vector<Label> p_alpha(pred.begin(), pred.end()), t_alpha(truth.begin(), truth.end());
    std::sort(p_alpha.begin(), p_alpha.end());
    p_alpha.erase(std::unique(p_alpha.begin(), p_alpha.end()), p_alpha.end());
    std::sort(t_alpha.begin(), t_alpha.end());
    t_alpha.erase(std::unique(t_alpha.begin(), t_alpha.end()), t_alpha.end());
    const std::size_t k = std::max(p_alpha.size(), t_alpha.size());
    // Pad the true alphabet with dummy labels so every bijection is a
    // permutation of k slots.
    std::vector<Label> targets = t_alpha;
    for (Label extra = -1; targets.size() < k; --extra) targets.push_back(extra);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
        std::map<Label, Label> map;
        for (std::size_t i = 0; i < p_alpha.size(); ++i) map[p_alpha[i]] = targets[perm[i]];
        std::size_t hit = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) hit += map[pred[i]] == truth[i];
        best = std::max(best, hit);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(pred.size());
}

// I(a; b) / sqrt(H(a) H(b)) from joint probabilities, natural log.
inline double textbook_nmi(const Labeling& a, const Labeling& b) {
    const double n = static_cast<double>(a.size());
    std::map<Label, double> pa, pb;
    std::map<std::pair<Label, Label>, double> pab;
    for (std::size_t i = 0; i < a.size(); ++i) {
        pa[a[i]] += 1.0 / n;
        pb[b[i]] += 1.0 / n;
        pab[{a[i], b[i]}] += 1.0 / n;
    }
    double ha = 0.0, hb = 0.0, mi = 0.0;
    for (auto [l, p] : pa) ha -= p * std::log(p);
    for (auto [l, p] : pb) hb -= p * std::log(p);
    for (auto [key, p] : pab) mi += p * std::log(p / (pa[key.first] * pb[key.second]));
    return mi / std::sqrt(ha * hb);
}

}  // namespace c2m::oracle
