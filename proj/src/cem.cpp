#include "c2m/cem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace c2m {

ClusterNet::ClusterNet(const ClusterNetShape& shape, std::span<const double> flat) : shape_(shape) {
    if (flat.size() != shape.weight_count()) {
        throw ShapeError("cluster net expects " + std::to_string(shape.weight_count()) + " weights, got " +
                         std::to_string(flat.size()));
    }
    auto take = [&, pos = std::size_t{0}](std::size_t rows, std::size_t cols) mutable {
        std::vector<double> v(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                              flat.begin() + static_cast<std::ptrdiff_t>(pos + rows * cols));
        pos += rows * cols;
        return Matrix(rows, cols, std::move(v));
    };
    params_.add("W1", take(shape.input_dim, shape.hidden));
    params_.add("b1", take(1, shape.hidden));
    params_.add("W2", take(shape.hidden, shape.clusters));
    params_.add("b2", take(1, shape.clusters));
}

std::vector<double> ClusterNet::flat() const {
    std::vector<double> out;
    out.reserve(shape_.weight_count());
    for (const auto& e : params_) out.insert(out.end(), e.value.data().begin(), e.value.data().end());
    return out;
}

Labeling assign_clusters(const ClusterNetShape& shape, std::span<const double> flat, const PointSet& points) {
    if (points.d() != shape.input_dim) {
        throw ShapeError("cluster net input width " + std::to_string(shape.input_dim) + " but points have d=" +
                         std::to_string(points.d()));
    }
    if (flat.size() != shape.weight_count()) {
        throw ShapeError("cluster net expects " + std::to_string(shape.weight_count()) + " weights, got " +
                         std::to_string(flat.size()));
    }
    const std::size_t d = shape.input_dim, h = shape.hidden, k = shape.clusters;
    const double* w1 = flat.data();
    const double* b1 = w1 + d * h;
    const double* w2 = b1 + h;
    const double* b2 = w2 + h * k;

    const Matrix& x = points.matrix();
    Labeling y(points.n());
    std::vector<double> hidden(h), logits(k);
    for (std::size_t i = 0; i < points.n(); ++i) {
        std::copy(b1, b1 + h, hidden.begin());
        for (std::size_t j = 0; j < d; ++j) {
            const double v = x(i, j);
            const double* row = w1 + j * h;
            for (std::size_t u = 0; u < h; ++u) hidden[u] += v * row[u];
        }
        std::copy(b2, b2 + k, logits.begin());
        for (std::size_t u = 0; u < h; ++u) {
            const double v = hidden[u] > 0.0 ? hidden[u] : 0.0;
            if (v == 0.0) continue;
            const double* row = w2 + u * k;
            for (std::size_t c = 0; c < k; ++c) logits[c] += v * row[c];
        }
        // max_element returns the first maximum: ties go to the lowest index.
        y[i] = static_cast<Label>(std::max_element(logits.begin(), logits.end()) - logits.begin());
    }
    return y;
}

Labeling assign_clusters(const ClusterNet& net, const PointSet& points) {
    const std::vector<double> w = net.flat();
    return assign_clusters(net.shape(), w, points);
}

std::size_t CemConfig::elite_count() const {
    return static_cast<std::size_t>(std::ceil(elite_fraction * static_cast<double>(population) - 1e-9));
}

void CemConfig::validate() const {
    if (population < 2) throw ValidationError("cem: population must be >= 2");
    if (iterations < 1) throw ValidationError("cem: iterations must be >= 1");
    if (!(elite_fraction > 0.0 && elite_fraction < 1.0))
        throw ValidationError("cem: elite fraction must lie in (0, 1)");
    if (elite_count() < 2) throw ValidationError("cem: elite set must hold at least 2 members");
    if (!(init_stddev > 0.0)) throw ValidationError("cem: initial stddev must be > 0");
    if (!(sigma_floor > 0.0)) throw ValidationError("cem: sigma floor must be > 0");
}

CemState cem_search(std::size_t dim, const PopulationObjective& objective, const CemConfig& cfg,
                    std::uint64_t seed) {
    cfg.validate();
    if (dim == 0) throw ValidationError("cem: search dimension must be > 0");
    Rng rng(seed);
    CemState st;
    st.mean.assign(dim, cfg.init_mean);
    st.stddev.assign(dim, cfg.init_stddev);
    const std::size_t elite_target = cfg.elite_count();

    std::vector<std::vector<double>> population(cfg.population, std::vector<double>(dim));
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        for (auto& w : population)
            for (std::size_t j = 0; j < dim; ++j) w[j] = st.mean[j] + st.stddev[j] * rng.normal();

        const std::vector<double> scores = objective(population);
        if (scores.size() != population.size())
            throw ShapeError("cem: objective returned " + std::to_string(scores.size()) + " scores for " +
                             std::to_string(population.size()) + " members");

        std::vector<std::size_t> finite;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (!std::isfinite(scores[i])) continue;
            finite.push_back(i);
            st.solutions.push_back({it, i, scores[i]});
        }
        if (finite.empty())
            throw NonFiniteError("cem: every score of iteration " + std::to_string(it) + " is non-finite");
        std::stable_sort(finite.begin(), finite.end(),
                         [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
        const std::size_t elite = std::min(elite_target, finite.size());

        if (scores[finite.front()] > st.best_score) {
            st.best_score = scores[finite.front()];
            st.best_weights = population[finite.front()];
        }

        double elite_mean_score = 0.0;
        for (std::size_t e = 0; e < elite; ++e) elite_mean_score += scores[finite[e]];
        elite_mean_score /= static_cast<double>(elite);

        for (std::size_t j = 0; j < dim; ++j) {
            double mu = 0.0;
            for (std::size_t e = 0; e < elite; ++e) mu += population[finite[e]][j];
            mu /= static_cast<double>(elite);
            double var = 0.0;
            for (std::size_t e = 0; e < elite; ++e) {
                const double diff = population[finite[e]][j] - mu;
                var += diff * diff;
            }
            var /= static_cast<double>(elite);
            st.mean[j] = mu;
            st.stddev[j] = std::sqrt(var) + cfg.sigma_floor;
        }
        st.history.push_back({it, st.best_score, elite_mean_score});

        if (it + 1 == cfg.iterations) {
            for (std::size_t e = 0; e < elite; ++e) {
                st.final_elite.push_back(population[finite[e]]);
                st.final_elite_scores.push_back(scores[finite[e]]);
            }
        }
    }
    return st;
}

LabelingScorer batch_scorer(ScoreOracle oracle, unsigned threads) {
    return [oracle = std::move(oracle), threads](const PointSet& x, std::span<const Labeling> ys) {
        std::vector<double> out(ys.size());
        parallel_for(ys.size(), threads, [&](std::size_t i) { out[i] = oracle(x, ys[i]); });
        return out;
    };
}

CemResult cem_optimize(const PointSet& points, const LabelingScorer& scorer, const CemConfig& cfg,
                       std::uint64_t seed, const ClusterNetShape& shape) {
    if (points.d() != shape.input_dim) {
        throw ShapeError("cem_optimize: points have d=" + std::to_string(points.d()) +
                         ", cluster net expects d=" + std::to_string(shape.input_dim));
    }
    const unsigned threads = cfg.threads;
    PopulationObjective objective = [&](const std::vector<std::vector<double>>& population) {
        std::vector<Labeling> labelings(population.size());
        parallel_for(population.size(), threads,
                     [&](std::size_t i) { labelings[i] = assign_clusters(shape, population[i], points); });
        return scorer(points, labelings);
    };
    CemResult res;
    res.state = cem_search(shape.weight_count(), objective, cfg, seed);
    res.best_weights = res.state.best_weights;
    res.labels = assign_clusters(shape, res.best_weights, points);
    res.score = res.state.best_score;
    return res;
}

}  // namespace c2m
