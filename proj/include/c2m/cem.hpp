#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "c2m/datasets.hpp"
#include "c2m/numerics.hpp"

namespace c2m {

/// One-hidden-layer network d -> hidden (ReLU) -> clusters; a point's label
/// is the index of its largest output, ties going to the lowest index.
struct ClusterNetShape {
    std::size_t input_dim = 2;
    std::size_t hidden = 16;
    std::size_t clusters = 50;

    std::size_t weight_count() const noexcept {
        return input_dim * hidden + hidden + hidden * clusters + clusters;
    }
};

class ClusterNet {
public:
    ClusterNet(const ClusterNetShape& shape, std::span<const double> flat);

    const ClusterNetShape& shape() const noexcept { return shape_; }
    const ParameterSet& params() const noexcept { return params_; }
    // W1, b1, W2, b2 concatenated row-major.
    std::vector<double> flat() const;

private:
    ClusterNetShape shape_;
    ParameterSet params_;
};

Labeling assign_clusters(const ClusterNet& net, const PointSet& points);
Labeling assign_clusters(const ClusterNetShape& shape, std::span<const double> flat, const PointSet& points);

struct CemConfig {
    std::size_t population = 50;
    double elite_fraction = 0.1;
    std::size_t iterations = 30;
    double init_mean = 0.0;
    double init_stddev = 1.0;
    // Added to the refitted standard deviation every iteration.
    double sigma_floor = 1e-3;
    // Worker threads for population evaluation; results do not depend on it.
    unsigned threads = 1;

    std::size_t elite_count() const;
    // Throws ValidationError unless population >= 2, iterations >= 1,
    // elite_fraction in (0, 1), elite_count() >= 2 and sigma_floor > 0.
    void validate() const;
};

struct CemIteration {
    std::size_t iteration = 0;
    double best_score = 0.0;
    double mean_elite_score = 0.0;
};

struct EvaluatedSolution {
    std::size_t iteration = 0;
    std::size_t member = 0;
    double score = 0.0;
};

struct CemState {
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<double> best_weights;
    double best_score = -std::numeric_limits<double>::infinity();
    std::vector<CemIteration> history;
    // Every finite evaluation, in evaluation order.
    std::vector<EvaluatedSolution> solutions;
    // Elite weights of the final iteration, best first.
    std::vector<std::vector<double>> final_elite;
    std::vector<double> final_elite_scores;
};

// Scores a whole population of weight vectors at once.
using PopulationObjective = std::function<std::vector<double>(const std::vector<std::vector<double>>&)>;

/// Cross-entropy method over R^dim, maximizing `objective`. Each iteration
/// samples the population from N(mean, diag(stddev^2)), keeps the top
/// elite_count() finite scores and refits mean and per-coordinate standard
/// deviation (plus sigma_floor) to them. Non-finite scores are discarded;
/// an iteration where every score is non-finite throws NonFiniteError.
CemState cem_search(std::size_t dim, const PopulationObjective& objective, const CemConfig& cfg,
                    std::uint64_t seed);

// Scores several labelings of the same points.
using LabelingScorer = std::function<std::vector<double>(const PointSet&, std::span<const Labeling>)>;
// Scores a single labeling.
using ScoreOracle = std::function<double(const PointSet&, const Labeling&)>;

// Adapts a single-labeling oracle, evaluating members on cfg.threads workers.
LabelingScorer batch_scorer(ScoreOracle oracle, unsigned threads);

struct CemResult {
    std::vector<double> best_weights;
    Labeling labels;
    double score = 0.0;
    CemState state;
};

// Searches cluster-network weights w maximizing r(X, y^w).
CemResult cem_optimize(const PointSet& points, const LabelingScorer& scorer, const CemConfig& cfg,
                       std::uint64_t seed, const ClusterNetShape& shape);

}  // namespace c2m
