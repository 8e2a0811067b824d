#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "c2m/datasets.hpp"
#include "c2m/graphs.hpp"
#include "c2m/numerics.hpp"

namespace c2m {

// Fixed-length dataset embedding: the row-major upper triangle (diagonal
// included) of the m x m matrix Z^T Z.
using Embedding = std::vector<double>;

constexpr std::size_t embedding_length(std::size_t m) noexcept { return m * (m + 1) / 2; }

/// Two-layer graph-convolutional encoder without biases:
///   Xbar = ReLU(Ahat X W0),  Z = Ahat Xbar W1
/// with an inner-product decoder sigmoid(Z Z^T).
class GaeModel {
public:
    GaeModel() = default;
    // Glorot-uniform initialization.
    GaeModel(std::size_t input_dim, std::size_t hidden, std::size_t latent, std::uint64_t seed);
    // Adopts existing weights; throws ShapeError when they do not chain.
    GaeModel(Matrix w0, Matrix w1);

    std::size_t input_dim() const noexcept { return params_[0].rows(); }
    std::size_t hidden() const noexcept { return params_[0].cols(); }
    std::size_t latent() const noexcept { return params_[1].cols(); }

    const Matrix& w0() const { return params_[0]; }
    const Matrix& w1() const { return params_[1]; }
    ParameterSet& params() noexcept { return params_; }
    const ParameterSet& params() const noexcept { return params_; }

    friend bool operator==(const GaeModel&, const GaeModel&) = default;

private:
    ParameterSet params_;
};

struct GaeActivations {
    Matrix ax;      // Ahat X
    Matrix pre;     // Ahat X W0
    Matrix hidden;  // ReLU(pre)
    Matrix ah;      // Ahat hidden
    Matrix z;       // Ahat hidden W1
};

GaeActivations encode_full(const GaeModel& model, const NormalizedAdjacency& adj, const Matrix& features);

// Node embeddings Z (n x m).
Matrix encode(const GaeModel& model, const ClusterGraph& g);

// sigmoid(Z Z^T).
Matrix decode(const Matrix& z);

// Weighted binary cross-entropy between sigmoid(Z Z^T) and A + I, with the
// positive class reweighted by (#negatives / #positives) and the mean scaled
// by n^2 / (2 #negatives), the usual graph-autoencoder normalization.
struct ReconstructionTarget {
    Matrix labels;
    double pos_weight = 1.0;
    double norm = 1.0;
};
ReconstructionTarget reconstruction_target(const ClusterGraph& g);

double reconstruction_loss(const GaeModel& model, const ClusterGraph& g);

struct GaeGradient {
    double loss = 0.0;
    ParameterSet grads;  // same layout as GaeModel::params()
};
// Exact reverse-mode gradient of reconstruction_loss.
GaeGradient reconstruction_backward(const GaeModel& model, const ClusterGraph& g);

// Row-major upper triangle of a square matrix.
Embedding flatten_upper(const Matrix& s);

// Dataset embedding of a clique graph. On a clique graph Ahat averages
// features within each clique, so every row of Z belonging to clique c
// equals v_c = ReLU(mean_c W0) W1 and Z^T Z = sum_c |c| v_c v_c^T. The sum
// is accumulated in a canonical clique order, which makes the result
// bitwise invariant to node order and label names.
Embedding embed(const GaeModel& model, const ClusterGraph& g);
// Same embedding straight from (X, y) without materializing the graph.
Embedding embed(const GaeModel& model, const PointSet& points, const Labeling& y);
// Dense route: flatten_upper(encode(g)^T encode(g)). Equal to embed() up to
// rounding; kept as an independent reference.
Embedding embed_dense(const GaeModel& model, const ClusterGraph& g);

struct GaeTrainConfig {
    std::size_t hidden = 32;
    std::size_t latent = 16;
    std::size_t epochs = 30;
    RmspropConfig optimizer;
    std::uint64_t seed = 0;
    // Cluster-count range of the random labelings mixed into training.
    std::size_t max_random_clusters = 9;
};

struct GaeTrainReport {
    // Mean reconstruction loss per epoch, measured before each update.
    std::vector<double> epoch_loss;
};

// Each epoch visits every dataset twice: once with its ground-truth graph
// and once with a random labeling (uniform labels or a random Voronoi
// partition) of the same points. One RMSprop step per graph; the learning
// rate decays at each epoch boundary. Throws NonFiniteError on a
// non-finite loss.
GaeModel train_gae(const Corpus& corpus, const GaeTrainConfig& cfg, GaeTrainReport* report = nullptr);

// Random labeling with k in [1, max_clusters]: either i.i.d. uniform labels
// or nearest-of-k random anchor points.
Labeling random_labeling(const PointSet& points, std::size_t max_clusters, Rng& rng);

}  // namespace c2m
