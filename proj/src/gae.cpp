#include "c2m/gae.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace c2m {

namespace {

Matrix glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_in, fan_out);
    for (double& v : w.data()) v = rng.uniform(-r, r);
    return w;
}

// -log(sigmoid(x)) without overflow.
double softplus_neg(double x) { return std::max(-x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

bool row_less(std::span<const double> a, std::span<const double> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Embedding embed_groups(const GaeModel& model, const Matrix& x,
                       const std::vector<std::vector<std::size_t>>& groups) {
    if (x.cols() != model.input_dim()) {
        throw ShapeError("embed: features have d=" + std::to_string(x.cols()) + ", encoder expects d=" +
                         std::to_string(model.input_dim()));
    }
    const std::size_t d = x.cols();
    const std::size_t m = model.latent();

    struct Contribution {
        double weight;
        std::vector<double> v;
    };
    std::vector<Contribution> parts;
    parts.reserve(groups.size());
    std::vector<std::size_t> order;
    for (const auto& members : groups) {
        order = members;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return row_less(x.row(a), x.row(b)); });
        Matrix mean(1, d);
        for (std::size_t idx : order)
            for (std::size_t j = 0; j < d; ++j) mean(0, j) += x(idx, j);
        const double count = static_cast<double>(members.size());
        for (double& v : mean.data()) v /= count;
        const Matrix v = matmul(relu(matmul(mean, model.w0())), model.w1());
        parts.push_back({count, v.data()});
    }
    std::sort(parts.begin(), parts.end(), [](const Contribution& a, const Contribution& b) {
        if (a.weight != b.weight) return a.weight < b.weight;
        return std::lexicographical_compare(a.v.begin(), a.v.end(), b.v.begin(), b.v.end());
    });

    Embedding out(embedding_length(m), 0.0);
    for (const auto& p : parts) {
        std::size_t t = 0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j) out[t++] += p.weight * p.v[i] * p.v[j];
    }
    return out;
}

}  // namespace

GaeModel::GaeModel(std::size_t input_dim, std::size_t hidden, std::size_t latent, std::uint64_t seed) {
    if (input_dim == 0 || hidden == 0 || latent == 0)
        throw ValidationError("GaeModel: layer sizes must be > 0");
    Rng rng(seed);
    params_.add("W0", glorot(input_dim, hidden, rng));
    params_.add("W1", glorot(hidden, latent, rng));
}

GaeModel::GaeModel(Matrix w0, Matrix w1) {
    if (w0.cols() != w1.rows() || w0.empty() || w1.empty())
        throw ShapeError("GaeModel: W0 " + w0.shape_str() + " does not chain into W1 " + w1.shape_str());
    if (!all_finite(w0) || !all_finite(w1)) throw NonFiniteError("GaeModel: non-finite weights");
    params_.add("W0", std::move(w0));
    params_.add("W1", std::move(w1));
}

GaeActivations encode_full(const GaeModel& model, const NormalizedAdjacency& adj, const Matrix& features) {
    if (features.cols() != model.input_dim()) {
        throw ShapeError("encode: features have d=" + std::to_string(features.cols()) +
                         ", encoder expects d=" + std::to_string(model.input_dim()));
    }
    if (adj.matrix.rows() != features.rows())
        throw ShapeError("encode: adjacency " + adj.matrix.shape_str() + " vs features " + features.shape_str());
    GaeActivations a;
    a.ax = matmul(adj.matrix, features);
    a.pre = matmul(a.ax, model.w0());
    a.hidden = relu(a.pre);
    a.ah = matmul(adj.matrix, a.hidden);
    a.z = matmul(a.ah, model.w1());
    return a;
}

Matrix encode(const GaeModel& model, const ClusterGraph& g) {
    return encode_full(model, normalize(g), g.features).z;
}

Matrix decode(const Matrix& z) { return sigmoid(matmul_nt(z, z)); }

ReconstructionTarget reconstruction_target(const ClusterGraph& g) {
    const std::size_t n = g.nodes();
    ReconstructionTarget t;
    t.labels = add(g.adjacency, Matrix::identity(n));
    const double total = static_cast<double>(n * n);
    double positives = 0.0;
    for (double v : t.labels.data()) positives += v;
    const double negatives = total - positives;
    if (negatives > 0.0) {
        t.pos_weight = negatives / positives;
        t.norm = total / (2.0 * negatives);
    }
    return t;
}

namespace {

double weighted_bce(const Matrix& logits, const ReconstructionTarget& t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double l = logits.data()[i];
        const double y = t.labels.data()[i];
        acc += t.pos_weight * y * softplus_neg(l) + (1.0 - y) * softplus_neg(-l);
    }
    return t.norm * acc / static_cast<double>(logits.size());
}

}  // namespace

double reconstruction_loss(const GaeModel& model, const ClusterGraph& g) {
    const Matrix z = encode(model, g);
    return weighted_bce(matmul_nt(z, z), reconstruction_target(g));
}

GaeGradient reconstruction_backward(const GaeModel& model, const ClusterGraph& g) {
    const NormalizedAdjacency adj = normalize(g);
    const GaeActivations a = encode_full(model, adj, g.features);
    const Matrix logits = matmul_nt(a.z, a.z);
    const ReconstructionTarget t = reconstruction_target(g);

    GaeGradient out;
    out.loss = weighted_bce(logits, t);

    // dLoss/dlogits, symmetric because labels and logits are.
    const double coef = t.norm / static_cast<double>(logits.size());
    Matrix dlogits(logits.rows(), logits.cols());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double s = sigmoid(logits.data()[i]);
        const double y = t.labels.data()[i];
        dlogits.data()[i] = coef * (t.pos_weight * y * (s - 1.0) + (1.0 - y) * s);
    }
    const Matrix dz = scale(matmul(dlogits, a.z), 2.0);
    const Matrix dw1 = matmul_tn(a.ah, dz);
    const Matrix dah = matmul_nt(dz, model.w1());
    Matrix dpre = matmul(adj.matrix, dah);  // Ahat is symmetric
    for (std::size_t i = 0; i < dpre.size(); ++i)
        if (!(a.pre.data()[i] > 0.0)) dpre.data()[i] = 0.0;
    const Matrix dw0 = matmul_tn(a.ax, dpre);

    out.grads.add("W0", dw0);
    out.grads.add("W1", dw1);
    return out;
}

Embedding flatten_upper(const Matrix& s) {
    if (s.rows() != s.cols()) throw ShapeError("flatten_upper: matrix " + s.shape_str() + " is not square");
    Embedding out;
    out.reserve(embedding_length(s.rows()));
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = i; j < s.cols(); ++j) out.push_back(s(i, j));
    return out;
}

Embedding embed(const GaeModel& model, const ClusterGraph& g) {
    return embed_groups(model, g.features, cliques(g));
}

Embedding embed(const GaeModel& model, const PointSet& points, const Labeling& y) {
    validate_labeling(y, points.n());
    return embed_groups(model, points.matrix(), groups_of(y));
}

Embedding embed_dense(const GaeModel& model, const ClusterGraph& g) {
    const Matrix z = encode(model, g);
    return flatten_upper(matmul_tn(z, z));
}

Labeling random_labeling(const PointSet& points, std::size_t max_clusters, Rng& rng) {
    const std::size_t n = points.n();
    const std::size_t k = rng.uniform_index(1, std::max<std::size_t>(1, std::min(max_clusters, n)));
    Labeling y(n);
    if (rng.uniform(0.0, 1.0) < 0.5) {
        for (auto& l : y) l = static_cast<Label>(rng.uniform_index(0, k - 1));
        return y;
    }
    std::vector<std::size_t> anchors(k);
    for (auto& a : anchors) a = rng.uniform_index(0, n - 1);
    const Matrix& x = points.matrix();
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            double dist = 0.0;
            for (std::size_t j = 0; j < x.cols(); ++j) {
                const double diff = x(i, j) - x(anchors[c], j);
                dist += diff * diff;
            }
            if (dist < best) {
                best = dist;
                y[i] = static_cast<Label>(c);
            }
        }
    }
    return y;
}

GaeModel train_gae(const Corpus& corpus, const GaeTrainConfig& cfg, GaeTrainReport* report) {
    corpus.validate();
    if (cfg.epochs == 0) throw ValidationError("train_gae: epochs must be >= 1");
    Rng rng(cfg.seed);
    GaeModel model(corpus.dim(), cfg.hidden, cfg.latent, rng.next_seed());
    RmspropState opt(model.params(), cfg.optimizer);

    std::vector<std::size_t> order(corpus.datasets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng.engine());
        double total = 0.0;
        std::size_t steps = 0;
        for (std::size_t idx : order) {
            const SampleDataset& ds = corpus.datasets[idx];
            const Labeling fake = random_labeling(ds.points, cfg.max_random_clusters, rng);
            for (const Labeling* y : {&*ds.truth, &fake}) {
                const GaeGradient g = reconstruction_backward(model, build_graph(ds.points, *y));
                if (!std::isfinite(g.loss)) {
                    throw NonFiniteError("train_gae: non-finite reconstruction loss at epoch " +
                                         std::to_string(epoch) + ", dataset " + std::to_string(idx));
                }
                rmsprop_step(model.params(), g.grads, opt);
                total += g.loss;
                ++steps;
            }
        }
        opt.end_epoch();
        if (report) report->epoch_loss.push_back(total / static_cast<double>(steps));
    }
    return model;
}

}  // namespace c2m
