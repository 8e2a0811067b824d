#include "c2m/critic.hpp"

#include <cmath>

namespace c2m {

namespace {

struct Forward {
    std::vector<Matrix> pre;   // pre-activation of every layer
    std::vector<Matrix> post;  // input of every layer (post[0] = inputs)
};

Forward forward(const CriticModel& model, const Matrix& inputs) {
    if (inputs.cols() != model.input_dim()) {
        throw ShapeError("critic: embedding length " + std::to_string(inputs.cols()) + " but critic expects " +
                         std::to_string(model.input_dim()));
    }
    Forward f;
    f.post.push_back(inputs);
    const std::size_t last = model.layers() - 1;
    for (std::size_t l = 0; l <= last; ++l) {
        Matrix a = matmul(f.post.back(), model.weight(l));
        add_row_inplace(a, model.bias(l));
        if (l < last) f.post.push_back(leaky_relu(a, model.leaky_alpha()));
        f.pre.push_back(std::move(a));
    }
    return f;
}

}  // namespace

CriticModel::CriticModel(std::size_t input_dim, const CriticConfig& cfg, std::uint64_t seed)
    : alpha_(cfg.leaky_alpha), clip_(cfg.clip) {
    if (input_dim == 0) throw ValidationError("critic: input dimension must be > 0");
    if (!(cfg.clip > 0.0)) throw ValidationError("critic: clip constant must be > 0");
    Rng rng(seed);
    std::vector<std::size_t> widths{input_dim};
    widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
    widths.push_back(1);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        if (widths[l + 1] == 0) throw ValidationError("critic: layer widths must be > 0");
        Matrix w(widths[l], widths[l + 1]);
        for (double& v : w.data()) v = rng.uniform(-clip_, clip_);
        params_.add("W" + std::to_string(l + 1), std::move(w));
        params_.add("b" + std::to_string(l + 1), Matrix(1, widths[l + 1]));
    }
}

CriticModel::CriticModel(ParameterSet params, double leaky_alpha, double clip)
    : params_(std::move(params)), alpha_(leaky_alpha), clip_(clip) {
    if (params_.size() < 2 || params_.size() % 2 != 0)
        throw ShapeError("critic: expected weight/bias pairs");
    for (std::size_t l = 0; l < layers(); ++l) {
        const Matrix& w = weight(l);
        const Matrix& b = bias(l);
        if (b.rows() != 1 || b.cols() != w.cols())
            throw ShapeError("critic: bias " + b.shape_str() + " does not match weight " + w.shape_str());
        if (l > 0 && weight(l - 1).cols() != w.rows())
            throw ShapeError("critic: layer " + std::to_string(l + 1) + " does not chain");
    }
    if (weight(layers() - 1).cols() != 1) throw ShapeError("critic: output layer must have width 1");
    if (!params_.all_finite()) throw NonFiniteError("critic: non-finite parameters");
}

Matrix stack_embeddings(std::span<const Embedding> zs) {
    if (zs.empty()) throw ValidationError("stack_embeddings: no embeddings");
    Matrix out(zs.size(), zs.front().size());
    for (std::size_t i = 0; i < zs.size(); ++i) {
        if (zs[i].size() != out.cols())
            throw ShapeError("stack_embeddings: embedding " + std::to_string(i) + " has length " +
                             std::to_string(zs[i].size()));
        std::copy(zs[i].begin(), zs[i].end(), out.row(i).begin());
    }
    return out;
}

double score(const CriticModel& model, const Embedding& z) {
    return score_batch(model, Matrix(1, z.size(), z)).front();
}

std::vector<double> score_batch(const CriticModel& model, const Matrix& inputs) {
    const Forward f = forward(model, inputs);
    return f.pre.back().data();
}

ParameterSet critic_backward(const CriticModel& model, const Matrix& inputs, const Matrix& upstream) {
    if (upstream.rows() != inputs.rows() || upstream.cols() != 1)
        throw ShapeError("critic_backward: upstream " + upstream.shape_str() + " for batch of " +
                         std::to_string(inputs.rows()));
    const Forward f = forward(model, inputs);
    ParameterSet grads = model.params().zeros_like();
    Matrix delta = upstream;  // d loss / d pre-activation of the current layer
    for (std::size_t l = model.layers(); l-- > 0;) {
        grads[2 * l] = matmul_tn(f.post[l], delta);
        grads[2 * l + 1] = col_sum(delta);
        if (l == 0) break;
        delta = matmul_nt(delta, model.weight(l));
        const Matrix& pre = f.pre[l - 1];
        for (std::size_t i = 0; i < delta.size(); ++i)
            if (!(pre.data()[i] > 0.0)) delta.data()[i] *= model.leaky_alpha();
    }
    return grads;
}

std::vector<double> input_gradient(const CriticModel& model, const Embedding& z) {
    const Matrix inputs(1, z.size(), z);
    const Forward f = forward(model, inputs);
    Matrix delta(1, 1, 1.0);
    for (std::size_t l = model.layers(); l-- > 0;) {
        delta = matmul_nt(delta, model.weight(l));
        if (l == 0) break;
        const Matrix& pre = f.pre[l - 1];
        for (std::size_t i = 0; i < delta.size(); ++i)
            if (!(pre.data()[i] > 0.0)) delta.data()[i] *= model.leaky_alpha();
    }
    return delta.data();
}

std::vector<double> input_gradient_bound(const CriticModel& model) {
    auto absm = [](const Matrix& m) {
        Matrix out = m;
        for (double& v : out.data()) v = std::abs(v);
        return out;
    };
    Matrix acc = absm(model.weight(0));
    for (std::size_t l = 1; l < model.layers(); ++l) acc = matmul(acc, absm(model.weight(l)));
    return acc.data();
}

WganStepResult wgan_step(CriticModel& model, const Matrix& real, const Matrix& fake, RmspropState& opt,
                         bool apply_clip) {
    if (real.rows() == 0 || fake.rows() == 0) throw ValidationError("wgan_step: empty batch");
    if (fake.cols() != real.cols())
        throw ShapeError("wgan_step: real " + real.shape_str() + " vs fake " + fake.shape_str());
    const std::size_t br = real.rows(), bf = fake.rows();

    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    const double objective = mean(score_batch(model, real)) - mean(score_batch(model, fake));
    if (!std::isfinite(objective)) throw NonFiniteError("wgan_step: non-finite critic objective");

    // Minimize E[f(fake)] - E[f(real)]. The two halves are differentiated
    // separately so that identical batches cancel exactly.
    ParameterSet grads = critic_backward(model, real, Matrix(br, 1, -1.0 / static_cast<double>(br)));
    const ParameterSet fake_grads = critic_backward(model, fake, Matrix(bf, 1, 1.0 / static_cast<double>(bf)));
    for (std::size_t p = 0; p < grads.size(); ++p) grads[p] = add(grads[p], fake_grads[p]);
    rmsprop_step(model.params(), grads, opt);
    if (apply_clip) clip_parameters(model.params(), model.clip());
    return {objective};
}

}  // namespace c2m
