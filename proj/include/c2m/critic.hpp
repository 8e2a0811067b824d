#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "c2m/gae.hpp"
#include "c2m/numerics.hpp"

namespace c2m {

struct CriticConfig {
    std::vector<std::size_t> hidden{256, 256, 512, 512};
    double leaky_alpha = 0.2;
    double clip = 0.01;
};

/// The learned metric: an MLP from embeddings to a real score. Hidden layers
/// use LeakyReLU, the output layer is linear. Parameters are named
/// W1,b1,...,WL,bL and, once trained, always lie in [-clip, clip].
class CriticModel {
public:
    CriticModel() = default;
    // Weights uniform in [-clip, clip], biases zero.
    CriticModel(std::size_t input_dim, const CriticConfig& cfg, std::uint64_t seed);
    // Adopts existing parameters; validates the layer chain.
    CriticModel(ParameterSet params, double leaky_alpha, double clip);

    std::size_t input_dim() const noexcept { return params_[0].rows(); }
    std::size_t layers() const noexcept { return params_.size() / 2; }
    double leaky_alpha() const noexcept { return alpha_; }
    double clip() const noexcept { return clip_; }
    const Matrix& weight(std::size_t layer) const { return params_[2 * layer]; }
    const Matrix& bias(std::size_t layer) const { return params_[2 * layer + 1]; }

    ParameterSet& params() noexcept { return params_; }
    const ParameterSet& params() const noexcept { return params_; }

    friend bool operator==(const CriticModel&, const CriticModel&) = default;

private:
    ParameterSet params_;
    double alpha_ = 0.2;
    double clip_ = 0.01;
};

// Stacks embeddings as rows; all must share one length.
Matrix stack_embeddings(std::span<const Embedding> zs);

double score(const CriticModel& model, const Embedding& z);
// One score per row of `inputs`.
std::vector<double> score_batch(const CriticModel& model, const Matrix& inputs);

// Gradients of sum_i upstream[i] * score(inputs row i) with respect to
// every parameter. upstream is B x 1.
ParameterSet critic_backward(const CriticModel& model, const Matrix& inputs, const Matrix& upstream);

// d score / d z.
std::vector<double> input_gradient(const CriticModel& model, const Embedding& z);

// Per-coordinate bound on |d score / d z_i|: row i of |W1| |W2| ... |WL|.
// Holds because every LeakyReLU slope lies in [alpha, 1].
std::vector<double> input_gradient_bound(const CriticModel& model);

struct WganStepResult {
    // E[f(real)] - E[f(fake)] before the update.
    double objective = 0.0;
};

// One RMSprop ascent step on E[f(real)] - E[f(fake)], then clipping of every
// parameter to [-clip, clip] unless apply_clip is false. A non-finite
// objective or gradient rejects the step (NonFiniteError) and leaves the
// model untouched.
WganStepResult wgan_step(CriticModel& model, const Matrix& real, const Matrix& fake, RmspropState& opt,
                         bool apply_clip = true);

}  // namespace c2m
