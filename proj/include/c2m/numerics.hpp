#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <initializer_list>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "c2m/error.hpp"

namespace c2m {

/// Dense row-major matrix of doubles. Shapes are fixed at construction;
/// every binary operation checks its operands and throws ShapeError naming
/// the offending dimensions.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    bool same_shape(const Matrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    std::string shape_str() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
// a^T * b without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// a * b^T without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);
// n x 1 column of per-row sums.
Matrix row_sum(const Matrix& a);
// 1 x m row of per-column sums.
Matrix col_sum(const Matrix& a);
// Adds a 1 x cols row vector to every row of a.
void add_row_inplace(Matrix& a, const Matrix& bias);

bool all_finite(const Matrix& a) noexcept;
double max_abs(const Matrix& a) noexcept;

enum class Activation { Relu, LeakyRelu, Sigmoid, SoftmaxRows };

Matrix relu(const Matrix& x);
Matrix leaky_relu(const Matrix& x, double alpha);
Matrix sigmoid(const Matrix& x);
// Row-wise softmax; every row is a probability vector.
Matrix softmax_rows(const Matrix& x);
Matrix activate(const Matrix& x, Activation kind, double alpha = 0.2);

inline double sigmoid(double x) noexcept {
    // Split by sign so exp never overflows.
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// Ordered, named collection of weight matrices. Names are unique and the
/// set of shapes never changes after the last add().
class ParameterSet {
public:
    struct Entry {
        std::string name;
        Matrix value;
    };

    void add(std::string name, Matrix value);

    std::size_t size() const noexcept { return entries_.size(); }
    Matrix& operator[](std::size_t i) noexcept { return entries_[i].value; }
    const Matrix& operator[](std::size_t i) const noexcept { return entries_[i].value; }
    const std::string& name(std::size_t i) const noexcept { return entries_[i].name; }

    Matrix& at(const std::string& name);
    const Matrix& at(const std::string& name) const;
    bool contains(const std::string& name) const noexcept;

    auto begin() noexcept { return entries_.begin(); }
    auto end() noexcept { return entries_.end(); }
    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

    // Same names, same order, same shapes.
    bool same_layout(const ParameterSet& other) const noexcept;
    // Copy of this set with every matrix zeroed.
    ParameterSet zeros_like() const;
    std::size_t scalar_count() const noexcept;
    bool all_finite() const noexcept;
    double max_abs() const noexcept;

    friend bool operator==(const ParameterSet& a, const ParameterSet& b) {
        if (a.entries_.size() != b.entries_.size()) return false;
        for (std::size_t i = 0; i < a.entries_.size(); ++i) {
            if (a.entries_[i].name != b.entries_[i].name || a.entries_[i].value != b.entries_[i].value)
                return false;
        }
        return true;
    }

private:
    std::vector<Entry> entries_;
};

struct RmspropConfig {
    double learning_rate = 0.01;
    double rho = 0.9;
    double epsilon = 1e-8;
    // Multiplicative learning-rate decay applied at each epoch boundary.
    double epoch_decay = 0.95;
};

/// Per-parameter squared-gradient accumulators plus the optimizer constants.
struct RmspropState {
    std::vector<Matrix> accumulators;
    double learning_rate = 0.01;
    double rho = 0.9;
    double epsilon = 1e-8;
    double epoch_decay = 0.95;

    RmspropState() = default;
    RmspropState(const ParameterSet& like, const RmspropConfig& cfg);

    void end_epoch() noexcept { learning_rate *= epoch_decay; }
};

// acc <- rho*acc + (1-rho)*g^2 ; p <- p - lr*g/(sqrt(acc)+eps).
// Throws NonFiniteError (leaving params and state untouched) when any
// gradient entry is NaN or infinite.
void rmsprop_step(ParameterSet& params, const ParameterSet& grads, RmspropState& state);

// Clamps every scalar into [-c, c].
void clip_parameters(ParameterSet& params, double c);

struct GradCheckReport {
    double max_deviation = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    std::size_t checked = 0;
};

/// Central-difference check of `analytic` against `loss`, perturbing one
/// coordinate of `params` at a time by +-h. The deviation of a coordinate
/// is |a - n| / max(|a|, |n|, abs_floor).
GradCheckReport finite_diff_check(const ParameterSet& params,
                                  const std::function<double(const ParameterSet&)>& loss,
                                  const ParameterSet& analytic, double h = 1e-5,
                                  double abs_floor = 1e-6);

/// The single source of randomness. Everything that draws random numbers
/// takes an Rng (or a seed used to construct one).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal(double mean = 0.0, double stddev = 1.0) {
        return std::normal_distribution<double>(mean, stddev)(engine_);
    }
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    // Inclusive on both ends.
    std::size_t uniform_index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
    }
    std::uint64_t next_seed() { return engine_(); }
    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

// Runs fn(i) for i in [0, n) on up to `threads` workers with static
// chunking. fn must only write to per-index state. The first exception
// thrown by any worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += workers) fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace c2m
