#include "c2m/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace c2m {

namespace {

[[noreturn]] void shape_fail(const char* op, const Matrix& a, const Matrix& b) {
    throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_str() + " and " +
                     b.shape_str());
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("matrix " + shape_str() + " given " + std::to_string(data_.size()) +
                         " values");
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    std::size_t r = 0;
    for (const auto& row : rows) {
        if (row.size() != cols_) {
            throw ShapeError("ragged initializer: row " + std::to_string(r) + " has " +
                             std::to_string(row.size()) + " values, expected " +
                             std::to_string(cols_));
        }
        data_.insert(data_.end(), row.begin(), row.end());
        ++r;
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::string Matrix::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) shape_fail("matmul", a, b);
    Matrix out(a.rows(), b.cols());
    const std::size_t inner = a.cols();
    const std::size_t m = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* o = out.row(i).data();
        const double* ar = a.row(i).data();
        for (std::size_t k = 0; k < inner; ++k) {
            const double v = ar[k];
            if (v == 0.0) continue;
            const double* br = b.row(k).data();
            for (std::size_t j = 0; j < m; ++j) o[j] += v * br[j];
        }
    }
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) shape_fail("matmul_tn", a, b);
    Matrix out(a.cols(), b.cols());
    const std::size_t m = b.cols();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const double* ar = a.row(r).data();
        const double* br = b.row(r).data();
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double v = ar[i];
            if (v == 0.0) continue;
            double* o = out.row(i).data();
            for (std::size_t j = 0; j < m; ++j) o[j] += v * br[j];
        }
    }
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) shape_fail("matmul_nt", a, b);
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ar = a.row(i).data();
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* br = b.row(j).data();
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += ar[k] * br[k];
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) shape_fail("add", a, b);
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) shape_fail("hadamard", a, b);
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= b.data()[i];
    return out;
}

Matrix scale(const Matrix& a, double s) {
    Matrix out = a;
    for (double& v : out.data()) v *= s;
    return out;
}

Matrix row_sum(const Matrix& a) {
    Matrix out(a.rows(), 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (double v : a.row(i)) acc += v;
        out(i, 0) = acc;
    }
    return out;
}

Matrix col_sum(const Matrix& a) {
    Matrix out(1, a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(0, j) += a(i, j);
    return out;
}

void add_row_inplace(Matrix& a, const Matrix& bias) {
    if (bias.rows() != 1 || bias.cols() != a.cols()) shape_fail("add_row", a, bias);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* r = a.row(i).data();
        for (std::size_t j = 0; j < a.cols(); ++j) r[j] += bias.data()[j];
    }
}

bool all_finite(const Matrix& a) noexcept {
    return std::all_of(a.data().begin(), a.data().end(), [](double v) { return std::isfinite(v); });
}

double max_abs(const Matrix& a) noexcept {
    double m = 0.0;
    for (double v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

Matrix relu(const Matrix& x) {
    Matrix out = x;
    for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
    return out;
}

Matrix leaky_relu(const Matrix& x, double alpha) {
    Matrix out = x;
    for (double& v : out.data()) v = v > 0.0 ? v : alpha * v;
    return out;
}

Matrix sigmoid(const Matrix& x) {
    Matrix out = x;
    for (double& v : out.data()) v = sigmoid(v);
    return out;
}

Matrix softmax_rows(const Matrix& x) {
    Matrix out = x;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto r = out.row(i);
        if (r.empty()) continue;
        const double mx = *std::max_element(r.begin(), r.end());
        double total = 0.0;
        for (double& v : r) {
            v = std::exp(v - mx);
            total += v;
        }
        for (double& v : r) v /= total;
    }
    return out;
}

Matrix activate(const Matrix& x, Activation kind, double alpha) {
    switch (kind) {
    case Activation::Relu: return relu(x);
    case Activation::LeakyRelu: return leaky_relu(x, alpha);
    case Activation::Sigmoid: return sigmoid(x);
    case Activation::SoftmaxRows: break;
    }
    return softmax_rows(x);
}

void ParameterSet::add(std::string name, Matrix value) {
    if (contains(name)) throw ValidationError("duplicate parameter name '" + name + "'");
    entries_.push_back({std::move(name), std::move(value)});
}

Matrix& ParameterSet::at(const std::string& name) {
    for (auto& e : entries_)
        if (e.name == name) return e.value;
    throw ValidationError("no parameter named '" + name + "'");
}

const Matrix& ParameterSet::at(const std::string& name) const {
    for (const auto& e : entries_)
        if (e.name == name) return e.value;
    throw ValidationError("no parameter named '" + name + "'");
}

bool ParameterSet::contains(const std::string& name) const noexcept {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const Entry& e) { return e.name == name; });
}

bool ParameterSet::same_layout(const ParameterSet& other) const noexcept {
    if (entries_.size() != other.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].name != other.entries_[i].name ||
            !entries_[i].value.same_shape(other.entries_[i].value))
            return false;
    }
    return true;
}

ParameterSet ParameterSet::zeros_like() const {
    ParameterSet out;
    for (const auto& e : entries_) out.add(e.name, Matrix(e.value.rows(), e.value.cols()));
    return out;
}

std::size_t ParameterSet::scalar_count() const noexcept {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.value.size();
    return n;
}

bool ParameterSet::all_finite() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const Entry& e) { return c2m::all_finite(e.value); });
}

double ParameterSet::max_abs() const noexcept {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, c2m::max_abs(e.value));
    return m;
}

RmspropState::RmspropState(const ParameterSet& like, const RmspropConfig& cfg)
    : learning_rate(cfg.learning_rate), rho(cfg.rho), epsilon(cfg.epsilon),
      epoch_decay(cfg.epoch_decay) {
    if (!(cfg.learning_rate > 0.0)) throw ValidationError("learning rate must be > 0");
    if (!(cfg.rho >= 0.0 && cfg.rho < 1.0)) throw ValidationError("rho must lie in [0, 1)");
    accumulators.reserve(like.size());
    for (const auto& e : like) accumulators.emplace_back(e.value.rows(), e.value.cols());
}

void rmsprop_step(ParameterSet& params, const ParameterSet& grads, RmspropState& state) {
    if (!params.same_layout(grads))
        throw ShapeError("rmsprop_step: gradient layout does not match parameters");
    if (state.accumulators.size() != params.size())
        throw ShapeError("rmsprop_step: optimizer state built for a different parameter set");
    if (!grads.all_finite()) throw NonFiniteError("rmsprop_step: non-finite gradient rejected");

    for (std::size_t p = 0; p < params.size(); ++p) {
        auto& w = params[p].data();
        const auto& g = grads[p].data();
        auto& acc = state.accumulators[p].data();
        if (acc.size() != w.size()) throw ShapeError("rmsprop_step: accumulator shape mismatch");
        for (std::size_t i = 0; i < w.size(); ++i) {
            acc[i] = state.rho * acc[i] + (1.0 - state.rho) * g[i] * g[i];
            w[i] -= state.learning_rate * g[i] / (std::sqrt(acc[i]) + state.epsilon);
        }
    }
}

void clip_parameters(ParameterSet& params, double c) {
    if (!(c > 0.0)) throw ValidationError("clip constant must be > 0");
    for (auto& e : params)
        for (double& v : e.value.data()) v = std::clamp(v, -c, c);
}

GradCheckReport finite_diff_check(const ParameterSet& params,
                                  const std::function<double(const ParameterSet&)>& loss,
                                  const ParameterSet& analytic, double h, double abs_floor) {
    if (!(h > 0.0)) throw ValidationError("finite difference step must be > 0");
    if (!params.same_layout(analytic))
        throw ShapeError("finite_diff_check: analytic gradient layout does not match parameters");

    GradCheckReport report;
    ParameterSet probe = params;
    for (std::size_t p = 0; p < probe.size(); ++p) {
        auto& w = probe[p].data();
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double saved = w[i];
            w[i] = saved + h;
            const double up = loss(probe);
            w[i] = saved - h;
            const double down = loss(probe);
            w[i] = saved;

            const double numeric = (up - down) / (2.0 * h);
            const double exact = analytic[p].data()[i];
            const double denom = std::max({std::abs(exact), std::abs(numeric), abs_floor});
            const double dev = std::abs(exact - numeric) / denom;
            ++report.checked;
            if (dev > report.max_deviation || report.checked == 1) {
                report.max_deviation = dev;
                report.worst_param = probe.name(p);
                report.worst_index = i;
                report.analytic = exact;
                report.numeric = numeric;
            }
        }
    }
    return report;
}

}  // namespace c2m
