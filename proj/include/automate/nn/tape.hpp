#pragma once

// Reverse-mode automatic differentiation over dense row-major matrices.
// A Tape records every operation of one forward pass; backward() walks it in
// reverse and accumulates gradients.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace automate::nn {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& op, const char* stage)
      : std::runtime_error(std::string("non-finite ") + stage + " in op '" + op + "'"), op_(op) {}
  const std::string& op() const { return op_; }

 private:
  std::string op_;
};

template <class T>
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<T> data;

  Matrix() = default;
  Matrix(int r, int c, T fill = T(0)) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}
  Matrix(int r, int c, std::vector<T> d) : rows(r), cols(c), data(std::move(d)) {
    if (data.size() != static_cast<std::size_t>(r) * c) throw ShapeError("matrix data size mismatch");
  }

  T& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  T operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  T* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const T* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

  using EigenMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using ConstEigenMap = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  EigenMap map() { return EigenMap(data.data(), rows, cols); }
  ConstEigenMap map() const { return ConstEigenMap(data.data(), rows, cols); }

  bool all_finite() const {
    for (T v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

struct Var {
  int id = -1;
};

template <class T>
class Tape {
 public:
  using Mat = Matrix<T>;
  using Backward = std::function<void(Tape&, int)>;

  struct Node {
    Mat value;
    Mat grad;
    bool needs_grad = false;
    std::string op;
    Backward backward;
  };

  Var constant(Mat value, std::string op = "constant") { return push(std::move(value), false, std::move(op), {}); }
  Var leaf(Mat value, std::string op = "leaf") { return push(std::move(value), true, std::move(op), {}); }

  /// Records an op result; `backward` is only kept when some input needs a gradient.
  Var push(Mat value, bool needs_grad, std::string op, Backward backward) {
    if (!value.all_finite()) throw NonFiniteError(op, "value");
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    n.op = std::move(op);
    if (needs_grad) n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  const Mat& value(Var v) const { return nodes_.at(v.id).value; }
  bool needs_grad(Var v) const { return nodes_.at(v.id).needs_grad; }
  const std::string& op(Var v) const { return nodes_.at(v.id).op; }

  /// Gradient accumulator of `v`, allocated as zeros on first use.
  Mat& grad(Var v) { return grad(v.id); }
  Mat& grad(int id) {
    Node& n = nodes_[id];
    if (n.grad.size() != n.value.size() || !n.grad.same_shape(n.value)) n.grad = Mat(n.value.rows, n.value.cols);
    return n.grad;
  }
  bool has_grad(Var v) const { return nodes_.at(v.id).grad.size() == nodes_.at(v.id).value.size(); }

  /// Seeds d(loss)/d(loss) = 1 for a 1×1 loss and propagates to every node.
  void backward(Var loss) {
    const Mat& l = value(loss);
    if (l.rows != 1 || l.cols != 1) throw ShapeError("backward expects a 1x1 loss");
    grad(loss).data[0] = T(1);
    for (int i = loss.id; i >= 0; --i) {
      Node& n = nodes_[i];
      if (!n.needs_grad || !n.backward || n.grad.size() == 0) continue;
      if (!n.grad.all_finite()) throw NonFiniteError(n.op, "gradient");
      n.backward(*this, i);
    }
  }

  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  std::vector<Node> nodes_;
};

template <class T>
bool needs(const Tape<T>& t, std::initializer_list<Var> vs) {
  for (Var v : vs)
    if (t.needs_grad(v)) return true;
  return false;
}

// ----- primitives -----------------------------------------------------------

template <class T>
Var matmul(Tape<T>& t, Var a, Var b) {
  const auto& A = t.value(a);
  const auto& B = t.value(b);
  if (A.cols != B.rows)
    throw ShapeError("matmul: " + std::to_string(A.rows) + "x" + std::to_string(A.cols) + " by " +
                     std::to_string(B.rows) + "x" + std::to_string(B.cols));
  Matrix<T> y(A.rows, B.cols);
  y.map().noalias() = A.map() * B.map();
  return t.push(std::move(y), needs(t, {a, b}), "matmul", [a, b](Tape<T>& t, int self) {
    const auto& g = t.grad(self);
    if (t.needs_grad(a)) t.grad(a).map().noalias() += g.map() * t.value(b).map().transpose();
    if (t.needs_grad(b)) t.grad(b).map().noalias() += t.value(a).map().transpose() * g.map();
  });
}

template <class T>
Var add(Tape<T>& t, Var a, Var b) {
  const auto& A = t.value(a);
  const auto& B = t.value(b);
  if (!A.same_shape(B)) throw ShapeError("add: shape mismatch");
  Matrix<T> y = A;
  y.map() += B.map();
  return t.push(std::move(y), needs(t, {a, b}), "add", [a, b](Tape<T>& t, int self) {
    const auto& g = t.grad(self);
    if (t.needs_grad(a)) t.grad(a).map() += g.map();
    if (t.needs_grad(b)) t.grad(b).map() += g.map();
  });
}

template <class T>
Var sub(Tape<T>& t, Var a, Var b) {
  const auto& A = t.value(a);
  const auto& B = t.value(b);
  if (!A.same_shape(B)) throw ShapeError("sub: shape mismatch");
  Matrix<T> y = A;
  y.map() -= B.map();
  return t.push(std::move(y), needs(t, {a, b}), "sub", [a, b](Tape<T>& t, int self) {
    const auto& g = t.grad(self);
    if (t.needs_grad(a)) t.grad(a).map() += g.map();
    if (t.needs_grad(b)) t.grad(b).map() -= g.map();
  });
}

/// x (n×m) + b (1×m) broadcast over rows.
template <class T>
Var add_bias(Tape<T>& t, Var x, Var b) {
  const auto& X = t.value(x);
  const auto& B = t.value(b);
  if (B.rows != 1 || B.cols != X.cols) throw ShapeError("add_bias: bias must be 1x" + std::to_string(X.cols));
  Matrix<T> y = X;
  y.map().rowwise() += B.map().row(0);
  return t.push(std::move(y), needs(t, {x, b}), "add_bias", [x, b](Tape<T>& t, int self) {
    const auto& g = t.grad(self);
    if (t.needs_grad(x)) t.grad(x).map() += g.map();
    if (t.needs_grad(b)) t.grad(b).map().row(0) += g.map().colwise().sum();
  });
}

template <class T>
Var concat_cols(Tape<T>& t, Var a, Var b) {
  const auto& A = t.value(a);
  const auto& B = t.value(b);
  if (A.rows != B.rows) throw ShapeError("concat_cols: row mismatch");
  Matrix<T> y(A.rows, A.cols + B.cols);
  y.map().leftCols(A.cols) = A.map();
  y.map().rightCols(B.cols) = B.map();
  const int ca = A.cols, cb = B.cols;
  return t.push(std::move(y), needs(t, {a, b}), "concat_cols", [a, b, ca, cb](Tape<T>& t, int self) {
    const auto& g = t.grad(self);
    if (t.needs_grad(a)) t.grad(a).map() += g.map().leftCols(ca);
    if (t.needs_grad(b)) t.grad(b).map() += g.map().rightCols(cb);
  });
}

template <class T>
Var relu(Tape<T>& t, Var x) {
  Matrix<T> y = t.value(x);
  for (T& v : y.data) v = v > T(0) ? v : T(0);
  return t.push(std::move(y), t.needs_grad(x), "relu", [x](Tape<T>& t, int self) {
    const auto& g = t.grad(self);
    const auto& X = t.value(x);
    auto& gx = t.grad(x);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (X.data[i] > T(0)) gx.data[i] += g.data[i];
  });
}

template <class T>
T stable_sigmoid(T z) {
  if (z >= T(0)) return T(1) / (T(1) + std::exp(-z));
  const T e = std::exp(z);
  return e / (T(1) + e);
}

template <class T>
Var sigmoid(Tape<T>& t, Var x) {
  Matrix<T> y = t.value(x);
  for (T& v : y.data) v = stable_sigmoid(v);
  return t.push(std::move(y), t.needs_grad(x), "sigmoid", [x](Tape<T>& t, int self) {
    const auto& g = t.grad(self);
    const auto& Y = t.value(Var{self});
    auto& gx = t.grad(x);
    for (std::size_t i = 0; i < g.size(); ++i) gx.data[i] += g.data[i] * Y.data[i] * (T(1) - Y.data[i]);
  });
}

/// Column means: n×m -> 1×m.
template <class T>
Var mean_rows(Tape<T>& t, Var x) {
  const auto& X = t.value(x);
  if (X.rows == 0) throw ShapeError("mean_rows: empty input");
  Matrix<T> y(1, X.cols);
  y.map().row(0) = X.map().colwise().mean();
  const T inv = T(1) / T(X.rows);
  return t.push(std::move(y), t.needs_grad(x), "mean_rows", [x, inv](Tape<T>& t, int self) {
    const Eigen::Matrix<T, 1, Eigen::Dynamic> g = t.grad(self).map().row(0) * inv;
    t.grad(x).map().rowwise() += g;
  });
}

/// Rows x[idx[i]] stacked.
template <class T>
Var gather_rows(Tape<T>& t, Var x, std::vector<int> idx) {
  const auto& X = t.value(x);
  Matrix<T> y(static_cast<int>(idx.size()), X.cols);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= X.rows) throw ShapeError("gather_rows: index out of range");
    std::copy(X.row(idx[i]), X.row(idx[i]) + X.cols, y.row(static_cast<int>(i)));
  }
  return t.push(std::move(y), t.needs_grad(x), "gather_rows", [x, idx = std::move(idx)](Tape<T>& t, int self) {
    const auto& g = t.grad(self);
    auto& gx = t.grad(x);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const T* src = g.row(static_cast<int>(i));
      T* dst = gx.row(idx[i]);
      for (int c = 0; c < g.cols; ++c) dst[c] += src[c];
    }
  });
}

/// n×m result whose row idx[i] accumulates x row i.
template <class T>
Var scatter_rows(Tape<T>& t, Var x, std::vector<int> idx, int n) {
  const auto& X = t.value(x);
  if (static_cast<int>(idx.size()) != X.rows) throw ShapeError("scatter_rows: index count mismatch");
  Matrix<T> y(n, X.cols);
  for (int i = 0; i < X.rows; ++i) {
    if (idx[i] < 0 || idx[i] >= n) throw ShapeError("scatter_rows: index out of range");
    T* dst = y.row(idx[i]);
    const T* src = X.row(i);
    for (int c = 0; c < X.cols; ++c) dst[c] += src[c];
  }
  return t.push(std::move(y), t.needs_grad(x), "scatter_rows", [x, idx = std::move(idx)](Tape<T>& t, int self) {
    const auto& g = t.grad(self);
    auto& gx = t.grad(x);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const T* src = g.row(idx[i]);
      T* dst = gx.row(static_cast<int>(i));
      for (int c = 0; c < g.cols; ++c) dst[c] += src[c];
    }
  });
}

/// Per-segment, per-column maximum of the rows of x; row i belongs to
/// segment seg[i]. Ties go to the lowest row; empty segments give 0.
template <class T>
Var segment_max(Tape<T>& t, Var x, const std::vector<int>& seg, int n_segments) {
  const auto& X = t.value(x);
  if (static_cast<int>(seg.size()) != X.rows) throw ShapeError("segment_max: segment count mismatch");
  Matrix<T> y(n_segments, X.cols);
  std::vector<int> arg(static_cast<std::size_t>(n_segments) * X.cols, -1);
  for (int i = 0; i < X.rows; ++i) {
    const int s = seg[i];
    if (s < 0 || s >= n_segments) throw ShapeError("segment_max: segment out of range");
    const T* src = X.row(i);
    T* dst = y.row(s);
    int* a = arg.data() + static_cast<std::size_t>(s) * X.cols;
    for (int c = 0; c < X.cols; ++c)
      if (a[c] < 0 || src[c] > dst[c]) {
        dst[c] = src[c];
        a[c] = i;
      }
  }
  const int cols = X.cols;
  return t.push(std::move(y), t.needs_grad(x), "segment_max", [x, arg = std::move(arg), cols](Tape<T>& t, int self) {
    const auto& g = t.grad(self);
    auto& gx = t.grad(x);
    for (std::size_t k = 0; k < arg.size(); ++k)
      if (arg[k] >= 0) gx(arg[k], static_cast<int>(k % cols)) += g.data[k];
  });
}

struct BatchNormOptions {
  bool train = true;
  double momentum = 0.1;
  double eps = 1e-5;
  bool update_running = true;  // train mode only
};

/// Per-column batch normalization. In train mode the batch statistics are
/// used and the running buffers are updated (unbiased variance); in eval
/// mode the running buffers are used and never modified.
template <class T>
Var batchnorm(Tape<T>& t, Var x, Var gamma, Var beta, Matrix<T>& running_mean, Matrix<T>& running_var,
              BatchNormOptions opt = {}) {
  const auto& X = t.value(x);
  const int n = X.rows, m = X.cols;
  const auto& G = t.value(gamma);
  const auto& B = t.value(beta);
  if (G.rows != 1 || G.cols != m || !G.same_shape(B) || !running_mean.same_shape(G) || !running_var.same_shape(G))
    throw ShapeError("batchnorm: parameter shape mismatch");
  if (n == 0) throw ShapeError("batchnorm: empty batch");

  std::vector<T> inv_std(m);
  Matrix<T> xhat(n, m);
  if (opt.train) {
    for (int c = 0; c < m; ++c) {
      T mean = 0;
      for (int r = 0; r < n; ++r) mean += X(r, c);
      mean /= T(n);
      T var = 0;
      for (int r = 0; r < n; ++r) var += (X(r, c) - mean) * (X(r, c) - mean);
      const T unbiased = n > 1 ? var / T(n - 1) : T(0);
      var /= T(n);
      inv_std[c] = T(1) / std::sqrt(var + T(opt.eps));
      for (int r = 0; r < n; ++r) xhat(r, c) = (X(r, c) - mean) * inv_std[c];
      if (!opt.update_running) continue;
      running_mean.data[c] = T(1 - opt.momentum) * running_mean.data[c] + T(opt.momentum) * mean;
      running_var.data[c] = T(1 - opt.momentum) * running_var.data[c] + T(opt.momentum) * unbiased;
    }
  } else {
    for (int c = 0; c < m; ++c) {
      inv_std[c] = T(1) / std::sqrt(running_var.data[c] + T(opt.eps));
      for (int r = 0; r < n; ++r) xhat(r, c) = (X(r, c) - running_mean.data[c]) * inv_std[c];
    }
  }
  Matrix<T> y(n, m);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c) y(r, c) = G.data[c] * xhat(r, c) + B.data[c];

  const bool train = opt.train;
  return t.push(std::move(y), needs(t, {x, gamma, beta}), train ? "batchnorm(train)" : "batchnorm(eval)",
                [x, gamma, beta, xhat = std::move(xhat), inv_std = std::move(inv_std), train](Tape<T>& t, int self) {
                  const auto& g = t.grad(self);
                  const int n = g.rows, m = g.cols;
                  const auto& G = t.value(gamma);
                  std::vector<T> sum_g(m, T(0)), sum_gx(m, T(0));
                  for (int r = 0; r < n; ++r)
                    for (int c = 0; c < m; ++c) {
                      sum_g[c] += g(r, c);
                      sum_gx[c] += g(r, c) * xhat(r, c);
                    }
                  if (t.needs_grad(gamma))
                    for (int c = 0; c < m; ++c) t.grad(gamma).data[c] += sum_gx[c];
                  if (t.needs_grad(beta))
                    for (int c = 0; c < m; ++c) t.grad(beta).data[c] += sum_g[c];
                  if (!t.needs_grad(x)) return;
                  auto& gx = t.grad(x);
                  for (int r = 0; r < n; ++r)
                    for (int c = 0; c < m; ++c) {
                      const T k = G.data[c] * inv_std[c];
                      gx(r, c) += train ? k * (g(r, c) - sum_g[c] / T(n) - xhat(r, c) * sum_gx[c] / T(n))
                                        : k * g(r, c);
                    }
                });
}

/// Mean softmax cross-entropy of logits (n×C) against labels (n).
template <class T>
Var softmax_cross_entropy(Tape<T>& t, Var logits, std::vector<int> labels) {
  const auto& Z = t.value(logits);
  if (static_cast<int>(labels.size()) != Z.rows || Z.rows == 0)
    throw ShapeError("softmax_cross_entropy: label count mismatch");
  Matrix<T> prob(Z.rows, Z.cols);
  T loss = 0;
  for (int r = 0; r < Z.rows; ++r) {
    if (labels[r] < 0 || labels[r] >= Z.cols) throw std::invalid_argument("softmax_cross_entropy: invalid label");
    const T* z = Z.row(r);
    const T zmax = *std::max_element(z, z + Z.cols);
    T s = 0;
    for (int c = 0; c < Z.cols; ++c) s += std::exp(z[c] - zmax);
    const T lse = zmax + std::log(s);
    for (int c = 0; c < Z.cols; ++c) prob(r, c) = std::exp(z[c] - lse);
    loss += lse - z[labels[r]];
  }
  loss /= T(Z.rows);
  return t.push(Matrix<T>(1, 1, std::vector<T>{loss}), t.needs_grad(logits), "softmax_cross_entropy",
                [logits, prob = std::move(prob), labels = std::move(labels)](Tape<T>& t, int self) {
                  const T g = t.grad(self).data[0] / T(prob.rows);
                  auto& gz = t.grad(logits);
                  for (int r = 0; r < prob.rows; ++r)
                    for (int c = 0; c < prob.cols; ++c)
                      gz(r, c) += g * (prob(r, c) - (c == labels[r] ? T(1) : T(0)));
                });
}

/// Σ wᵢ ℓᵢ / Σ wᵢ with ℓᵢ the sigmoid binary cross-entropy of logit zᵢ (n×1).
template <class T>
Var weighted_bce_with_logits(Tape<T>& t, Var logits, std::vector<T> targets, std::vector<T> weights) {
  const auto& Z = t.value(logits);
  if (Z.cols != 1 || static_cast<int>(targets.size()) != Z.rows || targets.size() != weights.size() || Z.rows == 0)
    throw ShapeError("weighted_bce_with_logits: shape mismatch");
  T wsum = 0, loss = 0;
  for (int i = 0; i < Z.rows; ++i) {
    const T z = Z.data[i];
    const T l = std::max(z, T(0)) - z * targets[i] + std::log1p(std::exp(-std::abs(z)));
    loss += weights[i] * l;
    wsum += weights[i];
  }
  if (!(wsum > T(0))) throw std::invalid_argument("weighted_bce_with_logits: weights sum to zero");
  loss /= wsum;
  return t.push(Matrix<T>(1, 1, std::vector<T>{loss}), t.needs_grad(logits), "weighted_bce_with_logits",
                [logits, targets = std::move(targets), weights = std::move(weights), wsum](Tape<T>& t, int self) {
                  const T g = t.grad(self).data[0] / wsum;
                  const auto& Z = t.value(logits);
                  auto& gz = t.grad(logits);
                  for (int i = 0; i < Z.rows; ++i)
                    gz.data[i] += g * weights[i] * (stable_sigmoid(Z.data[i]) - targets[i]);
                });
}

/// Σ x∘c for a constant c of the same shape: 1×1.
template <class T>
Var dot_constant(Tape<T>& t, Var x, Matrix<T> c) {
  const auto& X = t.value(x);
  if (!X.same_shape(c)) throw ShapeError("dot_constant: shape mismatch");
  T s = 0;
  for (std::size_t i = 0; i < c.size(); ++i) s += X.data[i] * c.data[i];
  return t.push(Matrix<T>(1, 1, std::vector<T>{s}), t.needs_grad(x), "dot_constant",
                [x, c = std::move(c)](Tape<T>& t, int self) {
                  const T g = t.grad(self).data[0];
                  auto& gx = t.grad(x);
                  for (std::size_t i = 0; i < c.size(); ++i) gx.data[i] += g * c.data[i];
                });
}

}  // namespace automate::nn
