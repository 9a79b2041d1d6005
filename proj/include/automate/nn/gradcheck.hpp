#pragma once

// Central finite-difference checks against the tape's analytic gradients.

#include "automate/nn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace automate::nn {

/// ‖a − n‖ / max(‖a‖, ‖n‖); 0 when both vanish.
inline double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  double diff = 0, na = 0, nn = 0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  const double den = std::sqrt(std::max(na, nn));
  return den < 1e-300 ? 0.0 : std::sqrt(diff) / den;
}

/// (f(x+h) − f(x−h)) / 2h, restoring x.
inline double central_difference(double& x, const std::function<double()>& f, double h = 1e-5) {
  const double saved = x;
  x = saved + h;
  const double plus = f();
  x = saved - h;
  const double minus = f();
  x = saved;
  return (plus - minus) / (2 * h);
}

/// Central difference at h, or nullopt when it disagrees with the one at
/// h/2: the interval then straddles a kink (relu, max) and the estimate is
/// not a derivative.
inline std::optional<double> smooth_central_difference(double& x, const std::function<double()>& f, double h = 1e-5,
                                                       double tol = 1e-4) {
  const double d1 = central_difference(x, f, h);
  const double d2 = central_difference(x, f, h / 2);
  if (std::abs(d1 - d2) > tol * std::max(std::abs(d1), std::abs(d2)) + 1e-9) return std::nullopt;
  return d1;
}

inline Matrix<double> random_matrix(int rows, int cols, std::mt19937_64& rng, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> d(lo, hi);
  Matrix<double> m(rows, cols);
  for (double& v : m.data) v = d(rng);
  return m;
}

struct GradCheck {
  double max_rel_error = 0;
  int worst_input = -1;
  int entries = 0;
};

using OpFn = std::function<Var(Tape<double>&, const std::vector<Var>&)>;

/// Checks d(loss)/d(input) for every entry of every input. `op` builds a 1×1
/// loss from leaves made of `inputs`.
inline GradCheck check_gradients(std::vector<Matrix<double>> inputs, const OpFn& op, double h = 1e-5) {
  auto build = [&](Tape<double>& t) {
    std::vector<Var> leaves;
    for (const auto& m : inputs) leaves.push_back(t.leaf(m));
    return std::pair{leaves, op(t, leaves)};
  };
  Tape<double> t;
  auto [leaves, loss] = build(t);
  t.backward(loss);

  GradCheck out;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    std::vector<double> analytic(inputs[k].size(), 0.0), numeric;
    if (t.has_grad(leaves[k])) analytic = t.grad(leaves[k]).data;
    for (double& x : inputs[k].data) {
      numeric.push_back(central_difference(x, [&] {
        Tape<double> tt;
        return tt.value(build(tt).second).data[0];
      }, h));
      ++out.entries;
    }
    const double e = relative_error(analytic, numeric);
    if (e >= out.max_rel_error) {
      out.max_rel_error = e;
      out.worst_input = static_cast<int>(k);
    }
  }
  return out;
}

struct GradientCase {
  std::string name;
  std::vector<Matrix<double>> inputs;
  OpFn op;
};

/// One case per primitive on random 7×5 inputs; each output is reduced to a
/// scalar with a random projection.
inline std::vector<GradientCase> primitive_gradient_cases(std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  auto R = [&](int r, int c) { return random_matrix(r, c, rng); };
  auto project = [](Tape<double>& t, Var y, Matrix<double> c) { return dot_constant(t, y, std::move(c)); };
  std::vector<GradientCase> cases;
  auto add_case = [&](std::string name, std::vector<Matrix<double>> in, std::function<Var(Tape<double>&, const std::vector<Var>&)> f,
                      int out_rows, int out_cols) {
    Matrix<double> c = R(out_rows, out_cols);
    cases.push_back({std::move(name), std::move(in), [f, c, project](Tape<double>& t, const std::vector<Var>& v) {
                       return project(t, f(t, v), c);
                     }});
  };

  add_case("matmul", {R(7, 5), R(5, 3)}, [](auto& t, auto& v) { return matmul(t, v[0], v[1]); }, 7, 3);
  add_case("add", {R(7, 5), R(7, 5)}, [](auto& t, auto& v) { return add(t, v[0], v[1]); }, 7, 5);
  add_case("sub", {R(7, 5), R(7, 5)}, [](auto& t, auto& v) { return sub(t, v[0], v[1]); }, 7, 5);
  add_case("add_bias", {R(7, 5), R(1, 5)}, [](auto& t, auto& v) { return add_bias(t, v[0], v[1]); }, 7, 5);
  add_case("concat_cols", {R(7, 5), R(7, 2)}, [](auto& t, auto& v) { return concat_cols(t, v[0], v[1]); }, 7, 7);
  add_case("relu", {R(7, 5)}, [](auto& t, auto& v) { return relu(t, v[0]); }, 7, 5);
  add_case("sigmoid", {R(7, 5)}, [](auto& t, auto& v) { return sigmoid(t, v[0]); }, 7, 5);
  add_case("mean_rows", {R(7, 5)}, [](auto& t, auto& v) { return mean_rows(t, v[0]); }, 1, 5);
  add_case("gather_rows", {R(7, 5)}, [](auto& t, auto& v) { return gather_rows(t, v[0], {6, 0, 3, 3, 1}); }, 5, 5);
  add_case("scatter_rows", {R(7, 5)}, [](auto& t, auto& v) { return scatter_rows(t, v[0], {0, 2, 4, 6, 8, 9, 1}, 10); },
           10, 5);
  add_case("segment_max", {R(7, 5)},
           [](auto& t, auto& v) { return segment_max(t, v[0], {0, 1, 0, 2, 1, 0, 2}, 4); }, 4, 5);
  for (bool train : {true, false}) {
    add_case(train ? "batchnorm(train)" : "batchnorm(eval)", {R(7, 5), R(1, 5), R(1, 5)},
             [train](auto& t, auto& v) {
               Matrix<double> mean(1, 5, 0.1), var(1, 5, 1.3);
               return batchnorm(t, v[0], v[1], v[2], mean, var, BatchNormOptions{train, 0.1, 1e-5});
             },
             7, 5);
  }
  cases.push_back({"softmax_cross_entropy", {R(7, 5)}, [](Tape<double>& t, const std::vector<Var>& v) {
                     return softmax_cross_entropy(t, v[0], {0, 4, 2, 2, 1, 3, 0});
                   }});
  cases.push_back({"weighted_bce_with_logits", {R(7, 1)}, [](Tape<double>& t, const std::vector<Var>& v) {
                     return weighted_bce_with_logits(t, v[0], std::vector<double>{1, 0, 0, 1, 0, 0, 0},
                                                     std::vector<double>{2.5, 1, 1, 2.5, 1, 1, 1});
                   }});
  return cases;
}

}  // namespace automate::nn
