#pragma once

// Rankings, hit@k, NDCG* and Cohen's kappa.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace automate::train {

/// One ranked example. `order` is a permutation of candidate indices and
/// `first_correct` the 1-based rank of the first positive (0 if none).
struct Ranking {
  std::vector<int> order;
  int first_correct = 0;
};

template <class Positive>
int first_correct_rank(const std::vector<int>& order, Positive&& is_positive) {
  for (std::size_t r = 0; r < order.size(); ++r)
    if (is_positive(order[r])) return static_cast<int>(r) + 1;
  return 0;
}

/// Descending by score; ties by candidate index ascending.
inline std::vector<int> order_descending(const std::vector<double>& scores) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });
  return order;
}

/// Ascending by cost; ties by candidate index ascending.
inline std::vector<int> order_ascending(const std::vector<double>& costs) {
  std::vector<int> order(costs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return costs[a] < costs[b]; });
  return order;
}

inline Ranking rank_scores(const std::vector<double>& scores, const std::vector<int>& positives) {
  Ranking r;
  r.order = order_descending(scores);
  r.first_correct = first_correct_rank(r.order, [&](int c) {
    return std::find(positives.begin(), positives.end(), c) != positives.end();
  });
  return r;
}

inline Ranking rank_costs(const std::vector<double>& costs, const std::vector<int>& positives) {
  Ranking r;
  r.order = order_ascending(costs);
  r.first_correct = first_correct_rank(r.order, [&](int c) {
    return std::find(positives.begin(), positives.end(), c) != positives.end();
  });
  return r;
}

/// Fraction of examples whose first correct rank is in [1, k].
inline double hit_at_k(const std::vector<int>& first_correct, int k) {
  if (first_correct.empty()) return 0.0;
  int hits = 0;
  for (int r : first_correct) hits += (r >= 1 && r <= k) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(first_correct.size());
}

/// hit@1 .. hit@kmax.
inline std::vector<double> hit_curve(const std::vector<int>& first_correct, int kmax) {
  std::vector<double> out;
  for (int k = 1; k <= kmax; ++k) out.push_back(hit_at_k(first_correct, k));
  return out;
}

/// Mean over examples of 1 / log2(1 + rank); examples without a positive add 0.
inline double ndcg_star(const std::vector<int>& first_correct) {
  if (first_correct.empty()) return 0.0;
  double s = 0;
  for (int r : first_correct)
    if (r >= 1) s += 1.0 / std::log2(1.0 + r);
  return s / static_cast<double>(first_correct.size());
}

/// Model-selection score: mean of hit@1..hit@kmax.
inline double mean_hit(const std::vector<int>& first_correct, int kmax) {
  const auto c = hit_curve(first_correct, kmax);
  return std::accumulate(c.begin(), c.end(), 0.0) / kmax;
}

template <class Ranks>
std::vector<int> first_correct_of(const Ranks& rankings) {
  std::vector<int> out;
  for (const Ranking& r : rankings) out.push_back(r.first_correct);
  return out;
}

/// (p_o − p_e) / (1 − p_e) over `classes` labels. When p_e = 1 the result
/// is 1 if p_o = 1, otherwise an error.
inline double cohen_kappa(const std::vector<int>& a, const std::vector<int>& b, int classes) {
  if (a.size() != b.size()) throw std::invalid_argument("cohen_kappa: label sequences differ in length");
  if (a.empty()) throw std::invalid_argument("cohen_kappa: empty label sequences");
  std::vector<double> pa(classes, 0.0), pb(classes, 0.0);
  double agree = 0;
  const double n = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || a[i] >= classes || b[i] < 0 || b[i] >= classes)
      throw std::invalid_argument("cohen_kappa: label out of range");
    pa[a[i]] += 1 / n;
    pb[b[i]] += 1 / n;
    agree += a[i] == b[i] ? 1 : 0;
  }
  const double po = agree / n;
  double pe = 0;
  for (int c = 0; c < classes; ++c) pe += pa[c] * pb[c];
  if (std::abs(1 - pe) < 1e-12) {
    if (po == 1.0) return 1.0;
    throw std::domain_error("cohen_kappa: undefined when expected agreement is 1");
  }
  return (po - pe) / (1 - pe);
}

}  // namespace automate::train
