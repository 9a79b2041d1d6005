#pragma once

// Oracle that predicts the true MCF origins plus Gaussian noise.

#include "automate/train/baselines.hpp"

#include <sstream>

namespace automate::train {

struct NoisyOraclePoint {
  double lambda = 0;
  double accuracy = 0;
};

namespace detail {

inline Vec3 axis_std(const std::vector<Vec3>& pts) {
  Vec3 mean = Vec3::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Vec3 var = Vec3::Zero();
  for (const auto& p : pts) var += (p - mean).cwiseProduct(p - mean);
  return (var / static_cast<double>(pts.size())).cwiseSqrt();
}

}  // namespace detail

/// Ranking of one example under noise scale `lambda`. The unit normal draws
/// depend only on (seed, example id), so every lambda shares one sample.
inline Ranking noisy_oracle_ranking(const PreparedExample& ex, double lambda, std::uint64_t seed) {
  std::mt19937_64 rng(example_seed(ex.id, seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec3 za, zb;
  for (int i = 0; i < 3; ++i) za[i] = normal(rng);
  for (int i = 0; i < 3; ++i) zb[i] = normal(rng);
  const Vec3 pa = ex.gt_origin_a + lambda * detail::axis_std(ex.origins_a).cwiseProduct(za);
  const Vec3 pb = ex.gt_origin_b + lambda * detail::axis_std(ex.origins_b).cwiseProduct(zb);
  std::vector<double> cost;
  for (int c = 0; c < ex.candidates(); ++c)
    cost.push_back((ex.origins_a[ex.cand_a[c]] - pa).norm() + (ex.origins_b[ex.cand_b[c]] - pb).norm());
  return rank_costs(cost, ex.positives);
}

/// hit@1 per lambda.
inline std::vector<NoisyOraclePoint> noisy_oracle_curve(const std::vector<PreparedExample>& examples,
                                                        const std::vector<double>& lambdas, std::uint64_t seed) {
  std::vector<NoisyOraclePoint> out;
  for (double l : lambdas) {
    std::vector<int> ranks;
    for (const auto& ex : examples) ranks.push_back(noisy_oracle_ranking(ex, l, seed).first_correct);
    out.push_back({l, hit_at_k(ranks, 1)});
  }
  return out;
}

inline std::string noisy_oracle_csv(const std::vector<NoisyOraclePoint>& curve) {
  std::ostringstream s;
  s.precision(17);
  s << "lambda,accuracy\n";
  for (const auto& p : curve) s << p.lambda << "," << p.accuracy << "\n";
  return s.str();
}

}  // namespace automate::train
