#pragma once

// Ad-hoc rankers for the location and mate type tasks.

#include "automate/hash.hpp"
#include "automate/train/metrics.hpp"
#include "automate/train/prepared.hpp"

#include <array>
#include <random>

namespace automate::train {

/// Per-example stream seed.
inline std::uint64_t example_seed(const std::string& id, std::uint64_t seed) {
  return fnv1a64(id, 0xcbf29ce484222325ULL ^ (seed * 0x9e3779b97f4a7c15ULL));
}

/// Uniform random permutation seeded by (seed, example id).
inline Ranking random_baseline(const PreparedExample& ex, std::uint64_t seed) {
  std::vector<int> order(ex.candidates());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(example_seed(ex.id, seed));
  std::shuffle(order.begin(), order.end(), rng);
  Ranking r;
  r.order = std::move(order);
  r.first_correct = first_correct_rank(r.order, [&](int c) { return ex.is_positive(c); });
  return r;
}

/// Frequency of ordered (a-side, b-side) origin-type pairs among training
/// ground truths.
struct OriginTypeTable {
  std::array<std::array<long, kOriginTypeCount>, kOriginTypeCount> counts{};

  static OriginTypeTable fit(const std::vector<PreparedExample>& train) {
    OriginTypeTable t;
    for (const auto& ex : train) ++t.counts[static_cast<int>(ex.gt_a.type)][static_cast<int>(ex.gt_b.type)];
    return t;
  }

  long count(OriginType a, OriginType b) const { return counts[static_cast<int>(a)][static_cast<int>(b)]; }
};

/// Descending pair frequency; unseen pairs (count 0) last; ties by index.
inline Ranking origin_type_baseline(const PreparedExample& ex, const OriginTypeTable& table) {
  std::vector<double> scores;
  for (int c = 0; c < ex.candidates(); ++c)
    scores.push_back(static_cast<double>(table.count(ex.mcfs_a[ex.cand_a[c]].type, ex.mcfs_b[ex.cand_b[c]].type)));
  return rank_scores(scores, ex.positives);
}

/// Ascending |origin_a − COM(face_a)| + |origin_b − COM(face_b)|.
inline Ranking snap_to_selection_baseline(const PreparedExample& ex) {
  std::vector<double> cost;
  for (int c = 0; c < ex.candidates(); ++c)
    cost.push_back((ex.origins_a[ex.cand_a[c]] - ex.com_a).norm() + (ex.origins_b[ex.cand_b[c]] - ex.com_b).norm());
  return rank_costs(cost, ex.positives);
}

/// Mate types ordered by frequency in a fitted label set; ties by enum order.
struct LabelDistribution {
  std::array<long, kMateTypeCount> counts{};

  static LabelDistribution fit(const std::vector<PreparedExample>& examples) {
    LabelDistribution d;
    for (const auto& ex : examples) ++d.counts[static_cast<int>(ex.mate_type)];
    return d;
  }

  std::vector<int> order() const {
    std::vector<double> s(counts.begin(), counts.end());
    return order_descending(s);
  }

  Ranking rank(MateType truth) const {
    Ranking r;
    r.order = order();
    r.first_correct = first_correct_rank(r.order, [&](int c) { return c == static_cast<int>(truth); });
    return r;
  }
};

}  // namespace automate::train
