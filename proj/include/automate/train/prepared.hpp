#pragma once

// Selection examples converted to network inputs.

#include "automate/dataset/examples.hpp"
#include "automate/model/sbgcn.hpp"

#include <map>
#include <string>
#include <vector>

namespace automate::train {

using dataset::SelectionExample;
using dataset::Split;
using model::GraphBatch;
using model::McfNodes;

/// Graphs of a normalized pair batched as part 0 (a) and part 1 (b).
struct PairGraphs {
  StructuredBrepGraph a, b;
  GraphBatch batch;
};

inline PairGraphs batch_pair(const Part& a, const Part& b) {
  PairGraphs p;
  p.a = build_full_graph(a);
  p.b = build_full_graph(b);
  p.batch = model::batch_graphs({&p.a, &p.b});
  return p;
}

struct PreparedExample {
  std::string id;
  Split split = Split::train;
  MateType mate_type = MateType::fastened;
  GraphBatch batch;
  // unique MCFs per side in first-seen candidate order
  std::vector<McfNodes> mcfs_a, mcfs_b;
  std::vector<Vec3> origins_a, origins_b;
  std::vector<int> cand_a, cand_b;  // candidate -> index into mcfs_*
  std::vector<int> positives;
  McfNodes gt_a, gt_b;
  Vec3 gt_origin_a, gt_origin_b;
  Vec3 com_a, com_b;  // selected faces

  int candidates() const { return static_cast<int>(cand_a.size()); }
  bool is_positive(int c) const { return std::binary_search(positives.begin(), positives.end(), c); }
};

namespace detail {

inline std::string mcf_key(const Mcf& m) {
  return m.origin_ref + "|" + std::string(to_string(m.origin_type)) + "|" + m.orient_ref;
}

}  // namespace detail

/// Normalizes the pair, builds both graphs and resolves every candidate
/// frame. Coordinates are in normalized units.
inline PreparedExample prepare_example(const SelectionExample& ex, const std::map<std::string, Part>& parts) {
  auto find = [&](const std::string& id) -> const Part& {
    auto it = parts.find(id);
    if (it == parts.end()) throw std::runtime_error("example " + ex.id + " references unknown part '" + id + "'");
    return it->second;
  };
  const NormalizedPair n = normalize_pair(find(ex.part_a), find(ex.part_b));
  PreparedExample p;
  p.id = ex.id;
  p.split = ex.split;
  p.mate_type = ex.mate_type;
  p.positives = ex.positives;
  p.batch = batch_pair(n.a, n.b).batch;

  std::map<std::string, int> ia, ib;
  auto side = [&](const Part& part, int index, const Mcf& m, std::map<std::string, int>& seen,
                  std::vector<McfNodes>& nodes, std::vector<Vec3>& origins) {
    auto [it, fresh] = seen.emplace(detail::mcf_key(m), static_cast<int>(nodes.size()));
    if (fresh) {
      nodes.push_back(model::mcf_nodes(p.batch, index, part, m));
      origins.push_back(resolve_frame(part, m).origin);
    }
    return it->second;
  };
  for (const auto& [ma, mb] : ex.candidates) {
    p.cand_a.push_back(side(n.a, 0, ma, ia, p.mcfs_a, p.origins_a));
    p.cand_b.push_back(side(n.b, 1, mb, ib, p.mcfs_b, p.origins_b));
  }
  p.gt_a = model::mcf_nodes(p.batch, 0, n.a, ex.ground_truth.first);
  p.gt_b = model::mcf_nodes(p.batch, 1, n.b, ex.ground_truth.second);
  p.gt_origin_a = resolved(n.a, ex.ground_truth.first).resolved_frame.origin;
  p.gt_origin_b = resolved(n.b, ex.ground_truth.second).resolved_frame.origin;
  p.com_a = n.a.entity(n.a.require(ex.face_a)).summary.center_of_mass;
  p.com_b = n.b.entity(n.b.require(ex.face_b)).summary.center_of_mass;
  return p;
}

inline std::vector<PreparedExample> prepare_examples(const std::vector<SelectionExample>& examples,
                                                     const std::map<std::string, Part>& parts) {
  std::vector<PreparedExample> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(prepare_example(ex, parts));
  return out;
}

}  // namespace automate::train
