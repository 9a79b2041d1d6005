#pragma once

#include "automate/dataset/dedup.hpp"
#include "automate/graph.hpp"
#include "automate/hash.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace automate::dataset {

enum class Split : int { train, val, test };

inline std::string_view to_string(Split s) {
  static constexpr std::string_view names[] = {"train", "val", "test"};
  return names[static_cast<int>(s)];
}

inline std::optional<Split> split_from_string(std::string_view s) {
  for (Split x : {Split::train, Split::val, Split::test})
    if (to_string(x) == s) return x;
  return std::nullopt;
}

/// 80/10/10 split keyed on the unordered pair of part fingerprints.
inline Split split_of(const std::string& fp_a, const std::string& fp_b) {
  const auto [lo, hi] = std::minmax(fp_a, fp_b);
  const auto bucket = fnv1a64(lo + "&" + hi) % 100;
  return bucket < 80 ? Split::train : bucket < 90 ? Split::val : Split::test;
}

using McfPair = std::pair<Mcf, Mcf>;

struct SelectionExample {
  std::string id;
  std::string part_a, part_b;
  std::string face_a, face_b;
  std::vector<McfPair> candidates;
  std::vector<int> positives;  // ascending
  McfPair ground_truth;
  MateType mate_type = MateType::fastened;
  Split split = Split::train;

  bool is_positive(int c) const { return std::binary_search(positives.begin(), positives.end(), c); }
};

inline constexpr int kMaxCandidates = 10000;

struct ExampleStats {
  int mates = 0;
  int non_face_selection = 0;
  int too_many_candidates = 0;
  int no_candidates = 0;
  int no_positives = 0;
  std::array<int, 3> per_split{};

  Json to_json() const {
    return Json{{"mates", mates},
                {"non_face_selection", non_face_selection},
                {"too_many_candidates", too_many_candidates},
                {"no_candidates", no_candidates},
                {"no_positives", no_positives},
                {"train", per_split[0]},
                {"val", per_split[1]},
                {"test", per_split[2]}};
  }
};

struct ExampleSet {
  std::vector<SelectionExample> examples;
  ExampleStats stats;
};

/// Cross product of the two enumerations, a-major.
inline std::vector<McfPair> candidate_pairs(const std::vector<Mcf>& a, const std::vector<Mcf>& b) {
  std::vector<McfPair> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.emplace_back(x, y);
  return out;
}

/// Builds the selection example of one mate on an already normalized pair.
/// Returns nullopt and bumps the matching counter when the example is dropped.
inline std::optional<SelectionExample> make_example(const Part& a, const Part& b, McfPair gt, MateType type,
                                                    ExampleStats& stats, double tol_pos = kDefaultTolPos,
                                                    double tol_ang = kDefaultTolAng,
                                                    int max_candidates = kMaxCandidates) {
  auto is_face = [](const Part& p, const std::string& id) {
    auto r = p.find(id);
    return r && r->tier == Tier::face;
  };
  if (!is_face(a, gt.first.orient_ref) || !is_face(b, gt.second.orient_ref)) {
    ++stats.non_face_selection;
    return std::nullopt;
  }
  gt.first = resolved(a, gt.first);
  gt.second = resolved(b, gt.second);
  const auto ma = enumerate_mcfs(a, gt.first.orient_ref);
  const auto mb = enumerate_mcfs(b, gt.second.orient_ref);
  if (ma.empty() || mb.empty()) {
    ++stats.no_candidates;
    return std::nullopt;
  }
  if (static_cast<long>(ma.size()) * static_cast<long>(mb.size()) > max_candidates) {
    ++stats.too_many_candidates;
    return std::nullopt;
  }
  SelectionExample ex;
  ex.part_a = a.id();
  ex.part_b = b.id();
  ex.face_a = gt.first.orient_ref;
  ex.face_b = gt.second.orient_ref;
  ex.candidates = candidate_pairs(ma, mb);
  ex.mate_type = type;
  const Mat4 gt_pose = align_transform(gt.first.resolved_frame, gt.second.resolved_frame);
  for (std::size_t i = 0; i < ma.size(); ++i) {
    if (!mcfs_equivalent(ma[i].resolved_frame, gt.first.resolved_frame, tol_pos, tol_ang)) continue;
    for (std::size_t j = 0; j < mb.size(); ++j) {
      if (!mcfs_equivalent(mb[j].resolved_frame, gt.second.resolved_frame, tol_pos, tol_ang)) continue;
      const Mat4 pose = align_transform(ma[i].resolved_frame, mb[j].resolved_frame);
      if ((pose - gt_pose).cwiseAbs().maxCoeff() > 10 * (tol_pos + tol_ang))
        throw std::logic_error("equivalent candidate does not reproduce the ground-truth pose");
      ex.positives.push_back(static_cast<int>(i * mb.size() + j));
    }
  }
  if (ex.positives.empty()) {
    ++stats.no_positives;
    return std::nullopt;
  }
  ex.ground_truth = std::move(gt);
  return ex;
}

/// One selection example per unique mate. Frames are resolved on the
/// normalized pair, so tolerances are in normalized units.
inline ExampleSet build_examples(const DedupResult& d, double tol_pos = kDefaultTolPos,
                                 double tol_ang = kDefaultTolAng, int max_candidates = kMaxCandidates) {
  ExampleSet out;
  std::map<std::string, const Assembly*> by_id;
  for (const auto& a : d.corpus.assemblies) by_id[a.id] = &a;
  for (const MateRecord& rec : d.mates) {
    ++out.stats.mates;
    const Mate& m = by_id.at(rec.assembly)->mates[rec.mate];
    const NormalizedPair n = normalize_pair(d.corpus.parts.at(rec.part_a), d.corpus.parts.at(rec.part_b));
    auto ex = make_example(n.a, n.b, {m.mcf_a, m.mcf_b}, m.mate_type, out.stats, tol_pos, tol_ang, max_candidates);
    if (!ex) continue;
    ex->id = rec.assembly + "/" + std::to_string(rec.mate);
    ex->split = split_of(d.fingerprints.at(rec.part_a), d.fingerprints.at(rec.part_b));
    ++out.stats.per_split[static_cast<int>(ex->split)];
    out.examples.push_back(std::move(*ex));
  }
  return out;
}

inline Json mcf_ref_array(const Mcf& m) {
  return Json::array({m.origin_ref, std::string(to_string(m.origin_type)), m.orient_ref});
}

inline Mcf mcf_from_array(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw BrepError(BrepError::Category::schema, "", "MCF reference must be a triple");
  Mcf m;
  m.origin_ref = j[0].get<std::string>();
  auto t = origin_type_from_string(j[1].get<std::string>());
  if (!t) throw BrepError(BrepError::Category::schema, m.origin_ref, "unknown origin type");
  m.origin_type = *t;
  m.orient_ref = j[2].get<std::string>();
  return m;
}

inline Json example_to_json(const SelectionExample& ex) {
  Json cands = Json::array();
  for (const auto& [a, b] : ex.candidates) cands.push_back(Json::array({mcf_ref_array(a), mcf_ref_array(b)}));
  return Json{{"id", ex.id},
              {"part_a", ex.part_a},
              {"part_b", ex.part_b},
              {"face_a", ex.face_a},
              {"face_b", ex.face_b},
              {"mate_type", std::string(to_string(ex.mate_type))},
              {"split", std::string(to_string(ex.split))},
              {"ground_truth", Json::array({mcf_ref_array(ex.ground_truth.first), mcf_ref_array(ex.ground_truth.second)})},
              {"positives", ex.positives},
              {"candidates", cands}};
}

inline SelectionExample example_from_json(const Json& j) {
  SelectionExample ex;
  try {
    ex.id = j.at("id").get<std::string>();
    ex.part_a = j.at("part_a").get<std::string>();
    ex.part_b = j.at("part_b").get<std::string>();
    ex.face_a = j.at("face_a").get<std::string>();
    ex.face_b = j.at("face_b").get<std::string>();
    auto t = mate_type_from_string(j.at("mate_type").get<std::string>());
    auto s = split_from_string(j.at("split").get<std::string>());
    if (!t || !s) throw BrepError(BrepError::Category::schema, ex.id, "bad mate type or split");
    ex.mate_type = *t;
    ex.split = *s;
    const Json& gt = j.at("ground_truth");
    ex.ground_truth = {mcf_from_array(gt.at(0)), mcf_from_array(gt.at(1))};
    ex.positives = j.at("positives").get<std::vector<int>>();
    for (const Json& c : j.at("candidates")) ex.candidates.emplace_back(mcf_from_array(c.at(0)), mcf_from_array(c.at(1)));
  } catch (const Json::exception& e) {
    throw BrepError(BrepError::Category::schema, ex.id, e.what());
  }
  const int n = static_cast<int>(ex.candidates.size());
  if (ex.positives.empty() || n > kMaxCandidates)
    throw BrepError(BrepError::Category::integrity, ex.id, "example violates candidate/positive bounds");
  for (int p : ex.positives)
    if (p < 0 || p >= n) throw BrepError(BrepError::Category::integrity, ex.id, "positive index out of range");
  return ex;
}

}  // namespace automate::dataset
