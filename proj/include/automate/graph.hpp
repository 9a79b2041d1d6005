#pragma once

// Structured BREP graph: four node tiers (faces, loops, edges, vertices),
// directed boundary relations between adjacent tiers plus their transposes,
// undirected face-face meta-relations, and per-node input features.

#include "automate/brep_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace automate {

/// Node feature layout:
///   [0, 19)   one-hot function kind
///   [19, 27)  fixed-arity parameters, zero padded (origins excluded)
///   [27, 30)  center of mass
///   [30, 36)  aabb min, max
///   [36]      size (area / arc length)
///   [37, 43)  inertia (xx, xy, xz, yy, yz, zz)
namespace features {
inline constexpr int kOneHot = 0;
inline constexpr int kParams = 19;
inline constexpr int kParamSlots = 8;
inline constexpr int kCenterOfMass = 27;
inline constexpr int kAabb = 30;
inline constexpr int kSize = 36;
inline constexpr int kInertia = 37;
inline constexpr int kDim = 43;
inline constexpr int kFnTypeDim = 19;
}  // namespace features

using Relation = std::pair<int, int>;  // (source node, destination node), tier-local indices

struct StructuredBrepGraph {
  /// Node ids per tier, indexed by static_cast<int>(Tier).
  std::array<std::vector<std::string>, 4> ids;
  std::vector<Relation> vertex_edge, edge_loop, loop_face;
  std::vector<Relation> face_loop, loop_edge, edge_vertex;
  /// Undirected, stored once per pair with first < second.
  std::vector<Relation> face_face;
  /// Row-major node features per tier (rows × features::kDim).
  std::array<std::vector<double>, 4> features;

  int count(Tier t) const { return static_cast<int>(ids[static_cast<int>(t)].size()); }
  int node_count() const { return count(Tier::face) + count(Tier::loop) + count(Tier::edge) + count(Tier::vertex); }
  const double* feature_row(Tier t, int i) const {
    return features[static_cast<int>(t)].data() + static_cast<std::size_t>(i) * features::kDim;
  }
};

namespace detail {

inline int param_feature_count(FunctionKind k) {
  switch (k) {
    case FunctionKind::plane:
    case FunctionKind::cylinder:
    case FunctionKind::cone:
    case FunctionKind::torus:
    case FunctionKind::line:
    case FunctionKind::circle:
    case FunctionKind::ellipse: return parameter_arity(k);
    default: return 0;  // variable-size, derived, loops, and points (origin only)
  }
}

/// Uniform similarity p -> scale * (p - shift) applied to every geometric
/// quantity. Summaries scale by entity dimension d: size by s^d and the
/// second moments by s^(d+2).
inline PartData similarity(const Part& part, double scale, const Vec3& shift) {
  PartData d = part.data();
  auto move_point = [&](const Vec3& p) -> Vec3 { return scale * (p - shift); };
  d.part_frame.origin = move_point(d.part_frame.origin);
  for (Tier t : {Tier::face, Tier::loop, Tier::edge, Tier::vertex}) {
    const int dim = tier_dimension(t);
    for (Entity& e : d.tier(t)) {
      auto& f = e.function;
      f.origin = move_point(f.origin);
      auto& p = f.parameters;
      switch (f.kind) {
        case FunctionKind::cylinder:
        case FunctionKind::circle: p[3] *= scale; break;
        case FunctionKind::torus:
          p[3] *= scale;
          p[4] *= scale;
          break;
        case FunctionKind::ellipse:
          p[6] *= scale;
          p[7] *= scale;
          break;
        case FunctionKind::point: {
          const Vec3 q = move_point(f.position());
          p = {q.x(), q.y(), q.z()};
          break;
        }
        default: break;
      }
      auto& s = e.summary;
      s.center_of_mass = move_point(s.center_of_mass);
      Vec3 lo = move_point(s.aabb_min), hi = move_point(s.aabb_max);
      s.aabb_min = lo.cwiseMin(hi);
      s.aabb_max = lo.cwiseMax(hi);
      s.size *= std::pow(scale, dim);
      const double k = std::pow(scale, dim + 2);
      for (double& v : s.inertia) v *= k;
    }
  }
  return d;
}

}  // namespace detail

/// Largest side of the part's axis-aligned bounding box over all entities.
inline double largest_dimension(const Part& part) {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (Tier t : {Tier::face, Tier::loop, Tier::edge, Tier::vertex})
    for (const Entity& e : part.tier(t)) {
      lo = lo.cwiseMin(e.summary.aabb_min);
      hi = hi.cwiseMax(e.summary.aabb_max);
    }
  if (!lo.allFinite()) return 0.0;
  return (hi - lo).maxCoeff();
}

/// Scales a part uniformly about the world origin.
inline Part scale_part(const Part& part, double scale) {
  return Part::from_data(detail::similarity(part, scale, Vec3::Zero()));
}

struct NormalizedPair {
  Part a;
  Part b;
  double scale;
};

/// Moves each part's modeling origin to the world origin and applies one
/// shared scale so the larger part's largest dimension becomes 1.
inline NormalizedPair normalize_pair(const Part& a, const Part& b) {
  const double extent = std::max(largest_dimension(a), largest_dimension(b));
  if (!(extent > 0.0))
    throw BrepError(BrepError::Category::integrity, a.id() + "/" + b.id(), "both parts have zero extent");
  const double s = 1.0 / extent;
  return {Part::from_data(detail::similarity(a, s, a.part_frame().origin)),
          Part::from_data(detail::similarity(b, s, b.part_frame().origin)), s};
}

/// Writes the feature vector of one entity into `out` (kDim values).
inline void featurize_entity(const Entity& e, double* out) {
  std::fill(out, out + features::kDim, 0.0);
  out[features::kOneHot + static_cast<int>(e.function.kind)] = 1.0;
  const int n = detail::param_feature_count(e.function.kind);
  for (int i = 0; i < n; ++i) out[features::kParams + i] = e.function.parameters[i];
  const auto& s = e.summary;
  for (int i = 0; i < 3; ++i) {
    out[features::kCenterOfMass + i] = s.center_of_mass[i];
    out[features::kAabb + i] = s.aabb_min[i];
    out[features::kAabb + 3 + i] = s.aabb_max[i];
  }
  out[features::kSize] = s.size;
  for (int i = 0; i < 6; ++i) out[features::kInertia + i] = s.inertia[i];
}

/// Face-face meta-relations: {f1, f2} whenever an edge lies on loops of both
/// faces (face←loop←edge→loop→face), deduplicated, sorted.
inline std::vector<Relation> meta_paths(int edge_count, const std::vector<Relation>& edge_loop,
                                        const std::vector<Relation>& loop_face) {
  std::vector<std::vector<int>> loops_of_edge(edge_count);
  for (auto [e, l] : edge_loop) loops_of_edge[e].push_back(l);
  std::vector<int> face_of_loop;
  for (auto [l, f] : loop_face) {
    if (l >= static_cast<int>(face_of_loop.size())) face_of_loop.resize(l + 1, -1);
    face_of_loop[l] = f;
  }
  std::set<Relation> pairs;
  for (const auto& loops : loops_of_edge) {
    std::vector<int> faces;
    for (int l : loops)
      if (l < static_cast<int>(face_of_loop.size()) && face_of_loop[l] >= 0) faces.push_back(face_of_loop[l]);
    for (std::size_t i = 0; i < faces.size(); ++i)
      for (std::size_t j = i + 1; j < faces.size(); ++j)
        if (faces[i] != faces[j]) pairs.insert(std::minmax(faces[i], faces[j]));
  }
  return {pairs.begin(), pairs.end()};
}

inline StructuredBrepGraph add_meta_paths(StructuredBrepGraph g) {
  g.face_face = meta_paths(g.count(Tier::edge), g.edge_loop, g.loop_face);
  return g;
}

inline std::vector<Relation> transposed(const std::vector<Relation>& rel) {
  std::vector<Relation> out;
  out.reserve(rel.size());
  for (auto [s, d] : rel) out.emplace_back(d, s);
  std::sort(out.begin(), out.end());
  return out;
}

/// One node per entity (declaration order), relations mirroring the boundary
/// references, features from the part as given. Meta-paths are not added.
inline StructuredBrepGraph build_graph(const Part& part) {
  StructuredBrepGraph g;
  for (Tier t : {Tier::face, Tier::loop, Tier::edge, Tier::vertex}) {
    const auto& list = part.tier(t);
    auto& ids = g.ids[static_cast<int>(t)];
    auto& feat = g.features[static_cast<int>(t)];
    feat.assign(list.size() * features::kDim, 0.0);
    for (std::size_t i = 0; i < list.size(); ++i) {
      ids.push_back(list[i].id);
      featurize_entity(list[i], feat.data() + i * features::kDim);
    }
  }
  std::set<Relation> ve, el, lf;
  for (int e = 0; e < static_cast<int>(part.edges().size()); ++e)
    for (int v : part.vertices_of_edge(e)) ve.insert({v, e});
  for (int l = 0; l < static_cast<int>(part.loops().size()); ++l)
    for (int e : part.edges_of_loop(l)) el.insert({e, l});
  for (int f = 0; f < static_cast<int>(part.faces().size()); ++f)
    for (int l : part.loops_of_face(f)) lf.insert({l, f});
  g.vertex_edge.assign(ve.begin(), ve.end());
  g.edge_loop.assign(el.begin(), el.end());
  g.loop_face.assign(lf.begin(), lf.end());
  g.edge_vertex = transposed(g.vertex_edge);
  g.loop_edge = transposed(g.edge_loop);
  g.face_loop = transposed(g.loop_face);
  return g;
}

/// Graph with meta-paths, ready for the network.
inline StructuredBrepGraph build_full_graph(const Part& part) { return add_meta_paths(build_graph(part)); }

/// Tier-local index of an entity id, or -1.
inline int node_index(const StructuredBrepGraph& g, Tier t, const std::string& id) {
  const auto& ids = g.ids[static_cast<int>(t)];
  auto it = std::find(ids.begin(), ids.end(), id);
  return it == ids.end() ? -1 : static_cast<int>(it - ids.begin());
}

inline Json graph_to_json(const StructuredBrepGraph& g) {
  Json nodes = Json::array();
  for (Tier t : {Tier::face, Tier::loop, Tier::edge, Tier::vertex})
    for (int i = 0; i < g.count(t); ++i) {
      const double* row = g.feature_row(t, i);
      nodes.push_back(Json{{"id", g.ids[static_cast<int>(t)][i]},
                           {"tier", std::string(to_string(t))},
                           {"index", i},
                           {"feature", std::vector<double>(row, row + features::kDim)}});
    }
  auto rel = [](const std::vector<Relation>& r) {
    Json out = Json::array();
    for (auto [s, d] : r) out.push_back(Json::array({s, d}));
    return out;
  };
  return Json{{"nodes", nodes},
              {"relations",
               {{"ve", rel(g.vertex_edge)}, {"el", rel(g.edge_loop)}, {"lf", rel(g.loop_face)}, {"ff", rel(g.face_face)}}}};
}

}  // namespace automate
