#pragma once

// Portable boundary-representation data model: typed topological entities
// (faces, loops, edges, vertices) carrying analytic function parameters and
// precomputed geometric summaries.

#include "automate/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace automate {

class BrepError : public std::runtime_error {
 public:
  enum class Category { syntax, schema, integrity, unsupported };

  BrepError(Category category, std::string entity, const std::string& reason)
      : std::runtime_error(describe(category, entity, reason)),
        category_(category),
        entity_(std::move(entity)) {}

  Category category() const { return category_; }
  const std::string& entity() const { return entity_; }

 private:
  static std::string describe(Category c, const std::string& entity, const std::string& reason) {
    static constexpr std::array<const char*, 4> names = {"syntax error", "schema error",
                                                         "integrity error", "unsupported"};
    std::string msg = names[static_cast<int>(c)];
    if (!entity.empty()) msg += " at '" + entity + "'";
    return msg + ": " + reason;
  }

  Category category_;
  std::string entity_;
};

enum class FunctionKind : int {
  plane,
  cylinder,
  cone,
  torus,
  bsurf,
  swept,
  spun,
  blend,
  outer_loop,
  inner_loop,
  line,
  circle,
  ellipse,
  bcurve,
  icurve,
  spcurve,
  tcurve,
  pline,
  point,
};

inline constexpr int kFunctionKindCount = 19;

inline constexpr std::array<std::string_view, kFunctionKindCount> kFunctionKindNames = {
    "plane",     "cylinder", "cone",   "torus",   "bsurf",  "swept",   "spun",
    "blend",     "outer_loop", "inner_loop", "line", "circle", "ellipse", "bcurve",
    "icurve",    "spcurve",  "tcurve", "pline",   "point"};

inline std::string_view to_string(FunctionKind k) { return kFunctionKindNames[static_cast<int>(k)]; }

inline std::optional<FunctionKind> function_kind_from_string(std::string_view s) {
  for (int i = 0; i < kFunctionKindCount; ++i)
    if (kFunctionKindNames[i] == s) return static_cast<FunctionKind>(i);
  return std::nullopt;
}

enum class Tier : int { face, loop, edge, vertex };

inline std::string_view to_string(Tier t) {
  static constexpr std::array<std::string_view, 4> names = {"face", "loop", "edge", "vertex"};
  return names[static_cast<int>(t)];
}

inline Tier tier_of(FunctionKind k) {
  const int i = static_cast<int>(k);
  if (i <= static_cast<int>(FunctionKind::blend)) return Tier::face;
  if (i <= static_cast<int>(FunctionKind::inner_loop)) return Tier::loop;
  if (i <= static_cast<int>(FunctionKind::pline)) return Tier::edge;
  return Tier::vertex;
}

/// Topological dimension of an entity tier (loops count as curves).
inline int tier_dimension(Tier t) {
  switch (t) {
    case Tier::face: return 2;
    case Tier::loop:
    case Tier::edge: return 1;
    case Tier::vertex: return 0;
  }
  return 0;
}

/// Packed parameter arity per kind. Spun surfaces may optionally carry an
/// axis (used for frame resolution only); every other kind is fixed.
inline int parameter_arity(FunctionKind k) {
  switch (k) {
    case FunctionKind::plane: return 3;
    case FunctionKind::cylinder: return 4;
    case FunctionKind::cone: return 4;
    case FunctionKind::torus: return 5;
    case FunctionKind::line: return 3;
    case FunctionKind::circle: return 4;
    case FunctionKind::ellipse: return 8;
    case FunctionKind::point: return 3;
    default: return 0;
  }
}

/// Analytic function attached to an entity. Parameters are packed in a fixed
/// order per kind:
///   plane     normal(3)
///   cylinder  axis(3) radius
///   cone      axis(3) half_angle          (origin is the apex)
///   torus     axis(3) major minor
///   line      direction(3)
///   circle    normal(3) radius            (origin is the center)
///   ellipse   normal(3) major_dir(3) major minor
///   point     position(3)
///   spun      [axis(3)]
struct ParametricFunction {
  FunctionKind kind = FunctionKind::plane;
  std::vector<double> parameters;
  Vec3 origin = Vec3::Zero();

  /// Leading direction parameter (normal, axis or direction).
  Vec3 direction() const { return {parameters.at(0), parameters.at(1), parameters.at(2)}; }
  double radius() const { return parameters.at(3); }
  double half_angle() const { return parameters.at(3); }
  double major_radius() const {
    return kind == FunctionKind::ellipse ? parameters.at(6) : parameters.at(3);
  }
  double minor_radius() const {
    return kind == FunctionKind::ellipse ? parameters.at(7) : parameters.at(4);
  }
  Vec3 major_direction() const { return {parameters.at(3), parameters.at(4), parameters.at(5)}; }
  Vec3 position() const { return direction(); }

  bool has_axis() const {
    switch (kind) {
      case FunctionKind::cylinder:
      case FunctionKind::cone:
      case FunctionKind::torus: return true;
      case FunctionKind::spun: return parameters.size() == 3;
      default: return false;
    }
  }

  bool operator==(const ParametricFunction&) const = default;
};

struct GeometricSummary {
  Vec3 center_of_mass = Vec3::Zero();
  Vec3 aabb_min = Vec3::Zero();
  Vec3 aabb_max = Vec3::Zero();
  double size = 0.0;
  /// About center_of_mass, packed (xx, xy, xz, yy, yz, zz).
  SymTensor inertia{};

  bool operator==(const GeometricSummary& o) const {
    return center_of_mass == o.center_of_mass && aabb_min == o.aabb_min &&
           aabb_max == o.aabb_max && size == o.size && inertia == o.inertia;
  }
};

/// One topological entity. `refs` holds the boundary references: bounding
/// vertices for edges, ordered member edges for loops, loops for faces.
struct Entity {
  std::string id;
  ParametricFunction function;
  GeometricSummary summary;
  std::vector<std::string> refs;

  bool operator==(const Entity&) const = default;
};

/// Unvalidated part contents, as produced by a parser or generator.
struct PartData {
  std::string id;
  Frame part_frame;
  std::vector<Entity> vertices;
  std::vector<Entity> edges;
  std::vector<Entity> loops;
  std::vector<Entity> faces;

  std::vector<Entity>& tier(Tier t) {
    switch (t) {
      case Tier::face: return faces;
      case Tier::loop: return loops;
      case Tier::edge: return edges;
      case Tier::vertex: return vertices;
    }
    return faces;
  }
  const std::vector<Entity>& tier(Tier t) const { return const_cast<PartData*>(this)->tier(t); }
};

struct EntityRef {
  Tier tier;
  int index;
  bool operator==(const EntityRef&) const = default;
};

namespace detail {

inline void check_function(const Entity& e) {
  using C = BrepError::Category;
  const auto& f = e.function;
  const int arity = parameter_arity(f.kind);
  const auto n = static_cast<int>(f.parameters.size());
  const bool arity_ok = f.kind == FunctionKind::spun ? (n == 0 || n == 3) : n == arity;
  if (!arity_ok)
    throw BrepError(C::schema, e.id,
                    std::string(to_string(f.kind)) + " expects " + std::to_string(arity) +
                        " parameters, got " + std::to_string(n));
  for (double p : f.parameters)
    if (!std::isfinite(p)) throw BrepError(C::integrity, e.id, "non-finite parameter");
  if (!f.origin.allFinite()) throw BrepError(C::integrity, e.id, "non-finite origin");

  auto require_unit = [&](const Vec3& v, const char* what) {
    if (!is_unit(v)) throw BrepError(C::integrity, e.id, std::string(what) + " is not unit length");
  };
  auto require_positive = [&](double v, const char* what) {
    if (!(v > 0.0)) throw BrepError(C::integrity, e.id, std::string(what) + " must be positive");
  };
  switch (f.kind) {
    case FunctionKind::plane: require_unit(f.direction(), "normal"); break;
    case FunctionKind::cylinder:
      require_unit(f.direction(), "axis");
      require_positive(f.radius(), "radius");
      break;
    case FunctionKind::cone:
      require_unit(f.direction(), "axis");
      if (!(f.half_angle() > 0.0 && f.half_angle() < std::numbers::pi / 2))
        throw BrepError(C::integrity, e.id, "half_angle must lie in (0, pi/2)");
      break;
    case FunctionKind::torus:
      require_unit(f.direction(), "axis");
      require_positive(f.minor_radius(), "minor_radius");
      if (!(f.major_radius() > f.minor_radius()))
        throw BrepError(C::integrity, e.id, "major_radius must exceed minor_radius");
      break;
    case FunctionKind::line: require_unit(f.direction(), "direction"); break;
    case FunctionKind::circle:
      require_unit(f.direction(), "normal");
      require_positive(f.radius(), "radius");
      break;
    case FunctionKind::ellipse:
      require_unit(f.direction(), "normal");
      require_unit(f.major_direction(), "major_direction");
      if (std::abs(f.direction().dot(f.major_direction())) > 1e-9)
        throw BrepError(C::integrity, e.id, "major_direction not perpendicular to normal");
      require_positive(f.minor_radius(), "minor_radius");
      if (!(f.major_radius() >= f.minor_radius()))
        throw BrepError(C::integrity, e.id, "major_radius must be at least minor_radius");
      break;
    case FunctionKind::spun:
      if (n == 3) require_unit(f.direction(), "axis");
      break;
    default: break;
  }
}

inline void check_summary(const Entity& e) {
  using C = BrepError::Category;
  const auto& s = e.summary;
  bool finite = s.center_of_mass.allFinite() && s.aabb_min.allFinite() && s.aabb_max.allFinite() &&
                std::isfinite(s.size);
  for (double v : s.inertia) finite = finite && std::isfinite(v);
  if (!finite) throw BrepError(C::integrity, e.id, "non-finite summary");
  if ((s.aabb_min.array() > s.aabb_max.array()).any())
    throw BrepError(C::integrity, e.id, "aabb min exceeds max");
  if (s.size < 0.0) throw BrepError(C::integrity, e.id, "negative size");
  if (s.inertia[0] < 0.0 || s.inertia[3] < 0.0 || s.inertia[5] < 0.0)
    throw BrepError(C::integrity, e.id, "negative inertia diagonal");
}

}  // namespace detail

/// A validated, immutable part. Entity declaration order is preserved;
/// equality is order-independent.
class Part {
 public:
  /// Validates `data` and builds the lookup indices. Throws BrepError.
  static Part from_data(PartData data) {
    Part p;
    p.data_ = std::move(data);
    p.index_and_validate();
    return p;
  }

  const std::string& id() const { return data_.id; }
  const Frame& part_frame() const { return data_.part_frame; }
  const std::vector<Entity>& faces() const { return data_.faces; }
  const std::vector<Entity>& loops() const { return data_.loops; }
  const std::vector<Entity>& edges() const { return data_.edges; }
  const std::vector<Entity>& vertices() const { return data_.vertices; }
  const std::vector<Entity>& tier(Tier t) const { return data_.tier(t); }
  const PartData& data() const { return data_; }

  std::optional<EntityRef> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const Entity& entity(EntityRef r) const { return data_.tier(r.tier)[r.index]; }

  /// Throws BrepError(integrity) naming the id when missing.
  EntityRef require(std::string_view id) const {
    auto r = find(id);
    if (!r) throw BrepError(BrepError::Category::integrity, std::string(id), "unknown entity");
    return *r;
  }

  int face_of_loop(int loop) const { return loop_owner_[loop]; }
  const std::vector<int>& loops_of_edge(int edge) const { return edge_loops_[edge]; }
  const std::vector<int>& loops_of_face(int face) const { return face_loops_[face]; }
  const std::vector<int>& edges_of_loop(int loop) const { return loop_edges_[loop]; }
  const std::vector<int>& vertices_of_edge(int edge) const { return edge_vertices_[edge]; }

  /// Faces whose loops contain the edge, ascending, without repeats.
  std::vector<int> faces_of_edge(int edge) const {
    std::vector<int> out;
    for (int l : edge_loops_[edge]) out.push_back(loop_owner_[l]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::size_t entity_count() const {
    return data_.faces.size() + data_.loops.size() + data_.edges.size() + data_.vertices.size();
  }

  friend bool operator==(const Part& a, const Part& b) {
    if (a.data_.id != b.data_.id || !(a.data_.part_frame == b.data_.part_frame)) return false;
    for (Tier t : {Tier::face, Tier::loop, Tier::edge, Tier::vertex}) {
      auto x = a.data_.tier(t);
      auto y = b.data_.tier(t);
      if (x.size() != y.size()) return false;
      auto by_id = [](const Entity& l, const Entity& r) { return l.id < r.id; };
      std::sort(x.begin(), x.end(), by_id);
      std::sort(y.begin(), y.end(), by_id);
      if (x != y) return false;
    }
    return true;
  }

 private:
  Part() = default;

  void index_and_validate() {
    using C = BrepError::Category;
    const auto& f = data_.part_frame;
    if (!f.origin.allFinite() || !f.is_orthonormal(1e-9) || !f.is_right_handed(1e-9))
      throw BrepError(C::integrity, data_.id, "part_frame is not orthonormal right-handed");
    if (data_.id.empty()) throw BrepError(C::schema, "", "part id is empty");

    for (Tier t : {Tier::vertex, Tier::edge, Tier::loop, Tier::face}) {
      const auto& list = data_.tier(t);
      for (int i = 0; i < static_cast<int>(list.size()); ++i) {
        const Entity& e = list[i];
        if (e.id.empty()) throw BrepError(C::integrity, "", "empty entity id in " + std::string(to_string(t)) + "s");
        if (!index_.emplace(e.id, EntityRef{t, i}).second)
          throw BrepError(C::integrity, e.id, "duplicate entity id");
        if (tier_of(e.function.kind) != t)
          throw BrepError(C::integrity, e.id,
                          std::string(to_string(e.function.kind)) + " is not a " +
                              std::string(to_string(t)) + " function");
        detail::check_function(e);
        detail::check_summary(e);
      }
    }

    auto resolve = [&](const Entity& owner, const std::string& ref, Tier expected) {
      auto it = index_.find(ref);
      if (it == index_.end())
        throw BrepError(C::integrity, ref, "referenced by '" + owner.id + "' but not defined");
      if (it->second.tier != expected)
        throw BrepError(C::integrity, ref,
                        "referenced by '" + owner.id + "' but is not a " + std::string(to_string(expected)));
      return it->second.index;
    };

    edge_vertices_.assign(data_.edges.size(), {});
    edge_loops_.assign(data_.edges.size(), {});
    for (int i = 0; i < static_cast<int>(data_.edges.size()); ++i) {
      const Entity& e = data_.edges[i];
      if (e.refs.size() > 2) throw BrepError(C::integrity, e.id, "edge has more than two vertices");
      for (const auto& r : e.refs) edge_vertices_[i].push_back(resolve(e, r, Tier::vertex));
    }

    loop_edges_.assign(data_.loops.size(), {});
    for (int i = 0; i < static_cast<int>(data_.loops.size()); ++i) {
      const Entity& l = data_.loops[i];
      if (l.refs.empty()) throw BrepError(C::integrity, l.id, "loop has no edges");
      for (const auto& r : l.refs) {
        const int e = resolve(l, r, Tier::edge);
        loop_edges_[i].push_back(e);
        auto& owners = edge_loops_[e];
        if (std::find(owners.begin(), owners.end(), i) == owners.end()) owners.push_back(i);
      }
    }

    loop_owner_.assign(data_.loops.size(), -1);
    face_loops_.assign(data_.faces.size(), {});
    for (int i = 0; i < static_cast<int>(data_.faces.size()); ++i) {
      const Entity& face = data_.faces[i];
      int outer = 0;
      for (const auto& r : face.refs) {
        const int l = resolve(face, r, Tier::loop);
        if (loop_owner_[l] != -1)
          throw BrepError(C::integrity, r, "loop belongs to more than one face");
        loop_owner_[l] = i;
        face_loops_[i].push_back(l);
        if (data_.loops[l].function.kind == FunctionKind::outer_loop) ++outer;
      }
      if (outer != 1)
        throw BrepError(C::integrity, face.id,
                        "face must have exactly one outer loop, found " + std::to_string(outer));
    }
    for (int l = 0; l < static_cast<int>(data_.loops.size()); ++l)
      if (loop_owner_[l] == -1)
        throw BrepError(C::integrity, data_.loops[l].id, "loop does not belong to any face");
  }

  PartData data_;
  std::unordered_map<std::string, EntityRef> index_;
  std::vector<int> loop_owner_;
  std::vector<std::vector<int>> edge_loops_;
  std::vector<std::vector<int>> face_loops_;
  std::vector<std::vector<int>> loop_edges_;
  std::vector<std::vector<int>> edge_vertices_;
};

}  // namespace automate
