#pragma once

// Mating coordinate frames: origin types, frame resolution, enumeration
// around a selected face, frame equivalence and mate alignment.

#include "automate/brep.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace automate {

enum class OriginType : int {
  center,
  centroid,
  mid_point,
  point,
  top_axis_point,
  mid_axis_point,
  bottom_axis_point,
};

inline constexpr int kOriginTypeCount = 7;

inline constexpr std::array<std::string_view, kOriginTypeCount> kOriginTypeNames = {
    "center", "centroid", "mid_point", "point", "top_axis_point", "mid_axis_point", "bottom_axis_point"};

inline std::string_view to_string(OriginType t) { return kOriginTypeNames[static_cast<int>(t)]; }

inline std::optional<OriginType> origin_type_from_string(std::string_view s) {
  for (int i = 0; i < kOriginTypeCount; ++i)
    if (kOriginTypeNames[i] == s) return static_cast<OriginType>(i);
  return std::nullopt;
}

enum class MateType : int { fastened, revolute, planar, slider, cylindrical, parallel, ball, pin_slot };

inline constexpr int kMateTypeCount = 8;

inline constexpr std::array<std::string_view, kMateTypeCount> kMateTypeNames = {
    "fastened", "revolute", "planar", "slider", "cylindrical", "parallel", "ball", "pin_slot"};

inline std::string_view to_string(MateType t) { return kMateTypeNames[static_cast<int>(t)]; }

inline std::optional<MateType> mate_type_from_string(std::string_view s) {
  for (int i = 0; i < kMateTypeCount; ++i)
    if (kMateTypeNames[i] == s) return static_cast<MateType>(i);
  return std::nullopt;
}

/// Degrees of freedom left by each mate type, relative to the mated frames.
/// Descriptive only; nothing solves kinematics from it.
inline std::string_view dof_note(MateType t) {
  static constexpr std::array<std::string_view, kMateTypeCount> notes = {
      "no relative motion",
      "rotation about z",
      "translation in x and y, rotation about z",
      "translation along z",
      "translation along and rotation about z",
      "translation in x, y and z, rotation about z",
      "rotation about x, y and z",
      "translation along x, rotation about z"};
  return notes[static_cast<int>(t)];
}

/// Default equivalence tolerances, in normalized part units and radians.
inline constexpr double kDefaultTolPos = 1e-6;
inline constexpr double kDefaultTolAng = 1e-6;

struct Mcf {
  std::string origin_ref;
  OriginType origin_type = OriginType::centroid;
  std::string orient_ref;
  Frame resolved_frame;

  bool same_reference(const Mcf& o) const {
    return origin_ref == o.origin_ref && origin_type == o.origin_type && orient_ref == o.orient_ref;
  }
};

/// Whether `type` may be anchored on an entity of kind `kind`. Loop centers
/// are only defined for inner loops of planar faces.
inline bool origin_type_applies(OriginType type, FunctionKind kind, bool loop_of_plane = true) {
  using K = FunctionKind;
  switch (type) {
    case OriginType::center:
      return kind == K::circle || kind == K::ellipse || (kind == K::inner_loop && loop_of_plane);
    case OriginType::centroid: return kind == K::plane;
    case OriginType::mid_point: return kind == K::line;
    case OriginType::point: return kind == K::point || kind == K::cone;
    case OriginType::top_axis_point:
    case OriginType::mid_axis_point:
    case OriginType::bottom_axis_point:
      return kind == K::cylinder || kind == K::torus || kind == K::cone || kind == K::spun;
  }
  return false;
}

namespace detail {

inline bool loop_on_plane(const Part& part, int loop) {
  return part.faces()[part.face_of_loop(loop)].function.kind == FunctionKind::plane;
}

inline bool origin_type_applies_to(const Part& part, EntityRef r, OriginType type) {
  const Entity& e = part.entity(r);
  const bool on_plane = r.tier != Tier::loop || loop_on_plane(part, r.index);
  if (!origin_type_applies(type, e.function.kind, on_plane)) return false;
  // Axis-based origins need an axis; spun surfaces may omit it.
  if (type >= OriginType::top_axis_point && !e.function.has_axis()) return false;
  return true;
}

[[noreturn]] inline void unsupported(const std::string& id, const std::string& why) {
  throw BrepError(BrepError::Category::unsupported, id, why);
}

inline Vec3 vertex_position(const Part& part, int v) { return part.vertices()[v].function.position(); }

}  // namespace detail

/// Whether `kind` can supply an MCF z-axis when used as an orientation reference.
inline bool supports_orientation(const Part& part, EntityRef r) {
  const Entity& e = part.entity(r);
  switch (e.function.kind) {
    case FunctionKind::plane:
    case FunctionKind::cylinder:
    case FunctionKind::cone:
    case FunctionKind::torus:
    case FunctionKind::line:
    case FunctionKind::circle:
    case FunctionKind::ellipse:
    case FunctionKind::point: return true;
    case FunctionKind::spun: return e.function.has_axis();
    case FunctionKind::inner_loop: return detail::loop_on_plane(part, r.index);
    default: return false;
  }
}

/// z-axis contributed by an orientation reference.
inline Vec3 resolve_z_axis(const Part& part, const std::string& orient_ref) {
  const EntityRef r = part.require(orient_ref);
  const Entity& e = part.entity(r);
  if (!supports_orientation(part, r))
    detail::unsupported(orient_ref, std::string(to_string(e.function.kind)) + " cannot orient a frame");
  switch (e.function.kind) {
    case FunctionKind::inner_loop:
      return part.faces()[part.face_of_loop(r.index)].function.direction();
    case FunctionKind::circle:
    case FunctionKind::ellipse:
      for (int f : part.faces_of_edge(r.index)) {
        const auto& face = part.faces()[f].function;
        if (face.kind == FunctionKind::plane) return face.direction();
      }
      return e.function.direction();
    case FunctionKind::point: return part.part_frame().z;
    default: return e.function.direction();
  }
}

namespace detail {

/// Axial extent (min, max) of a face's boundary geometry along its axis,
/// measured from the function origin.
inline std::pair<double, double> axial_extent(const Part& part, int face) {
  const auto& fn = part.faces()[face].function;
  const Vec3 axis = fn.direction();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  auto take = [&](const Vec3& p) {
    const double t = (p - fn.origin).dot(axis);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  };
  for (int l : part.loops_of_face(face))
    for (int e : part.edges_of_loop(l)) {
      take(part.edges()[e].summary.center_of_mass);
      for (int v : part.vertices_of_edge(e)) take(vertex_position(part, v));
    }
  if (!std::isfinite(lo)) unsupported(part.faces()[face].id, "face has no boundary geometry");
  return {lo, hi};
}

inline Vec3 resolve_origin(const Part& part, EntityRef r, OriginType type) {
  const Entity& e = part.entity(r);
  if (!origin_type_applies_to(part, r, type))
    unsupported(e.id, std::string(to_string(type)) + " does not apply to " +
                          std::string(to_string(e.function.kind)));
  switch (type) {
    case OriginType::center: {
      if (r.tier == Tier::edge) return e.function.origin;
      Vec3 acc = Vec3::Zero();
      double weight = 0.0;
      const auto& edges = part.edges_of_loop(r.index);
      for (int ed : edges) {
        acc += part.edges()[ed].summary.size * part.edges()[ed].summary.center_of_mass;
        weight += part.edges()[ed].summary.size;
      }
      if (weight > 0.0) return acc / weight;
      acc.setZero();
      for (int ed : edges) acc += part.edges()[ed].summary.center_of_mass;
      return acc / static_cast<double>(edges.size());
    }
    case OriginType::centroid: return e.summary.center_of_mass;
    case OriginType::mid_point: {
      const auto& vs = part.vertices_of_edge(r.index);
      if (vs.size() == 2) return 0.5 * (vertex_position(part, vs[0]) + vertex_position(part, vs[1]));
      return e.summary.center_of_mass;
    }
    case OriginType::point:
      return e.function.kind == FunctionKind::point ? e.function.position() : e.function.origin;
    case OriginType::top_axis_point:
    case OriginType::mid_axis_point:
    case OriginType::bottom_axis_point: {
      const auto [lo, hi] = axial_extent(part, r.index);
      const double t = type == OriginType::top_axis_point      ? hi
                       : type == OriginType::bottom_axis_point ? lo
                                                               : 0.5 * (lo + hi);
      return e.function.origin + t * e.function.direction();
    }
  }
  return Vec3::Zero();
}

}  // namespace detail

/// Completes a frame from an origin and z-axis using the part's modeling
/// axes: y = z × x_part (or z × y_part when z is parallel to x_part), x = y × z.
inline Frame frame_from_axis(const Part& part, const Vec3& origin, const Vec3& z_axis,
                             const std::string& context = {}) {
  const double zn = z_axis.norm();
  if (!(zn > 1e-12)) detail::unsupported(context, "degenerate z-axis");
  const Vec3 z = z_axis / zn;
  const auto& pf = part.part_frame();
  Vec3 y = std::abs(z.dot(pf.x)) > 1.0 - 1e-9 ? z.cross(pf.y) : z.cross(pf.x);
  const double yn = y.norm();
  if (!(yn > 1e-12)) detail::unsupported(context, "degenerate frame");
  y /= yn;
  Frame f;
  f.origin = origin;
  f.z = z;
  f.y = y;
  f.x = y.cross(z).normalized();
  return f;
}

inline Frame resolve_frame(const Part& part, const Mcf& mcf) {
  const EntityRef origin = part.require(mcf.origin_ref);
  const Vec3 o = detail::resolve_origin(part, origin, mcf.origin_type);
  return frame_from_axis(part, o, resolve_z_axis(part, mcf.orient_ref), mcf.origin_ref);
}

/// Resolves a reference-only MCF in place and returns it.
inline Mcf resolved(const Part& part, Mcf mcf) {
  mcf.resolved_frame = resolve_frame(part, mcf);
  return mcf;
}

/// All MCFs oriented by `selected_face` whose origin lies on the face or its
/// boundary (loops, edges, vertices), ordered by entity id then origin type.
/// Faces that cannot supply a z-axis yield an empty list; callers that need
/// a non-empty set must check for it.
inline std::vector<Mcf> enumerate_mcfs(const Part& part, const std::string& selected_face) {
  const EntityRef face = part.require(selected_face);
  if (face.tier != Tier::face)
    throw BrepError(BrepError::Category::integrity, selected_face, "selection is not a face");
  if (!supports_orientation(part, face)) return {};

  std::vector<EntityRef> candidates{face};
  auto add = [&](EntityRef r) {
    if (std::find(candidates.begin(), candidates.end(), r) == candidates.end()) candidates.push_back(r);
  };
  for (int l : part.loops_of_face(face.index)) {
    add({Tier::loop, l});
    for (int e : part.edges_of_loop(l)) {
      add({Tier::edge, e});
      for (int v : part.vertices_of_edge(e)) add({Tier::vertex, v});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [&](EntityRef a, EntityRef b) {
    return part.entity(a).id < part.entity(b).id;
  });

  const Vec3 z = resolve_z_axis(part, selected_face);
  std::vector<Mcf> out;
  for (EntityRef r : candidates) {
    for (int t = 0; t < kOriginTypeCount; ++t) {
      const auto type = static_cast<OriginType>(t);
      if (!detail::origin_type_applies_to(part, r, type)) continue;
      Mcf m;
      m.origin_ref = part.entity(r).id;
      m.origin_type = type;
      m.orient_ref = selected_face;
      m.resolved_frame = frame_from_axis(part, detail::resolve_origin(part, r, type), z, m.origin_ref);
      out.push_back(std::move(m));
    }
  }
  return out;
}

/// Rotation angle between two orientations, stable near zero:
/// ||R1 - R2||_F = 2√2 sin(θ/2).
inline double rotation_angle_between(const Frame& a, const Frame& b) {
  const double d = (a.rotation() - b.rotation()).norm();
  return 2.0 * std::asin(std::min(1.0, d / (2.0 * std::sqrt(2.0))));
}

inline bool mcfs_equivalent(const Frame& a, const Frame& b, double tol_pos = kDefaultTolPos,
                            double tol_ang = kDefaultTolAng) {
  return (a.origin - b.origin).norm() <= tol_pos && rotation_angle_between(a, b) <= tol_ang;
}

/// Transform T with T · M_b = M_a: applied to part b, it brings frame_b onto frame_a.
inline Mat4 align_transform(const Frame& frame_a, const Frame& frame_b) {
  return frame_a.matrix() * rigid_inverse(frame_b.matrix());
}

}  // namespace automate
