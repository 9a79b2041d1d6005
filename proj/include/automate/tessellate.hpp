#pragma once

// Preview tessellation for the analytic surface repertoire used by the
// synthetic parts: planar faces bounded by polygonal / circular loops, and
// full cylinders, cones and tori.

#include "automate/brep_io.hpp"
#include "automate/mcf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace automate {

struct TriangleMesh {
  std::vector<Vec3> positions;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::string> face_of_triangle;
};

namespace detail {

struct P2 {
  double x, y;
};

inline double cross2(const P2& o, const P2& a, const P2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline double signed_area(const std::vector<P2>& pts, const std::vector<int>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const P2& a = pts[poly[i]];
    const P2& b = pts[poly[(i + 1) % poly.size()]];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

inline bool same_point(const P2& a, const P2& b) { return a.x == b.x && a.y == b.y; }

inline bool in_triangle(const P2& p, const P2& a, const P2& b, const P2& c) {
  return cross2(a, b, p) >= 0 && cross2(b, c, p) >= 0 && cross2(c, a, p) >= 0;
}

/// Splices `hole` (clockwise) into `outer` (counter-clockwise) through a
/// mutually visible bridge from the hole's rightmost vertex.
inline void bridge_hole(const std::vector<P2>& pts, std::vector<int>& outer, const std::vector<int>& hole) {
  std::size_t mi = 0;
  for (std::size_t i = 1; i < hole.size(); ++i)
    if (pts[hole[i]].x > pts[hole[mi]].x) mi = i;
  const P2 m = pts[hole[mi]];

  double best_x = std::numeric_limits<double>::infinity();
  std::size_t best_edge = 0;
  bool found = false;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const P2& a = pts[outer[i]];
    const P2& b = pts[outer[(i + 1) % outer.size()]];
    if ((a.y > m.y) == (b.y > m.y)) continue;
    const double x = a.x + (m.y - a.y) * (b.x - a.x) / (b.y - a.y);
    if (x >= m.x && x < best_x) {
      best_x = x;
      best_edge = i;
      found = true;
    }
  }
  std::size_t pi = 0;
  if (found) {
    const std::size_t ia = best_edge, ib = (best_edge + 1) % outer.size();
    pi = pts[outer[ia]].x > pts[outer[ib]].x ? ia : ib;
    const P2 inter{best_x, m.y};
    const P2 p = pts[outer[pi]];
    double best_angle = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < outer.size(); ++i) {
      if (i == pi) continue;
      const P2& r = pts[outer[i]];
      const P2& prev = pts[outer[(i + outer.size() - 1) % outer.size()]];
      const P2& next = pts[outer[(i + 1) % outer.size()]];
      const bool reflex = cross2(prev, r, next) <= 0;
      if (!reflex || r.x < m.x) continue;
      const bool inside = p.y > m.y ? in_triangle(r, m, inter, p) : in_triangle(r, m, p, inter);
      if (!inside) continue;
      const double angle = std::atan2(std::abs(r.y - m.y), r.x - m.x);
      if (angle < best_angle) {
        best_angle = angle;
        pi = i;
      }
    }
  } else {
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < outer.size(); ++i) {
      const double d = std::hypot(pts[outer[i]].x - m.x, pts[outer[i]].y - m.y);
      if (d < best_d) best_d = d, pi = i;
    }
  }

  std::vector<int> merged(outer.begin(), outer.begin() + static_cast<long>(pi) + 1);
  for (std::size_t k = 0; k <= hole.size(); ++k) merged.push_back(hole[(mi + k) % hole.size()]);
  merged.push_back(outer[pi]);
  merged.insert(merged.end(), outer.begin() + static_cast<long>(pi) + 1, outer.end());
  outer = std::move(merged);
}

/// Ear clipping of a simple counter-clockwise polygon (possibly with bridge
/// duplicates). Returns index triples into `pts`.
inline std::vector<std::array<int, 3>> ear_clip(const std::vector<P2>& pts, std::vector<int> poly) {
  std::vector<std::array<int, 3>> tris;
  while (poly.size() > 3) {
    const std::size_t n = poly.size();
    bool clipped = false;
    for (std::size_t i = 0; i < n && !clipped; ++i) {
      const int ia = poly[(i + n - 1) % n], ib = poly[i], ic = poly[(i + 1) % n];
      const P2 &a = pts[ia], &b = pts[ib], &c = pts[ic];
      if (cross2(a, b, c) <= 0) continue;
      bool blocked = false;
      for (std::size_t k = 0; k < n && !blocked; ++k) {
        const P2& p = pts[poly[k]];
        if (same_point(p, a) || same_point(p, b) || same_point(p, c)) continue;
        blocked = in_triangle(p, a, b, c);
      }
      if (blocked) continue;
      tris.push_back({ia, ib, ic});
      poly.erase(poly.begin() + static_cast<long>(i));
      clipped = true;
    }
    if (!clipped) {
      // Numerically degenerate remainder: drop the flattest vertex.
      std::size_t flat = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        const double c = std::abs(cross2(pts[poly[(i + n - 1) % n]], pts[poly[i]], pts[poly[(i + 1) % n]]));
        if (c < best) best = c, flat = i;
      }
      poly.erase(poly.begin() + static_cast<long>(flat));
    }
  }
  if (poly.size() == 3 && cross2(pts[poly[0]], pts[poly[1]], pts[poly[2]]) > 0)
    tris.push_back({poly[0], poly[1], poly[2]});
  return tris;
}

[[noreturn]] inline void unsupported_surface(const std::string& face, const std::string& why) {
  throw BrepError(BrepError::Category::unsupported, face, why);
}

/// Samples a conic edge from `from` to `to` (full turn when both are empty).
inline std::vector<Vec3> sample_conic(const Entity& edge, const Vec3* from, const Vec3* to, int resolution) {
  const auto& f = edge.function;
  const Vec3 n = f.direction();
  const Vec3 u = f.kind == FunctionKind::ellipse ? f.major_direction() : any_perpendicular(n);
  const Vec3 w = n.cross(u);
  const double ru = f.kind == FunctionKind::ellipse ? f.major_radius() : f.radius();
  const double rw = f.kind == FunctionKind::ellipse ? f.minor_radius() : f.radius();
  auto at = [&](double t) { return Vec3(f.origin + ru * std::cos(t) * u + rw * std::sin(t) * w); };
  auto angle_of = [&](const Vec3& p) {
    const Vec3 d = p - f.origin;
    return std::atan2(d.dot(w) / rw, d.dot(u) / ru);
  };
  const double two_pi = 2.0 * std::numbers::pi;
  double t0 = 0.0, sweep = two_pi;
  if (from && to) {
    t0 = angle_of(*from);
    double t1 = angle_of(*to);
    double ccw = t1 - t0;
    while (ccw <= 0) ccw += two_pi;
    const double cw = ccw - two_pi;
    // The arc's own centroid sits on its side of the chord.
    const Vec3 mid_ccw = at(t0 + 0.5 * ccw);
    const Vec3 mid_cw = at(t0 + 0.5 * cw);
    sweep = (mid_ccw - edge.summary.center_of_mass).norm() <= (mid_cw - edge.summary.center_of_mass).norm() ? ccw : cw;
  } else if (from) {
    t0 = angle_of(*from);
  }
  const int steps = std::max(1, static_cast<int>(std::ceil(resolution * std::abs(sweep) / two_pi)));
  std::vector<Vec3> out;
  for (int k = 0; k < steps; ++k) out.push_back(at(t0 + sweep * k / steps));
  return out;  // excludes the end point
}

/// Closed polyline of a loop, in edge order.
inline std::vector<Vec3> loop_polyline(const Part& part, int loop, int resolution, const std::string& face) {
  const auto& edges = part.edges_of_loop(loop);
  auto position = [&](int v) { return part.vertices()[v].function.position(); };
  auto sample = [&](int e, const Vec3* a, const Vec3* b) -> std::vector<Vec3> {
    const Entity& edge = part.edges()[e];
    switch (edge.function.kind) {
      case FunctionKind::line:
        if (!a || !b) unsupported_surface(face, "open line edge '" + edge.id + "' in a closed loop");
        return {*a};
      case FunctionKind::circle:
      case FunctionKind::ellipse: return sample_conic(edge, a, b, resolution);
      default:
        unsupported_surface(face, "edge '" + edge.id + "' of kind " + std::string(to_string(edge.function.kind)));
    }
  };

  if (edges.size() == 1) {
    const auto& vs = part.vertices_of_edge(edges[0]);
    if (vs.size() == 2) unsupported_surface(face, "single open edge loop");
    if (vs.empty()) return sample(edges[0], nullptr, nullptr);
    const Vec3 p = position(vs[0]);
    return sample_conic(part.edges()[edges[0]], &p, nullptr, resolution);
  }

  std::vector<Vec3> out;
  int current = -1;  // vertex where the next edge must start
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& vs = part.vertices_of_edge(edges[i]);
    if (vs.size() != 2) unsupported_surface(face, "loop mixes closed and open edges");
    int start = vs[0], end = vs[1];
    if (i == 0) {
      const auto& next = part.vertices_of_edge(edges[1]);
      if (std::find(next.begin(), next.end(), end) == next.end()) std::swap(start, end);
    } else if (start != current) {
      std::swap(start, end);
      if (start != current) unsupported_surface(face, "loop edges are not chained");
    }
    const Vec3 a = position(start), b = position(end);
    auto pts = sample(edges[i], &a, &b);
    out.insert(out.end(), pts.begin(), pts.end());
    current = end;
  }
  return out;
}

inline void tessellate_plane(const Part& part, int face, int resolution, TriangleMesh& mesh) {
  const Entity& f = part.faces()[face];
  const Vec3 n = f.function.direction();
  const Vec3 o = f.function.origin;
  const Vec3 u = any_perpendicular(n);
  const Vec3 w = n.cross(u);

  std::vector<Vec3> pts3;
  std::vector<P2> pts2;
  std::vector<int> outer;
  std::vector<std::vector<int>> holes;
  for (int l : part.loops_of_face(face)) {
    std::vector<int> poly;
    for (const Vec3& p : loop_polyline(part, l, resolution, f.id)) {
      const Vec3 q = p - n.dot(p - o) * n;  // exactly on the plane
      poly.push_back(static_cast<int>(pts3.size()));
      pts3.push_back(q);
      pts2.push_back({(q - o).dot(u), (q - o).dot(w)});
    }
    if (poly.size() < 3) unsupported_surface(f.id, "degenerate loop");
    const bool is_outer = part.loops()[l].function.kind == FunctionKind::outer_loop;
    const double area = signed_area(pts2, poly);
    if ((is_outer && area < 0) || (!is_outer && area > 0)) std::reverse(poly.begin(), poly.end());
    if (is_outer) outer = std::move(poly);
    else holes.push_back(std::move(poly));
  }
  std::sort(holes.begin(), holes.end(), [&](const auto& a, const auto& b) {
    auto max_x = [&](const std::vector<int>& h) {
      double m = -std::numeric_limits<double>::infinity();
      for (int i : h) m = std::max(m, pts2[i].x);
      return m;
    };
    return max_x(a) > max_x(b);
  });
  for (const auto& h : holes) bridge_hole(pts2, outer, h);

  const int base = static_cast<int>(mesh.positions.size());
  mesh.positions.insert(mesh.positions.end(), pts3.begin(), pts3.end());
  for (auto t : ear_clip(pts2, outer)) {
    mesh.triangles.push_back({base + t[0], base + t[1], base + t[2]});
    mesh.face_of_triangle.push_back(f.id);
  }
}

/// Surface of revolution sampled as `resolution` segments around the axis;
/// `radius_at` maps an axial coordinate to the profile radius.
template <class RadiusFn>
void revolve(const Entity& f, double t_lo, double t_hi, int resolution, RadiusFn radius_at, TriangleMesh& mesh) {
  const Vec3 a = f.function.direction();
  const Vec3 u = any_perpendicular(a);
  const Vec3 w = a.cross(u);
  const double r_lo = radius_at(t_lo), r_hi = radius_at(t_hi);
  const int base = static_cast<int>(mesh.positions.size());
  const bool apex_lo = r_lo <= 0.0;
  const bool apex_hi = r_hi <= 0.0;
  for (int k = 0; k < resolution; ++k) {
    const double th = 2.0 * std::numbers::pi * k / resolution;
    const Vec3 radial = std::cos(th) * u + std::sin(th) * w;
    mesh.positions.push_back(f.function.origin + t_lo * a + r_lo * radial);
    mesh.positions.push_back(f.function.origin + t_hi * a + r_hi * radial);
  }
  for (int k = 0; k < resolution; ++k) {
    const int k1 = (k + 1) % resolution;
    const int lo0 = base + 2 * k, hi0 = lo0 + 1, lo1 = base + 2 * k1, hi1 = lo1 + 1;
    if (!apex_lo) {
      mesh.triangles.push_back({lo0, lo1, hi1});
      mesh.face_of_triangle.push_back(f.id);
    }
    if (!apex_hi) {
      mesh.triangles.push_back({lo0, hi1, hi0});
      mesh.face_of_triangle.push_back(f.id);
    }
  }
}

inline void tessellate_torus(const Entity& f, int resolution, TriangleMesh& mesh) {
  const Vec3 a = f.function.direction();
  const Vec3 u = any_perpendicular(a);
  const Vec3 w = a.cross(u);
  const double big = f.function.major_radius(), small = f.function.minor_radius();
  const int base = static_cast<int>(mesh.positions.size());
  for (int i = 0; i < resolution; ++i) {
    const double th = 2.0 * std::numbers::pi * i / resolution;
    const Vec3 radial = std::cos(th) * u + std::sin(th) * w;
    for (int j = 0; j < resolution; ++j) {
      const double ph = 2.0 * std::numbers::pi * j / resolution;
      mesh.positions.push_back(f.function.origin + (big + small * std::cos(ph)) * radial + small * std::sin(ph) * a);
    }
  }
  auto idx = [&](int i, int j) { return base + (i % resolution) * resolution + (j % resolution); };
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      mesh.triangles.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
      mesh.triangles.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
      mesh.face_of_triangle.push_back(f.id);
      mesh.face_of_triangle.push_back(f.id);
    }
}

}  // namespace detail

inline TriangleMesh tessellate(const Part& part, int angular_resolution) {
  if (angular_resolution < 3)
    throw BrepError(BrepError::Category::schema, part.id(), "angular resolution must be at least 3");
  TriangleMesh mesh;
  for (int i = 0; i < static_cast<int>(part.faces().size()); ++i) {
    const Entity& f = part.faces()[i];
    switch (f.function.kind) {
      case FunctionKind::plane: detail::tessellate_plane(part, i, angular_resolution, mesh); break;
      case FunctionKind::cylinder: {
        const auto [lo, hi] = detail::axial_extent(part, i);
        const double r = f.function.radius();
        detail::revolve(f, lo, hi, angular_resolution, [r](double) { return r; }, mesh);
        break;
      }
      case FunctionKind::cone: {
        auto [lo, hi] = detail::axial_extent(part, i);
        if (hi - lo < 1e-12) {  // single boundary ring: the surface closes at the apex
          if (hi > 0) lo = 0.0;
          else hi = 0.0;
        }
        const double slope = std::tan(f.function.half_angle());
        detail::revolve(f, lo, hi, angular_resolution, [slope](double t) { return std::abs(t) * slope; }, mesh);
        break;
      }
      case FunctionKind::torus: detail::tessellate_torus(f, angular_resolution, mesh); break;
      default:
        detail::unsupported_surface(f.id, std::string(to_string(f.function.kind)) + " surfaces are not tessellated");
    }
  }
  return mesh;
}

inline Json mesh_to_json(const TriangleMesh& m) {
  Json pos = Json::array(), tris = Json::array();
  for (const auto& p : m.positions) pos.push_back(detail::vec_json(p));
  for (const auto& t : m.triangles) tris.push_back(Json::array({t[0], t[1], t[2]}));
  return Json{{"positions", pos}, {"triangles", tris}, {"face_of_triangle", m.face_of_triangle}};
}

}  // namespace automate
