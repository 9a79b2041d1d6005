#pragma once

// Programmatic construction of analytic parts with exact geometric
// summaries. Every entity summary is derived from closed-form moments:
// mass m (area or length), first moment ∫r and second moment ∫r rᵀ.

#include "automate/brep.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace automate::dataset {

struct Moments {
  double mass = 0.0;
  Vec3 first = Vec3::Zero();
  Mat3 second = Mat3::Zero();

  Moments& operator+=(const Moments& o) {
    mass += o.mass;
    first += o.first;
    second += o.second;
    return *this;
  }
  Moments& operator-=(const Moments& o) {
    mass -= o.mass;
    first -= o.first;
    second -= o.second;
    return *this;
  }

  /// Moments of a body with `mass`, centroid `c` and central second moment `central`.
  static Moments from_central(double mass, const Vec3& c, const Mat3& central) {
    return {mass, mass * c, central + mass * c * c.transpose()};
  }

  Vec3 centroid() const { return mass > 0 ? Vec3(first / mass) : Vec3::Zero(); }

  /// Inertia tensor about the centroid: tr(C) I - C with C the central second moment.
  Mat3 inertia() const {
    const Vec3 g = centroid();
    const Mat3 c = second - mass * g * g.transpose();
    return c.trace() * Mat3::Identity() - c;
  }
};

inline Moments segment_moments(const Vec3& a, const Vec3& b) {
  const double len = (b - a).norm();
  const Vec3 d = (b - a) / len;
  return Moments::from_central(len, 0.5 * (a + b), (len * len * len / 12.0) * d * d.transpose());
}

inline Moments circle_moments(const Vec3& c, const Vec3& n, double r) {
  const double pi = std::numbers::pi;
  return Moments::from_central(2 * pi * r, c, pi * r * r * r * (Mat3::Identity() - n * n.transpose()));
}

inline Moments disk_moments(const Vec3& c, const Vec3& n, double r) {
  const double pi = std::numbers::pi;
  return Moments::from_central(pi * r * r, c, 0.25 * pi * std::pow(r, 4) * (Mat3::Identity() - n * n.transpose()));
}

inline Moments triangle_moments(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double area = 0.5 * (b - a).cross(c - a).norm();
  const Vec3 s = a + b + c;
  Moments m;
  m.mass = area;
  m.first = area * s / 3.0;
  m.second = (area / 12.0) * (a * a.transpose() + b * b.transpose() + c * c.transpose() + s * s.transpose());
  return m;
}

/// Convex planar polygon region (fan triangulation).
inline Moments polygon_moments(const std::vector<Vec3>& poly) {
  Moments m;
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) m += triangle_moments(poly[0], poly[i], poly[i + 1]);
  return m;
}

/// Lateral surface of a cylinder between axial offsets [t0, t1] from `base`.
inline Moments cylinder_surface_moments(const Vec3& base, const Vec3& axis, double r, double t0, double t1) {
  const double pi = std::numbers::pi;
  const double h = t1 - t0;
  const Vec3 c = base + 0.5 * (t0 + t1) * axis;
  const Mat3 aa = axis * axis.transpose();
  const Mat3 central = pi * r * r * r * h * (Mat3::Identity() - aa) + (pi * r * h * h * h / 6.0) * aa;
  return Moments::from_central(2 * pi * r * h, c, central);
}

struct Box3 {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());
  void add(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void add(const Box3& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
};

inline Box3 circle_box(const Vec3& c, const Vec3& n, double r) {
  Box3 b;
  for (int k = 0; k < 3; ++k) {
    const double ext = r * std::sqrt(std::max(0.0, 1.0 - n[k] * n[k]));
    b.lo[k] = c[k] - ext;
    b.hi[k] = c[k] + ext;
  }
  return b;
}

inline GeometricSummary summarize(const Moments& m, const Box3& box) {
  GeometricSummary s;
  s.center_of_mass = m.centroid();
  s.aabb_min = box.lo;
  s.aabb_max = box.hi;
  s.size = m.mass;
  s.inertia = pack_symmetric(m.inertia());
  return s;
}

/// Incremental part construction; ids are tier-prefixed sequence numbers.
class PartBuilder {
 public:
  explicit PartBuilder(std::string id, Frame part_frame = {}) {
    data_.id = std::move(id);
    data_.part_frame = part_frame;
  }

  std::string vertex(const Vec3& p) {
    Entity e;
    e.id = "v" + std::to_string(data_.vertices.size() + 1);
    e.function.kind = FunctionKind::point;
    e.function.origin = p;
    e.function.parameters = {p.x(), p.y(), p.z()};
    Box3 b;
    b.add(p);
    e.summary = summarize(Moments::from_central(0.0, p, Mat3::Zero()), b);
    e.summary.center_of_mass = p;
    positions_.push_back(p);
    data_.vertices.push_back(e);
    return e.id;
  }

  std::string line(const std::string& va, const std::string& vb) {
    const Vec3 a = position(va), b = position(vb);
    Entity e;
    e.id = next_edge_id();
    e.function.kind = FunctionKind::line;
    e.function.origin = a;
    const Vec3 d = (b - a).normalized();
    e.function.parameters = {d.x(), d.y(), d.z()};
    Box3 box;
    box.add(a);
    box.add(b);
    const Moments m = segment_moments(a, b);
    e.summary = summarize(m, box);
    e.refs = {va, vb};
    push_edge(std::move(e), m, box);
    return data_.edges.back().id;
  }

  /// Closed circle without bounding vertices.
  std::string circle(const Vec3& center, const Vec3& normal, double radius) {
    Entity e;
    e.id = next_edge_id();
    e.function.kind = FunctionKind::circle;
    e.function.origin = center;
    e.function.parameters = {normal.x(), normal.y(), normal.z(), radius};
    const Moments m = circle_moments(center, normal, radius);
    const Box3 box = circle_box(center, normal, radius);
    e.summary = summarize(m, box);
    push_edge(std::move(e), m, box);
    return data_.edges.back().id;
  }

  /// Loop whose summary aggregates its member edges.
  std::string loop(FunctionKind kind, const std::vector<std::string>& edges) {
    Entity e;
    e.id = "l" + std::to_string(data_.loops.size() + 1);
    e.function.kind = kind;
    Moments m;
    Box3 box;
    for (const auto& id : edges) {
      const int i = edge_index(id);
      m += edge_moments_[i];
      box.add(edge_boxes_[i]);
    }
    e.function.origin = m.centroid();
    e.summary = summarize(m, box);
    e.refs = edges;
    loop_boxes_.push_back(box);
    data_.loops.push_back(std::move(e));
    return data_.loops.back().id;
  }

  /// Face with explicit moments; the aabb is the union of its loops'.
  std::string face(ParametricFunction fn, const std::vector<std::string>& loops, const Moments& m) {
    Entity e;
    e.id = "f" + std::to_string(data_.faces.size() + 1);
    e.function = std::move(fn);
    Box3 box;
    for (const auto& id : loops) box.add(loop_boxes_[loop_index(id)]);
    e.summary = summarize(m, box);
    e.refs = loops;
    data_.faces.push_back(std::move(e));
    return data_.faces.back().id;
  }

  Part build() const { return Part::from_data(data_); }
  const PartData& data() const { return data_; }

  Vec3 position(const std::string& vid) const { return positions_.at(std::stoi(vid.substr(1)) - 1); }

 private:
  std::string next_edge_id() const { return "e" + std::to_string(data_.edges.size() + 1); }
  int edge_index(const std::string& id) const { return std::stoi(id.substr(1)) - 1; }
  int loop_index(const std::string& id) const { return std::stoi(id.substr(1)) - 1; }

  void push_edge(Entity e, const Moments& m, const Box3& box) {
    edge_moments_.push_back(m);
    edge_boxes_.push_back(box);
    data_.edges.push_back(std::move(e));
  }

  PartData data_;
  std::vector<Vec3> positions_;
  std::vector<Moments> edge_moments_;
  std::vector<Box3> edge_boxes_;
  std::vector<Box3> loop_boxes_;
};

inline ParametricFunction plane_fn(const Vec3& origin, const Vec3& normal) {
  return {FunctionKind::plane, {normal.x(), normal.y(), normal.z()}, origin};
}

inline ParametricFunction cylinder_fn(const Vec3& origin, const Vec3& axis, double r) {
  return {FunctionKind::cylinder, {axis.x(), axis.y(), axis.z(), r}, origin};
}

struct Hole {
  double x = 0.0;
  double y = 0.0;
  double radius = 1.0;
};

/// Entity ids of a generated box.
struct BoxHandles {
  std::string top, bottom, pos_x, neg_x, pos_y, neg_y;
  std::vector<std::string> holes;  // cylinder face per hole
  std::string top_edge_pos_y;      // +y edge of the top face
  std::string bottom_edge_pos_y;   // +y edge of the bottom face
};

/// Axis-aligned box x∈[-sx/2, sx/2], y∈[-sy/2, sy/2], z∈[0, sz] with
/// vertical through-holes.
inline BoxHandles add_box(PartBuilder& pb, double sx, double sy, double sz, const std::vector<Hole>& holes) {
  const double hx = sx / 2, hy = sy / 2;
  const Vec3 c[8] = {{-hx, -hy, 0}, {hx, -hy, 0}, {hx, hy, 0}, {-hx, hy, 0},
                     {-hx, -hy, sz}, {hx, -hy, sz}, {hx, hy, sz}, {-hx, hy, sz}};
  std::string v[8];
  for (int i = 0; i < 8; ++i) v[i] = pb.vertex(c[i]);
  // bottom ring 0-1-2-3, top ring 4-5-6-7, verticals i -> i+4
  const std::string b01 = pb.line(v[0], v[1]), b12 = pb.line(v[1], v[2]), b23 = pb.line(v[2], v[3]),
                    b30 = pb.line(v[3], v[0]);
  const std::string t45 = pb.line(v[4], v[5]), t56 = pb.line(v[5], v[6]), t67 = pb.line(v[6], v[7]),
                    t74 = pb.line(v[7], v[4]);
  const std::string s04 = pb.line(v[0], v[4]), s15 = pb.line(v[1], v[5]), s26 = pb.line(v[2], v[6]),
                    s37 = pb.line(v[3], v[7]);

  const Vec3 up = Vec3::UnitZ(), down = -Vec3::UnitZ();
  std::vector<std::string> top_circles, bottom_circles;
  for (const auto& h : holes) {
    top_circles.push_back(pb.circle({h.x, h.y, sz}, up, h.radius));
    bottom_circles.push_back(pb.circle({h.x, h.y, 0}, up, h.radius));
  }

  auto rect = [&](int a, int b, int cc, int d) { return polygon_moments({c[a], c[b], c[cc], c[d]}); };
  BoxHandles out;

  // top (+z)
  {
    std::vector<std::string> loops{pb.loop(FunctionKind::outer_loop, {t45, t56, t67, t74})};
    Moments m = rect(4, 5, 6, 7);
    for (std::size_t i = 0; i < holes.size(); ++i) {
      loops.push_back(pb.loop(FunctionKind::inner_loop, {top_circles[i]}));
      m -= disk_moments({holes[i].x, holes[i].y, sz}, up, holes[i].radius);
    }
    out.top = pb.face(plane_fn({0, 0, sz}, up), loops, m);
    out.top_edge_pos_y = t67;
  }
  // bottom (-z)
  {
    std::vector<std::string> loops{pb.loop(FunctionKind::outer_loop, {b01, b12, b23, b30})};
    Moments m = rect(0, 1, 2, 3);
    for (std::size_t i = 0; i < holes.size(); ++i) {
      loops.push_back(pb.loop(FunctionKind::inner_loop, {bottom_circles[i]}));
      m -= disk_moments({holes[i].x, holes[i].y, 0}, up, holes[i].radius);
    }
    out.bottom = pb.face(plane_fn({0, 0, 0}, down), loops, m);
    out.bottom_edge_pos_y = b23;
  }
  out.neg_y = pb.face(plane_fn({0, -hy, 0}, -Vec3::UnitY()),
                      {pb.loop(FunctionKind::outer_loop, {b01, s15, t45, s04})}, rect(0, 1, 5, 4));
  out.pos_x = pb.face(plane_fn({hx, 0, 0}, Vec3::UnitX()),
                      {pb.loop(FunctionKind::outer_loop, {b12, s26, t56, s15})}, rect(1, 2, 6, 5));
  out.pos_y = pb.face(plane_fn({0, hy, 0}, Vec3::UnitY()),
                      {pb.loop(FunctionKind::outer_loop, {b23, s37, t67, s26})}, rect(2, 3, 7, 6));
  out.neg_x = pb.face(plane_fn({-hx, 0, 0}, -Vec3::UnitX()),
                      {pb.loop(FunctionKind::outer_loop, {b30, s04, t74, s37})}, rect(3, 0, 4, 7));
  for (std::size_t i = 0; i < holes.size(); ++i) {
    const Vec3 base{holes[i].x, holes[i].y, 0};
    out.holes.push_back(pb.face(cylinder_fn(base, up, holes[i].radius),
                                {pb.loop(FunctionKind::outer_loop, {top_circles[i]}),
                                 pb.loop(FunctionKind::inner_loop, {bottom_circles[i]})},
                                cylinder_surface_moments(base, up, holes[i].radius, 0, sz)));
  }
  return out;
}

struct CylinderHandles {
  std::string side, top, bottom, top_circle, bottom_circle;
};

/// Solid cylinder along +z, base at the origin.
inline CylinderHandles add_cylinder(PartBuilder& pb, double r, double h) {
  const Vec3 up = Vec3::UnitZ();
  CylinderHandles out;
  out.top_circle = pb.circle({0, 0, h}, up, r);
  out.bottom_circle = pb.circle({0, 0, 0}, up, r);
  out.side = pb.face(cylinder_fn(Vec3::Zero(), up, r),
                     {pb.loop(FunctionKind::outer_loop, {out.top_circle}),
                      pb.loop(FunctionKind::inner_loop, {out.bottom_circle})},
                     cylinder_surface_moments(Vec3::Zero(), up, r, 0, h));
  out.top = pb.face(plane_fn({0, 0, h}, up), {pb.loop(FunctionKind::outer_loop, {out.top_circle})},
                    disk_moments({0, 0, h}, up, r));
  out.bottom = pb.face(plane_fn(Vec3::Zero(), -up), {pb.loop(FunctionKind::outer_loop, {out.bottom_circle})},
                       disk_moments(Vec3::Zero(), up, r));
  return out;
}

struct TubeHandles {
  std::string outer, inner, top, bottom;
};

/// Hollow cylinder along +z, base at the origin.
inline TubeHandles add_tube(PartBuilder& pb, double r_in, double r_out, double h) {
  const Vec3 up = Vec3::UnitZ();
  const std::string ot = pb.circle({0, 0, h}, up, r_out), ob = pb.circle({0, 0, 0}, up, r_out);
  const std::string it = pb.circle({0, 0, h}, up, r_in), ib = pb.circle({0, 0, 0}, up, r_in);
  TubeHandles out;
  out.outer = pb.face(cylinder_fn(Vec3::Zero(), up, r_out),
                      {pb.loop(FunctionKind::outer_loop, {ot}), pb.loop(FunctionKind::inner_loop, {ob})},
                      cylinder_surface_moments(Vec3::Zero(), up, r_out, 0, h));
  out.inner = pb.face(cylinder_fn(Vec3::Zero(), up, r_in),
                      {pb.loop(FunctionKind::outer_loop, {it}), pb.loop(FunctionKind::inner_loop, {ib})},
                      cylinder_surface_moments(Vec3::Zero(), up, r_in, 0, h));
  Moments top = disk_moments({0, 0, h}, up, r_out);
  top -= disk_moments({0, 0, h}, up, r_in);
  Moments bottom = disk_moments(Vec3::Zero(), up, r_out);
  bottom -= disk_moments(Vec3::Zero(), up, r_in);
  out.top = pb.face(plane_fn({0, 0, h}, up),
                    {pb.loop(FunctionKind::outer_loop, {ot}), pb.loop(FunctionKind::inner_loop, {it})}, top);
  out.bottom = pb.face(plane_fn(Vec3::Zero(), -up),
                       {pb.loop(FunctionKind::outer_loop, {ob}), pb.loop(FunctionKind::inner_loop, {ib})}, bottom);
  return out;
}

/// Unit cube x,y∈[-0.5, 0.5], z∈[0, 1].
inline Part unit_cube(const std::string& id = "cube") {
  PartBuilder pb(id);
  add_box(pb, 1, 1, 1, {});
  return pb.build();
}

}  // namespace automate::dataset
