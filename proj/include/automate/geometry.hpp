#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace automate {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Rigid coordinate frame: an origin plus three orthonormal axes.
struct Frame {
  Vec3 origin = Vec3::Zero();
  Vec3 x = Vec3::UnitX();
  Vec3 y = Vec3::UnitY();
  Vec3 z = Vec3::UnitZ();

  /// Homogeneous matrix with the axes as columns and the origin as translation.
  Mat4 matrix() const {
    Mat4 m = Mat4::Identity();
    m.block<3, 1>(0, 0) = x;
    m.block<3, 1>(0, 1) = y;
    m.block<3, 1>(0, 2) = z;
    m.block<3, 1>(0, 3) = origin;
    return m;
  }

  Mat3 rotation() const {
    Mat3 r;
    r.col(0) = x;
    r.col(1) = y;
    r.col(2) = z;
    return r;
  }

  static Frame from_matrix(const Mat4& m) {
    Frame f;
    f.x = m.block<3, 1>(0, 0);
    f.y = m.block<3, 1>(0, 1);
    f.z = m.block<3, 1>(0, 2);
    f.origin = m.block<3, 1>(0, 3);
    return f;
  }

  bool is_orthonormal(double tol) const {
    return std::abs(x.norm() - 1.0) <= tol && std::abs(y.norm() - 1.0) <= tol &&
           std::abs(z.norm() - 1.0) <= tol && std::abs(x.dot(y)) <= tol &&
           std::abs(y.dot(z)) <= tol && std::abs(z.dot(x)) <= tol;
  }

  bool is_right_handed(double tol) const {
    return std::abs(rotation().determinant() - 1.0) <= tol;
  }

  bool operator==(const Frame& o) const {
    return origin == o.origin && x == o.x && y == o.y && z == o.z;
  }
};

inline Vec3 transform_point(const Mat4& t, const Vec3& p) {
  return t.block<3, 3>(0, 0) * p + t.block<3, 1>(0, 3);
}

inline Vec3 transform_direction(const Mat4& t, const Vec3& d) {
  return t.block<3, 3>(0, 0) * d;
}

inline Frame transform_frame(const Mat4& t, const Frame& f) {
  return Frame::from_matrix(t * f.matrix());
}

/// Inverse of a rigid transform without a general 4x4 inversion.
inline Mat4 rigid_inverse(const Mat4& t) {
  Mat4 inv = Mat4::Identity();
  const Mat3 rt = t.block<3, 3>(0, 0).transpose();
  inv.block<3, 3>(0, 0) = rt;
  inv.block<3, 1>(0, 3) = -rt * t.block<3, 1>(0, 3);
  return inv;
}

inline Mat4 translation(const Vec3& d) {
  Mat4 t = Mat4::Identity();
  t.block<3, 1>(0, 3) = d;
  return t;
}

inline bool is_unit(const Vec3& v, double tol = 1e-9) { return std::abs(v.norm() - 1.0) <= tol; }

inline Vec3 to_vec3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

/// Upper-triangle packing (xx, xy, xz, yy, yz, zz) of a symmetric 3x3 tensor.
using SymTensor = std::array<double, 6>;

inline Mat3 unpack_symmetric(const SymTensor& s) {
  Mat3 m;
  m << s[0], s[1], s[2], s[1], s[3], s[4], s[2], s[4], s[5];
  return m;
}

inline SymTensor pack_symmetric(const Mat3& m) {
  return {m(0, 0), m(0, 1), m(0, 2), m(1, 1), m(1, 2), m(2, 2)};
}

/// Any unit vector perpendicular to `n`.
inline Vec3 any_perpendicular(const Vec3& n) {
  const Vec3 seed = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return n.cross(seed).normalized();
}

}  // namespace automate
