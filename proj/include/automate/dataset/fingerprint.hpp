#pragma once

#include "automate/brep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

namespace automate::dataset {

inline constexpr double kFingerprintStep = 1e-6;

struct Fingerprint {
  std::array<std::int64_t, 4> counts{};  // faces, loops, edges, vertices
  std::array<std::int64_t, 3> center_of_mass{};
  std::array<std::int64_t, 6> inertia{};

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
  friend auto operator<=>(const Fingerprint&, const Fingerprint&) = default;

  std::string key() const {
    std::string s;
    auto put = [&](auto const& arr, char sep) {
      for (auto v : arr) s += std::to_string(v) + ',';
      s.back() = sep;
    };
    put(counts, '|');
    put(center_of_mass, '|');
    put(inertia, ';');
    s.pop_back();
    return s;
  }
};

struct MassProperties {
  double area = 0.0;
  Vec3 center_of_mass = Vec3::Zero();
  Mat3 inertia = Mat3::Zero();
};

/// Surface mass properties of the whole part, combined from face summaries
/// with the parallel-axis theorem. Faces are accumulated in a canonical
/// order so the result does not depend on entity order.
inline MassProperties surface_mass_properties(const Part& part) {
  std::vector<const Entity*> faces;
  for (const auto& f : part.faces()) faces.push_back(&f);
  auto key = [](const Entity* e) {
    const auto& s = e->summary;
    return std::tuple(s.center_of_mass.x(), s.center_of_mass.y(), s.center_of_mass.z(), s.size, s.inertia);
  };
  std::sort(faces.begin(), faces.end(), [&](const Entity* a, const Entity* b) { return key(a) < key(b); });
  MassProperties mp;
  Vec3 first = Vec3::Zero();
  for (const Entity* f : faces) {
    mp.area += f->summary.size;
    first += f->summary.size * f->summary.center_of_mass;
  }
  if (mp.area <= 0.0) return mp;
  mp.center_of_mass = first / mp.area;
  for (const Entity* f : faces) {
    const Vec3 d = f->summary.center_of_mass - mp.center_of_mass;
    mp.inertia += unpack_symmetric(f->summary.inertia) +
                  f->summary.size * (d.squaredNorm() * Mat3::Identity() - d * d.transpose());
  }
  return mp;
}

inline Fingerprint fingerprint(const Part& part, double q = kFingerprintStep) {
  Fingerprint fp;
  fp.counts = {static_cast<std::int64_t>(part.faces().size()), static_cast<std::int64_t>(part.loops().size()),
               static_cast<std::int64_t>(part.edges().size()), static_cast<std::int64_t>(part.vertices().size())};
  const MassProperties mp = surface_mass_properties(part);
  auto quantize = [q](double v) { return static_cast<std::int64_t>(std::llround(v / q)); };
  for (int i = 0; i < 3; ++i) fp.center_of_mass[i] = quantize(mp.center_of_mass[i]);
  const SymTensor packed = pack_symmetric(mp.inertia);
  for (int i = 0; i < 6; ++i) fp.inertia[i] = quantize(packed[i]);
  return fp;
}

}  // namespace automate::dataset
