#pragma once

// Seeded synthetic assembly families with ground-truth mates.

#include "automate/assembly.hpp"
#include "automate/dataset/part_builder.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace automate::dataset {

struct FamilyCounts {
  int plate_peg = 0;
  int block_stack = 0;
  int hinge = 0;
  int shaft_bushing = 0;
  int rail_slider = 0;
  int offset_plates = 0;
  /// Extra copies of already generated assemblies, with parts re-emitted
  /// under fresh ids.
  int duplicates = 0;

  int total() const { return plate_peg + block_stack + hinge + shaft_bushing + rail_slider + offset_plates; }
};

struct RawCorpus {
  std::map<std::string, Part> parts;
  std::vector<Assembly> assemblies;
};

namespace detail {

class Dice {
 public:
  explicit Dice(std::uint64_t seed) : rng_(seed) {}

  /// Uniform pick from {lo, lo+step, ..., hi}.
  double grid(double lo, double hi, double step) {
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    return lo + step * integer(0, n - 1);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }

 private:
  std::mt19937_64 rng_;
};

struct Emitter {
  RawCorpus& out;
  std::string asm_id;
  Assembly assembly;

  std::string add_part(const PartBuilder& pb) {
    Part p = pb.build();
    const std::string id = p.id();
    out.parts.emplace(id, std::move(p));
    return id;
  }

  /// Adds instance `b_inst` posed so the two ground-truth frames coincide.
  void mate(const std::string& a_inst, const std::string& b_inst, const std::string& b_part, Mcf mcf_a, Mcf mcf_b,
            MateType type) {
    const Instance* a = assembly.instance(a_inst);
    const Part& pa = out.parts.at(a->part);
    const Part& pb = out.parts.at(b_part);
    mcf_a = resolved(pa, mcf_a);
    mcf_b = resolved(pb, mcf_b);
    const Mat4 pose = a->pose * align_transform(mcf_a.resolved_frame, mcf_b.resolved_frame);
    assembly.instances.push_back({b_inst, b_part, pose});
    assembly.mates.push_back({a_inst, b_inst, mcf_a, mcf_b, type});
  }

  void finish() {
    assembly.id = asm_id;
    validate_assembly(assembly);
    out.assemblies.push_back(std::move(assembly));
  }
};

inline Mcf ref(const std::string& origin, OriginType t, const std::string& orient) { return {origin, t, orient, {}}; }

inline void plate_peg(Dice& d, Emitter& em) {
  const double sx = d.grid(40, 120, 5), sy = d.grid(30, 80, 5), sz = d.grid(4, 12, 1);
  const double r = d.grid(3, 6, 0.5);
  int holes = d.integer(1, 3);
  while (holes > 1 && sx / (holes + 1) < 2 * r + 2) --holes;
  const bool clearance = d.chance(0.6);
  const double peg_r = clearance ? 0.8 * r : r;
  const double peg_h = sz + d.grid(5, 30, 5);

  std::vector<Hole> hs;
  for (int i = 0; i < holes; ++i) hs.push_back({-sx / 2 + sx * (i + 1) / (holes + 1), 0.0, r});
  PartBuilder plate(em.asm_id + "_plate");
  const BoxHandles ph = add_box(plate, sx, sy, sz, hs);
  PartBuilder peg(em.asm_id + "_peg");
  const CylinderHandles gh = add_cylinder(peg, peg_r, peg_h);

  em.assembly.instances.push_back({"plate", em.add_part(plate), Mat4::Identity()});
  const std::string peg_part = em.add_part(peg);
  for (int i = 0; i < holes; ++i)
    em.mate("plate", "peg" + std::to_string(i + 1), peg_part,
            ref(ph.holes[i], OriginType::top_axis_point, ph.holes[i]),
            ref(gh.side, OriginType::top_axis_point, gh.side), clearance ? MateType::revolute : MateType::fastened);
}

inline void block_stack(Dice& d, Emitter& em) {
  const double sx = d.grid(20, 80, 5), sy = d.grid(20, 80, 5), sz = d.grid(10, 40, 5);
  std::vector<Hole> hs;
  if (d.chance(0.3)) hs.push_back({d.grid(-sx / 4, sx / 4, 2.5), d.grid(-sy / 4, sy / 4, 2.5), d.grid(2, 4, 1)});
  const bool slab = d.chance(0.35);
  const double bx = d.grid(10, sx, 5), by = d.grid(10, sy, 5);
  const double bz = slab ? d.grid(2, 5, 1) : d.grid(10, 30, 5);

  PartBuilder base(em.asm_id + "_base");
  const BoxHandles a = add_box(base, sx, sy, sz, hs);
  PartBuilder block(em.asm_id + "_block");
  const BoxHandles b = add_box(block, bx, by, bz, {});
  em.assembly.instances.push_back({"base", em.add_part(base), Mat4::Identity()});
  em.mate("base", "block", em.add_part(block), ref(a.top, OriginType::centroid, a.top),
          ref(b.bottom, OriginType::centroid, b.bottom), slab ? MateType::planar : MateType::fastened);
}

inline void hinge(Dice& d, Emitter& em) {
  const double r = d.grid(2, 5, 0.5);
  auto leaf = [&](const std::string& id) {
    const double sx = d.grid(20, 60, 5), sy = d.grid(10, 40, 5), sz = d.grid(5, 15, 1);
    const double hx = d.grid(-sx / 2 + r + 2, sx / 2 - r - 2, 0.5);
    PartBuilder pb(id);
    const BoxHandles h = add_box(pb, sx, sy, sz, {{hx, 0.0, r}});
    return std::pair{pb, h.holes[0]};
  };
  auto [pa, hole_a] = leaf(em.asm_id + "_leaf1");
  auto [pb, hole_b] = leaf(em.asm_id + "_leaf2");
  em.assembly.instances.push_back({"leaf1", em.add_part(pa), Mat4::Identity()});
  em.mate("leaf1", "leaf2", em.add_part(pb), ref(hole_a, OriginType::top_axis_point, hole_a),
          ref(hole_b, OriginType::bottom_axis_point, hole_b), MateType::revolute);
}

inline void shaft_bushing(Dice& d, Emitter& em) {
  const double r_in = d.grid(4, 15, 1), r_out = r_in + d.grid(2, 6, 1), h = d.grid(10, 40, 5);
  const double len = d.grid(30, 120, 10);
  PartBuilder bushing(em.asm_id + "_bushing");
  const TubeHandles t = add_tube(bushing, r_in, r_out, h);
  PartBuilder shaft(em.asm_id + "_shaft");
  const CylinderHandles s = add_cylinder(shaft, r_in, len);
  em.assembly.instances.push_back({"bushing", em.add_part(bushing), Mat4::Identity()});
  em.mate("bushing", "shaft", em.add_part(shaft), ref(t.inner, OriginType::mid_axis_point, t.inner),
          ref(s.side, OriginType::mid_axis_point, s.side), MateType::cylindrical);
}

inline void rail_slider(Dice& d, Emitter& em) {
  const double len = d.grid(100, 300, 10), w = d.grid(10, 30, 2), h = d.grid(10, 30, 2);
  const double bx = d.grid(20, 50, 5), by = w + d.grid(4, 10, 2), bz = d.grid(10, 20, 2);
  PartBuilder rail(em.asm_id + "_rail");
  const BoxHandles a = add_box(rail, len, w, h, {});
  PartBuilder slider(em.asm_id + "_slider");
  const BoxHandles b = add_box(slider, bx, by, bz, {});
  em.assembly.instances.push_back({"rail", em.add_part(rail), Mat4::Identity()});
  em.mate("rail", "slider", em.add_part(slider), ref(a.top, OriginType::centroid, a.top),
          ref(b.bottom, OriginType::centroid, b.bottom), MateType::slider);
}

inline void offset_plates(Dice& d, Emitter& em) {
  auto plate = [&](const std::string& id) {
    const double sx = d.grid(30, 100, 5), sy = d.grid(30, 100, 5), sz = d.grid(2, 6, 1);
    PartBuilder pb(id);
    const BoxHandles h = add_box(pb, sx, sy, sz, {});
    return std::pair{pb, h};
  };
  auto [pa, a] = plate(em.asm_id + "_plate1");
  auto [pb, b] = plate(em.asm_id + "_plate2");
  em.assembly.instances.push_back({"plate1", em.add_part(pa), Mat4::Identity()});
  em.mate("plate1", "plate2", em.add_part(pb), ref(a.top_edge_pos_y, OriginType::mid_point, a.top),
          ref(b.bottom_edge_pos_y, OriginType::mid_point, b.bottom), MateType::parallel);
}

inline std::string padded(int i) {
  std::string s = std::to_string(i);
  return std::string(s.size() < 5 ? 5 - s.size() : 0, '0') + s;
}

}  // namespace detail

/// Deterministic corpus for `seed`. Families are emitted in a fixed order,
/// followed by duplicates.
inline RawCorpus generate_corpus(std::uint64_t seed, const FamilyCounts& counts) {
  RawCorpus out;
  detail::Dice dice(seed);
  using Family = void (*)(detail::Dice&, detail::Emitter&);
  const std::vector<std::tuple<const char*, int, Family>> families = {
      {"pp", counts.plate_peg, detail::plate_peg},         {"bs", counts.block_stack, detail::block_stack},
      {"hg", counts.hinge, detail::hinge},                 {"sb", counts.shaft_bushing, detail::shaft_bushing},
      {"rs", counts.rail_slider, detail::rail_slider},     {"op", counts.offset_plates, detail::offset_plates}};
  for (const auto& [prefix, n, fn] : families)
    for (int i = 0; i < n; ++i) {
      detail::Emitter em{out, std::string(prefix) + detail::padded(i), {}};
      fn(dice, em);
      em.finish();
    }

  const int originals = static_cast<int>(out.assemblies.size());
  for (int k = 0; k < counts.duplicates && originals > 0; ++k) {
    Assembly copy = out.assemblies[dice.integer(0, originals - 1)];
    copy.id = "dup" + detail::padded(k);
    std::map<std::string, std::string> renamed;
    for (auto& inst : copy.instances) {
      auto [it, fresh] = renamed.emplace(inst.part, copy.id + "_" + inst.part);
      if (fresh) {
        PartData d = out.parts.at(inst.part).data();
        d.id = it->second;
        out.parts.emplace(it->second, Part::from_data(std::move(d)));
      }
      inst.part = it->second;
    }
    out.assemblies.push_back(std::move(copy));
  }
  return out;
}

}  // namespace automate::dataset
