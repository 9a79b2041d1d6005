#pragma once

#include "automate/brep_io.hpp"
#include "automate/mcf.hpp"

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace automate {

struct Mate {
  std::string a;  // instance ids
  std::string b;
  Mcf mcf_a;
  Mcf mcf_b;
  MateType mate_type = MateType::fastened;

  std::string_view dof() const { return dof_note(mate_type); }
};

struct Instance {
  std::string id;
  std::string part;
  Mat4 pose = Mat4::Identity();
};

/// Flat assembly: part instances with poses and pairwise mates.
struct Assembly {
  std::string id;
  std::vector<Instance> instances;
  std::vector<Mate> mates;

  const Instance* instance(std::string_view id) const {
    for (const auto& i : instances)
      if (i.id == id) return &i;
    return nullptr;
  }
};

/// Checks that every mate joins two distinct known instances and that no
/// instance pair carries more than one mate.
inline void validate_assembly(const Assembly& asm_) {
  using C = BrepError::Category;
  std::set<std::string> ids;
  for (const auto& i : asm_.instances)
    if (!ids.insert(i.id).second) throw BrepError(C::integrity, i.id, "duplicate instance id");
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& m : asm_.mates) {
    if (!ids.count(m.a)) throw BrepError(C::integrity, m.a, "mate references unknown instance");
    if (!ids.count(m.b)) throw BrepError(C::integrity, m.b, "mate references unknown instance");
    if (m.a == m.b) throw BrepError(C::integrity, m.a, "mate joins an instance to itself");
    auto key = std::minmax(m.a, m.b);
    if (!pairs.insert({key.first, key.second}).second)
      throw BrepError(C::integrity, m.a + "/" + m.b, "more than one mate between instances");
  }
}

namespace detail {

inline Json mcf_ref_json(const Mcf& m) {
  return Json{{"origin_ref", m.origin_ref},
              {"origin_type", std::string(to_string(m.origin_type))},
              {"orient_ref", m.orient_ref}};
}

inline Mcf read_mcf_ref(const Json& j, const std::string& context) {
  JsonReader r(context);
  Mcf m;
  m.origin_ref = r.string(r.field(j, "origin_ref"), "origin_ref");
  m.orient_ref = r.string(r.field(j, "orient_ref"), "orient_ref");
  const auto type = r.string(r.field(j, "origin_type"), "origin_type");
  auto t = origin_type_from_string(type);
  if (!t) r.fail("unknown origin type '" + type + "'");
  m.origin_type = *t;
  return m;
}

}  // namespace detail

inline Json mate_to_json(const Mate& m) {
  return Json{{"a", m.a},
              {"b", m.b},
              {"mcf_a", detail::mcf_ref_json(m.mcf_a)},
              {"mcf_b", detail::mcf_ref_json(m.mcf_b)},
              {"mate_type", std::string(to_string(m.mate_type))}};
}

inline Mate mate_from_json(const Json& j) {
  detail::JsonReader r("mate");
  Mate m;
  m.a = r.string(r.field(j, "a"), "a");
  m.b = r.string(r.field(j, "b"), "b");
  m.mcf_a = detail::read_mcf_ref(r.field(j, "mcf_a"), m.a);
  m.mcf_b = detail::read_mcf_ref(r.field(j, "mcf_b"), m.b);
  const auto type = r.string(r.field(j, "mate_type"), "mate_type");
  auto t = mate_type_from_string(type);
  if (!t) r.fail("unknown mate type '" + type + "'");
  m.mate_type = *t;
  return m;
}

inline Json assembly_to_json(const Assembly& a) {
  Json inst = Json::array();
  for (const auto& i : a.instances) {
    Json pose = Json::array();
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) pose.push_back(i.pose(r, c));
    inst.push_back(Json{{"id", i.id}, {"part", i.part}, {"pose", pose}});
  }
  Json mates = Json::array();
  for (const auto& m : a.mates) mates.push_back(mate_to_json(m));
  return Json{{"id", a.id}, {"instances", inst}, {"mates", mates}};
}

inline std::string save_assembly(const Assembly& a) { return assembly_to_json(a).dump(); }

/// Parses an assembly file. With `strict`, the mate invariants are enforced.
inline Assembly load_assembly(std::string_view bytes, bool strict = true) {
  const Json j = detail::parse_json(bytes, "assembly");
  detail::JsonReader r("assembly");
  Assembly a;
  a.id = r.string(r.field(j, "id"), "id");
  const Json& inst = r.field(j, "instances");
  if (!inst.is_array()) r.fail("'instances' must be an array");
  for (const Json& item : inst) {
    Instance i;
    i.id = r.string(r.field(item, "id"), "id");
    i.part = r.string(r.field(item, "part"), "part");
    const Json& pose = r.field(item, "pose");
    if (!pose.is_array() || pose.size() != 16) r.fail("'pose' must hold 16 numbers");
    for (int k = 0; k < 16; ++k) i.pose(k / 4, k % 4) = r.number(pose[k], "pose");
    a.instances.push_back(std::move(i));
  }
  const Json& mates = r.field(j, "mates");
  if (!mates.is_array()) r.fail("'mates' must be an array");
  for (const Json& m : mates) a.mates.push_back(mate_from_json(m));
  if (strict) validate_assembly(a);
  return a;
}

}  // namespace automate
