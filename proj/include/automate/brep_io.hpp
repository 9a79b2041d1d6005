#pragma once

// JSON part format. Loading validates fully; saving is canonical (sorted
// keys, entities in id order, shortest round-trip float formatting) so that
// save(load(save(p))) is byte-identical to save(p).

#include "automate/brep.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace automate {

using Json = nlohmann::json;

namespace detail {

struct ParamField {
  const char* name;
  int width;  // 3 for vectors, 1 for scalars
};

inline std::vector<ParamField> parameter_fields(FunctionKind k) {
  switch (k) {
    case FunctionKind::plane: return {{"normal", 3}};
    case FunctionKind::cylinder: return {{"axis", 3}, {"radius", 1}};
    case FunctionKind::cone: return {{"axis", 3}, {"half_angle", 1}};
    case FunctionKind::torus: return {{"axis", 3}, {"major_radius", 1}, {"minor_radius", 1}};
    case FunctionKind::line: return {{"direction", 3}};
    case FunctionKind::circle: return {{"normal", 3}, {"radius", 1}};
    case FunctionKind::ellipse:
      return {{"normal", 3}, {"major_direction", 3}, {"major_radius", 1}, {"minor_radius", 1}};
    case FunctionKind::point: return {{"position", 3}};
    case FunctionKind::spun: return {{"axis", 3}};
    default: return {};
  }
}

class JsonReader {
 public:
  explicit JsonReader(std::string context) : context_(std::move(context)) {}

  [[noreturn]] void fail(const std::string& reason) const {
    throw BrepError(BrepError::Category::schema, context_, reason);
  }

  const Json& field(const Json& obj, const char* name) const {
    if (!obj.is_object()) fail("expected an object");
    auto it = obj.find(name);
    if (it == obj.end()) fail(std::string("missing field '") + name + "'");
    return *it;
  }

  double number(const Json& j, const char* what) const {
    if (!j.is_number()) fail(std::string("'") + what + "' must be a number");
    return j.get<double>();
  }

  std::string string(const Json& j, const char* what) const {
    if (!j.is_string()) fail(std::string("'") + what + "' must be a string");
    return j.get<std::string>();
  }

  Vec3 vec3(const Json& j, const char* what) const {
    if (!j.is_array() || j.size() != 3) fail(std::string("'") + what + "' must be an array of 3 numbers");
    return {number(j[0], what), number(j[1], what), number(j[2], what)};
  }

  std::vector<std::string> strings(const Json& j, const char* what) const {
    if (!j.is_array()) fail(std::string("'") + what + "' must be an array of ids");
    std::vector<std::string> out;
    for (const auto& s : j) out.push_back(string(s, what));
    return out;
  }

 private:
  std::string context_;
};

inline Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

inline ParametricFunction read_function(const Json& j, const std::string& id) {
  JsonReader r(id);
  ParametricFunction f;
  const auto kind_name = r.string(r.field(j, "kind"), "kind");
  auto kind = function_kind_from_string(kind_name);
  if (!kind) r.fail("unknown function kind '" + kind_name + "'");
  f.kind = *kind;
  f.origin = r.vec3(r.field(j, "origin"), "origin");
  const Json& params = r.field(j, "parameters");
  if (!params.is_object()) r.fail("'parameters' must be an object");
  const auto fields = parameter_fields(f.kind);
  std::size_t used = 0;
  for (const auto& pf : fields) {
    auto it = params.find(pf.name);
    if (it == params.end()) {
      if (f.kind == FunctionKind::spun) continue;  // optional axis
      r.fail(std::string("missing parameter '") + pf.name + "' for " + kind_name);
    }
    ++used;
    if (pf.width == 3) {
      const Vec3 v = r.vec3(*it, pf.name);
      f.parameters.insert(f.parameters.end(), {v.x(), v.y(), v.z()});
    } else {
      f.parameters.push_back(r.number(*it, pf.name));
    }
  }
  if (used != params.size()) r.fail("unexpected parameters for " + kind_name);
  return f;
}

inline Json write_function(const ParametricFunction& f) {
  Json params = Json::object();
  std::size_t at = 0;
  for (const auto& pf : parameter_fields(f.kind)) {
    if (at >= f.parameters.size()) break;
    if (pf.width == 3) {
      params[pf.name] = Json::array({f.parameters[at], f.parameters[at + 1], f.parameters[at + 2]});
      at += 3;
    } else {
      params[pf.name] = f.parameters[at++];
    }
  }
  return Json{{"kind", std::string(to_string(f.kind))}, {"parameters", params}, {"origin", vec_json(f.origin)}};
}

inline GeometricSummary read_summary(const Json& j, const std::string& id) {
  JsonReader r(id);
  GeometricSummary s;
  s.center_of_mass = r.vec3(r.field(j, "center_of_mass"), "center_of_mass");
  const Json& box = r.field(j, "aabb");
  s.aabb_min = r.vec3(r.field(box, "min"), "aabb.min");
  s.aabb_max = r.vec3(r.field(box, "max"), "aabb.max");
  s.size = r.number(r.field(j, "size"), "size");
  const Json& inertia = r.field(j, "inertia");
  if (!inertia.is_array() || inertia.size() != 6) r.fail("'inertia' must be an array of 6 numbers");
  for (int i = 0; i < 6; ++i) s.inertia[i] = r.number(inertia[i], "inertia");
  return s;
}

inline Json write_summary(const GeometricSummary& s) {
  return Json{{"center_of_mass", vec_json(s.center_of_mass)},
              {"aabb", {{"min", vec_json(s.aabb_min)}, {"max", vec_json(s.aabb_max)}}},
              {"size", s.size},
              {"inertia", Json(s.inertia)}};
}

inline const char* refs_key(Tier t) {
  return t == Tier::loop ? "ordered_edges" : "bounded_by";
}

inline const char* tier_key(Tier t) {
  switch (t) {
    case Tier::face: return "faces";
    case Tier::loop: return "loops";
    case Tier::edge: return "edges";
    case Tier::vertex: return "vertices";
  }
  return "";
}

inline Json parse_json(std::string_view bytes, const std::string& what) {
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    throw BrepError(BrepError::Category::syntax, what, e.what());
  }
}

inline Frame read_frame(const Json& j, const std::string& context) {
  JsonReader r(context);
  Frame f;
  f.origin = r.vec3(r.field(j, "origin"), "origin");
  f.x = r.vec3(r.field(j, "x"), "x");
  f.y = r.vec3(r.field(j, "y"), "y");
  f.z = r.vec3(r.field(j, "z"), "z");
  return f;
}

inline Json write_frame(const Frame& f) {
  return Json{{"origin", vec_json(f.origin)}, {"x", vec_json(f.x)}, {"y", vec_json(f.y)}, {"z", vec_json(f.z)}};
}

}  // namespace detail

/// Parses a part file without validating topology (schema only).
inline PartData parse_part_data(const Json& j) {
  detail::JsonReader r("part");
  PartData data;
  data.id = r.string(r.field(j, "id"), "id");
  data.part_frame = detail::read_frame(r.field(j, "part_frame"), data.id);
  for (Tier t : {Tier::vertex, Tier::edge, Tier::loop, Tier::face}) {
    const Json& list = r.field(j, detail::tier_key(t));
    if (!list.is_array()) r.fail(std::string("'") + detail::tier_key(t) + "' must be an array");
    for (const Json& item : list) {
      Entity e;
      e.id = r.string(r.field(item, "id"), "id");
      detail::JsonReader er(e.id);
      e.function = detail::read_function(er.field(item, "function"), e.id);
      e.summary = detail::read_summary(er.field(item, "summary"), e.id);
      if (t != Tier::vertex) e.refs = er.strings(er.field(item, detail::refs_key(t)), detail::refs_key(t));
      data.tier(t).push_back(std::move(e));
    }
  }
  return data;
}

inline Part load_part(std::string_view bytes) {
  return Part::from_data(parse_part_data(detail::parse_json(bytes, "part")));
}

inline Json part_to_json(const Part& part) {
  Json j;
  j["id"] = part.id();
  j["part_frame"] = detail::write_frame(part.part_frame());
  for (Tier t : {Tier::vertex, Tier::edge, Tier::loop, Tier::face}) {
    std::vector<const Entity*> sorted;
    for (const auto& e : part.tier(t)) sorted.push_back(&e);
    std::sort(sorted.begin(), sorted.end(), [](const Entity* a, const Entity* b) { return a->id < b->id; });
    Json list = Json::array();
    for (const Entity* e : sorted) {
      Json item{{"id", e->id}, {"function", detail::write_function(e->function)},
                {"summary", detail::write_summary(e->summary)}};
      if (t != Tier::vertex) item[detail::refs_key(t)] = e->refs;
      list.push_back(std::move(item));
    }
    j[detail::tier_key(t)] = std::move(list);
  }
  return j;
}

inline std::string save_part(const Part& part) { return part_to_json(part).dump(); }

}  // namespace automate
