#pragma once

#include "automate/dataset/fingerprint.hpp"
#include "automate/dataset/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace automate::dataset {

struct FaceCountFilter {
  int min_faces = 3;
  int max_faces = 200;
};

struct MateRecord {
  std::string assembly;
  int mate = 0;  // index into the assembly's mates
  std::string part_a;
  std::string part_b;
  std::string key;
};

struct DedupStats {
  int parts_in = 0, parts_out = 0;
  int assemblies_in = 0, assemblies_out = 0;
  int mates_in = 0, mates_out = 0;
  int incomplete_mates = 0;
  int multi_mate_pairs = 0;  // mates removed because their instance pair had several
  int face_count_filtered = 0;
  int duplicate_mates = 0;
  int duplicate_assemblies = 0;
  int empty_assemblies = 0;

  Json to_json() const {
    return Json{{"parts_in", parts_in},
                {"parts_out", parts_out},
                {"assemblies_in", assemblies_in},
                {"assemblies_out", assemblies_out},
                {"mates_in", mates_in},
                {"mates_out", mates_out},
                {"incomplete_mates", incomplete_mates},
                {"multi_mate_pairs", multi_mate_pairs},
                {"face_count_filtered", face_count_filtered},
                {"duplicate_mates", duplicate_mates},
                {"duplicate_assemblies", duplicate_assemblies},
                {"empty_assemblies", empty_assemblies}};
  }
};

struct DedupResult {
  RawCorpus corpus;  // unique parts and assemblies, instances remapped to representatives
  std::vector<MateRecord> mates;
  std::map<std::string, std::string> fingerprints;  // part id -> fingerprint key
  DedupStats stats;
};

namespace detail {

/// Id-independent key of one mate side: part fingerprint, origin type, the
/// kinds of the referenced entities and the quantized resolved frame.
inline std::optional<std::string> mcf_key(const Part& part, const std::string& fp, const Mcf& mcf, double q) {
  auto origin = part.find(mcf.origin_ref);
  auto orient = part.find(mcf.orient_ref);
  if (!origin || !orient) return std::nullopt;
  Frame f;
  try {
    f = resolve_frame(part, mcf);
  } catch (const BrepError&) {
    return std::nullopt;
  }
  std::string s = fp + '#' + std::string(to_string(mcf.origin_type)) + ':' +
                  std::string(to_string(part.entity(*origin).function.kind)) + ':' +
                  std::string(to_string(part.entity(*orient).function.kind));
  for (const Vec3* v : {&f.origin, &f.z})
    for (int i = 0; i < 3; ++i) s += ',' + std::to_string(std::llround((*v)[i] / q));
  return s;
}

}  // namespace detail

/// Collapses parts by fingerprint, then cleans and deduplicates mates and
/// assemblies. Representatives are the first parts met in assembly order.
inline DedupResult dedup(const RawCorpus& in, const FaceCountFilter& filter = {}, double q = kFingerprintStep) {
  DedupResult out;
  auto& st = out.stats;
  st.parts_in = static_cast<int>(in.parts.size());
  st.assemblies_in = static_cast<int>(in.assemblies.size());

  std::map<std::string, std::string> key_of;  // part id -> fingerprint key
  for (const auto& [id, part] : in.parts) key_of[id] = fingerprint(part, q).key();

  std::map<std::string, std::string> rep_of_key;
  std::vector<std::string> order;
  for (const auto& a : in.assemblies)
    for (const auto& i : a.instances)
      if (in.parts.count(i.part)) order.push_back(i.part);
  for (const auto& [id, part] : in.parts) order.push_back(id);
  for (const auto& id : order) rep_of_key.emplace(key_of[id], id);

  auto passes = [&](const Part& p) {
    const int n = static_cast<int>(p.faces().size());
    return n >= filter.min_faces && n <= filter.max_faces;
  };
  for (const auto& [key, id] : rep_of_key) {
    const Part& p = in.parts.at(id);
    if (passes(p)) {
      out.corpus.parts.emplace(id, p);
      out.fingerprints[id] = key;
    }
  }

  std::set<std::string> seen_assemblies, seen_mates;
  for (const Assembly& src : in.assemblies) {
    st.mates_in += static_cast<int>(src.mates.size());
    Assembly a;
    a.id = src.id;
    for (Instance i : src.instances) {
      auto it = key_of.find(i.part);
      if (it != key_of.end()) i.part = rep_of_key.at(it->second);
      a.instances.push_back(std::move(i));
    }

    std::map<std::pair<std::string, std::string>, int> pair_count;
    for (const Mate& m : src.mates) ++pair_count[std::minmax(m.a, m.b)];

    std::vector<std::string> keys;
    for (const Mate& m : src.mates) {
      const Instance* ia = a.instance(m.a);
      const Instance* ib = a.instance(m.b);
      if (!ia || !ib || m.a == m.b || !in.parts.count(ia->part) || !in.parts.count(ib->part)) {
        ++st.incomplete_mates;
        continue;
      }
      if (pair_count[std::minmax(m.a, m.b)] > 1) {
        ++st.multi_mate_pairs;
        continue;
      }
      const Part& pa = in.parts.at(ia->part);
      const Part& pb = in.parts.at(ib->part);
      auto ka = detail::mcf_key(pa, key_of[ia->part], m.mcf_a, q);
      auto kb = detail::mcf_key(pb, key_of[ib->part], m.mcf_b, q);
      if (!ka || !kb) {
        ++st.incomplete_mates;
        continue;
      }
      if (!passes(pa) || !passes(pb)) {
        ++st.face_count_filtered;
        continue;
      }
      if (*kb < *ka) std::swap(*ka, *kb);
      keys.push_back(*ka + "||" + *kb + "||" + std::string(to_string(m.mate_type)));
      a.mates.push_back(m);
    }

    if (a.mates.empty()) {
      ++st.empty_assemblies;
      continue;
    }
    std::vector<std::string> multiset = keys;
    std::sort(multiset.begin(), multiset.end());
    std::string asm_key;
    for (const auto& k : multiset) asm_key += k + '\n';
    if (!seen_assemblies.insert(asm_key).second) {
      ++st.duplicate_assemblies;
      continue;
    }
    for (std::size_t k = 0; k < a.mates.size(); ++k) {
      if (!seen_mates.insert(keys[k]).second) {
        ++st.duplicate_mates;
        continue;
      }
      out.mates.push_back({a.id, static_cast<int>(k), a.instance(a.mates[k].a)->part,
                           a.instance(a.mates[k].b)->part, keys[k]});
    }
    out.corpus.assemblies.push_back(std::move(a));
  }
  st.parts_out = static_cast<int>(out.corpus.parts.size());
  st.assemblies_out = static_cast<int>(out.corpus.assemblies.size());
  st.mates_out = static_cast<int>(out.mates.size());
  return out;
}

}  // namespace automate::dataset
