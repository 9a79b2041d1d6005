#pragma once

// Mate location suggestions and mate type ranking for a part pair.

#include "automate/dataset/examples.hpp"
#include "automate/train/trainer.hpp"

#include <memory>
#include <mutex>
#include <shared_mutex>

namespace automate::service {

using model::SbgcnModel;
using train::PreparedExample;

inline constexpr int kDefaultK = 6;

/// Missing part, face or entity; maps to HTTP 404.
class NotFoundError : public std::runtime_error {
 public:
  NotFoundError(std::string id, const std::string& what)
      : std::runtime_error(what + " '" + id + "' not found"), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

/// Well-formed request that cannot be served; maps to HTTP 400/422.
class RequestError : public std::runtime_error {
 public:
  RequestError(const std::string& what, int status = 400) : std::runtime_error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct Suggestion {
  int rank = 0;
  int candidate = 0;  // index in a-major enumeration order
  double logit = 0;
  double score = 0;
  Mcf mcf_a, mcf_b;  // frames in the parts' own coordinates
  Mat4 transform_b = Mat4::Identity();
};

struct SuggestionResponse {
  std::vector<Suggestion> suggestions;
  int candidate_count = 0;
  bool truncated = false;
};

struct TypeProbability {
  MateType type = MateType::fastened;
  double probability = 0;
};

inline Json mcf_json(const Mcf& m) {
  return Json{{"origin_ref", m.origin_ref},
              {"origin_type", std::string(to_string(m.origin_type))},
              {"orient_ref", m.orient_ref},
              {"frame", detail::write_frame(m.resolved_frame)}};
}

inline Json mat4_json(const Mat4& m) {
  Json rows = Json::array();
  for (int r = 0; r < 4; ++r) rows.push_back(Json::array({m(r, 0), m(r, 1), m(r, 2), m(r, 3)}));
  return rows;
}

inline Json to_json(const SuggestionResponse& r) {
  Json list = Json::array();
  for (const auto& s : r.suggestions)
    list.push_back(Json{{"rank", s.rank},
                        {"candidate", s.candidate},
                        {"score", s.score},
                        {"mcf_a", mcf_json(s.mcf_a)},
                        {"mcf_b", mcf_json(s.mcf_b)},
                        {"frame_a", detail::write_frame(s.mcf_a.resolved_frame)},
                        {"frame_b", detail::write_frame(s.mcf_b.resolved_frame)},
                        {"transform_b", mat4_json(s.transform_b)}});
  return Json{{"suggestions", list}, {"candidate_count", r.candidate_count}, {"truncated", r.truncated}};
}

inline Json to_json(const std::vector<TypeProbability>& types) {
  Json list = Json::array();
  for (const auto& t : types)
    list.push_back(Json{{"type", std::string(to_string(t.type))}, {"probability", t.probability}});
  return Json{{"types", list}};
}

/// Parses an MCF given as {origin_ref, origin_type, orient_ref} or as the
/// triple [origin_ref, origin_type, orient_ref].
inline Mcf mcf_from_request(const Json& j) {
  if (j.is_array()) return dataset::mcf_from_array(j);
  if (!j.is_object()) throw RequestError("MCF must be an object or a triple");
  try {
    return dataset::mcf_from_array(Json::array({j.at("origin_ref"), j.at("origin_type"), j.at("orient_ref")}));
  } catch (const Json::exception& e) {
    throw RequestError(std::string("invalid MCF: ") + e.what());
  }
}

namespace detail {

inline void require_face(const Part& p, const std::string& face) {
  auto r = p.find(face);
  if (!r) throw NotFoundError(face, "face");
  if (r->tier != Tier::face) throw RequestError("'" + face + "' is not a face");
}

inline std::vector<double> softmax(const std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  std::vector<double> p;
  double s = 0;
  for (double v : z) s += std::exp(v - m);
  for (double v : z) p.push_back(std::exp(v - m) / s);
  return p;
}

}  // namespace detail

/// Pure scoring functions over immutable models.
class Suggester {
 public:
  Suggester(std::shared_ptr<SbgcnModel<float>> location, std::shared_ptr<SbgcnModel<float>> type = nullptr)
      : location_(std::move(location)), type_(std::move(type)) {
    if (location_ && location_->config().head != model::Head::location)
      throw std::invalid_argument("location model has a type head");
    if (type_ && type_->config().head != model::Head::type)
      throw std::invalid_argument("type model has a location head");
  }

  bool has_location_model() const { return location_ != nullptr; }
  bool has_type_model() const { return type_ != nullptr; }

  /// Scores every MCF pair of the two selected faces (capped in enumeration
  /// order) and returns the top k. Frames and transforms are in the parts'
  /// own, un-normalized coordinates.
  SuggestionResponse suggest(const Part& a, const Part& b, const std::string& face_a, const std::string& face_b,
                             int k = kDefaultK, bool merge_equivalent = false,
                             int max_candidates = dataset::kMaxCandidates) const {
    if (!location_) throw RequestError("no location model loaded", 503);
    if (k < 1) throw RequestError("k must be >= 1");
    detail::require_face(a, face_a);
    detail::require_face(b, face_b);
    const auto ma = enumerate_mcfs(a, face_a);
    const auto mb = enumerate_mcfs(b, face_b);
    if (ma.empty() || mb.empty())
      throw RequestError("selected face supports no MCFs: '" + (ma.empty() ? face_a : face_b) + "'", 422);

    const NormalizedPair n = normalize_pair(a, b);
    PreparedExample ex;
    ex.batch = train::batch_pair(n.a, n.b).batch;
    for (const auto& m : ma) ex.mcfs_a.push_back(model::mcf_nodes(ex.batch, 0, n.a, m));
    for (const auto& m : mb) ex.mcfs_b.push_back(model::mcf_nodes(ex.batch, 1, n.b, m));
    const long total = static_cast<long>(ma.size()) * static_cast<long>(mb.size());
    SuggestionResponse out;
    out.candidate_count = static_cast<int>(std::min<long>(total, max_candidates));
    out.truncated = total > max_candidates;
    for (int c = 0; c < out.candidate_count; ++c) {
      ex.cand_a.push_back(c / static_cast<int>(mb.size()));
      ex.cand_b.push_back(c % static_cast<int>(mb.size()));
    }

    const auto logits = train::predict(*location_, ex);
    const auto order = train::order_descending(logits);
    std::vector<int> kept;
    for (int c : order) {
      if (static_cast<int>(kept.size()) == k) break;
      const Mcf& xa = ma[ex.cand_a[c]];
      const Mcf& xb = mb[ex.cand_b[c]];
      if (merge_equivalent && std::any_of(kept.begin(), kept.end(), [&](int o) {
            return frames_equivalent(a, xa.resolved_frame, ma[ex.cand_a[o]].resolved_frame, n.scale) &&
                   frames_equivalent(b, xb.resolved_frame, mb[ex.cand_b[o]].resolved_frame, n.scale);
          }))
        continue;
      kept.push_back(c);
      Suggestion s;
      s.rank = static_cast<int>(kept.size());
      s.candidate = c;
      s.logit = logits[c];
      s.score = nn::stable_sigmoid(logits[c]);
      s.mcf_a = xa;
      s.mcf_b = xb;
      s.transform_b = align_transform(xa.resolved_frame, xb.resolved_frame);
      out.suggestions.push_back(std::move(s));
    }
    return out;
  }

  /// Softmax over the type head for one MCF pair, most likely first (ties
  /// by type order).
  std::vector<TypeProbability> rank_types(const Part& a, const Part& b, const Mcf& mcf_a, const Mcf& mcf_b) const {
    if (!type_) throw RequestError("no mate type model loaded", 503);
    auto check = [](const Part& p, const Mcf& m) {
      for (const std::string* id : {&m.origin_ref, &m.orient_ref})
        if (!p.find(*id)) throw NotFoundError(*id, "entity");
      try {
        resolve_frame(p, m);
      } catch (const BrepError& e) {
        throw RequestError(e.what());
      }
    };
    check(a, mcf_a);
    check(b, mcf_b);
    const NormalizedPair n = normalize_pair(a, b);
    const model::GraphBatch batch = train::batch_pair(n.a, n.b).batch;
    nn::Tape<float> t;
    nn::Binding<float> bind(t, type_->store());
    const auto& z = t.value(train::type_logits(*type_, bind, batch, model::mcf_nodes(batch, 0, n.a, mcf_a),
                                                model::mcf_nodes(batch, 1, n.b, mcf_b), false));
    const auto p = detail::softmax(std::vector<double>(z.data.begin(), z.data.end()));
    std::vector<TypeProbability> out;
    for (int i : train::order_descending(p)) out.push_back(TypeProbability{static_cast<MateType>(i), p[i]});
    return out;
  }

 private:
  // equivalence tolerances are in normalized units
  static bool frames_equivalent(const Part&, const Frame& x, const Frame& y, double scale) {
    return mcfs_equivalent(x, y, kDefaultTolPos / scale, kDefaultTolAng);
  }

  std::shared_ptr<SbgcnModel<float>> location_;
  std::shared_ptr<SbgcnModel<float>> type_;
};

/// Parts by id; single writer, last write wins.
class PartStore {
 public:
  void put(Part p) {
    auto ptr = std::make_shared<const Part>(std::move(p));
    std::unique_lock lock(mutex_);
    parts_[ptr->id()] = std::move(ptr);
  }

  std::shared_ptr<const Part> get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = parts_.find(id);
    if (it == parts_.end()) throw NotFoundError(id, "part");
    return it->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return parts_.size();
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const Part>> parts_;
};

}  // namespace automate::service
