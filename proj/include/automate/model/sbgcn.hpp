#pragma once

// Structured BREP graph convolution network and the siamese mate scorer.

#include "automate/graph.hpp"
#include "automate/hash.hpp"
#include "automate/mcf.hpp"
#include "automate/nn/params.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace automate::model {

using nn::Binding;
using nn::Matrix;
using nn::ParamStore;
using nn::Tape;
using nn::Var;

enum class FeatureSet { all, fn_type_only };
enum class Variant { sbgcn, plain };
enum class Head { location, type };
/// Normalization statistics used outside training.
enum class InferenceNorm { batch, running };

inline std::string_view to_string(FeatureSet f) { return f == FeatureSet::all ? "all" : "fn_type_only"; }
inline std::string_view to_string(Variant v) { return v == Variant::sbgcn ? "sbgcn" : "plain"; }
inline std::string_view to_string(Head h) { return h == Head::location ? "location" : "type"; }
inline std::string_view to_string(InferenceNorm n) { return n == InferenceNorm::batch ? "batch" : "running"; }

inline std::optional<FeatureSet> feature_set_from_string(std::string_view s) {
  if (s == "all") return FeatureSet::all;
  if (s == "fn_type_only" || s == "fn-type") return FeatureSet::fn_type_only;
  return std::nullopt;
}
inline std::optional<Variant> variant_from_string(std::string_view s) {
  if (s == "sbgcn") return Variant::sbgcn;
  if (s == "plain") return Variant::plain;
  return std::nullopt;
}
inline std::optional<Head> head_from_string(std::string_view s) {
  if (s == "location") return Head::location;
  if (s == "type") return Head::type;
  return std::nullopt;
}

struct ModelConfig {
  int width = 64;
  int inner_layers = 6;
  FeatureSet features = FeatureSet::all;
  Variant variant = Variant::sbgcn;
  Head head = Head::location;
  InferenceNorm inference_norm = InferenceNorm::batch;

  int input_dim() const { return features == FeatureSet::all ? automate::features::kDim : automate::features::kFnTypeDim; }
  int output_dim() const { return head == Head::location ? 1 : kMateTypeCount; }
  int mcf_dim() const { return 3 * width + kOriginTypeCount; }

  void validate() const {
    if (width < 1) throw std::invalid_argument("model width must be >= 1");
    if (inner_layers < 0) throw std::invalid_argument("inner layer count must be >= 0");
  }

  Json to_json() const {
    return Json{{"width", width},
                {"inner_layers", inner_layers},
                {"features", std::string(to_string(features))},
                {"variant", std::string(to_string(variant))},
                {"head", std::string(to_string(head))},
                {"inference_norm", std::string(to_string(inference_norm))}};
  }

  static ModelConfig from_json(const Json& j) {
    ModelConfig c;
    c.width = j.at("width").get<int>();
    c.inner_layers = j.at("inner_layers").get<int>();
    auto f = feature_set_from_string(j.at("features").get<std::string>());
    auto v = variant_from_string(j.at("variant").get<std::string>());
    auto h = head_from_string(j.at("head").get<std::string>());
    if (!f || !v || !h) throw std::invalid_argument("invalid model config");
    c.features = *f;
    c.variant = *v;
    c.head = *h;
    const std::string norm = j.value("inference_norm", "batch");
    if (norm != "batch" && norm != "running") throw std::invalid_argument("invalid model config");
    c.inference_norm = norm == "batch" ? InferenceNorm::batch : InferenceNorm::running;
    c.validate();
    return c;
  }

  std::string hash() const { return hex64(fnv1a64(to_json().dump())); }
};

/// Relation kinds in layer order of the upward and downward passes.
enum class RelationKind : int { ve, el, lf, ff, fl, le, ev };
inline constexpr int kRelationKinds = 7;

inline Tier destination_tier(RelationKind k) {
  switch (k) {
    case RelationKind::ve: return Tier::edge;
    case RelationKind::el: return Tier::loop;
    case RelationKind::lf: return Tier::face;
    case RelationKind::ff: return Tier::face;
    case RelationKind::fl: return Tier::loop;
    case RelationKind::le: return Tier::edge;
    case RelationKind::ev: return Tier::vertex;
  }
  return Tier::face;
}

/// Disjoint union of one or more part graphs with global node numbering
/// (per part: faces, loops, edges, vertices).
struct GraphBatch {
  struct RelationIndex {
    std::vector<int> src;        // global node
    std::vector<int> dst_local;  // index into tier_nodes[destination tier]
  };

  int nodes = 0;
  std::vector<double> features;                   // nodes × kDim
  std::array<std::vector<int>, 4> tier_nodes;     // global ids per tier
  std::array<RelationIndex, kRelationKinds> relations;
  std::vector<int> part_begin;                    // parts + 1 offsets
  std::vector<std::array<int, 4>> tier_begin;     // per part, global start of each tier

  int parts() const { return static_cast<int>(tier_begin.size()); }
  int node(int part, Tier t, int local) const { return tier_begin.at(part)[static_cast<int>(t)] + local; }
};

inline GraphBatch batch_graphs(const std::vector<const StructuredBrepGraph*>& graphs) {
  GraphBatch b;
  b.part_begin.push_back(0);
  // position of each global node inside its tier list
  std::vector<int> tier_pos;
  for (const StructuredBrepGraph* g : graphs) {
    std::array<int, 4> begin{};
    for (Tier t : {Tier::face, Tier::loop, Tier::edge, Tier::vertex}) {
      begin[static_cast<int>(t)] = b.nodes;
      for (int i = 0; i < g->count(t); ++i) {
        tier_pos.push_back(static_cast<int>(b.tier_nodes[static_cast<int>(t)].size()));
        b.tier_nodes[static_cast<int>(t)].push_back(b.nodes + i);
      }
      const auto& f = g->features[static_cast<int>(t)];
      b.features.insert(b.features.end(), f.begin(), f.end());
      b.nodes += g->count(t);
    }
    b.tier_begin.push_back(begin);
    b.part_begin.push_back(b.nodes);

    auto add = [&](RelationKind k, const std::vector<Relation>& rel, Tier src, Tier dst) {
      auto& r = b.relations[static_cast<int>(k)];
      for (auto [s, d] : rel) {
        r.src.push_back(begin[static_cast<int>(src)] + s);
        r.dst_local.push_back(tier_pos[begin[static_cast<int>(dst)] + d]);
      }
    };
    add(RelationKind::ve, g->vertex_edge, Tier::vertex, Tier::edge);
    add(RelationKind::el, g->edge_loop, Tier::edge, Tier::loop);
    add(RelationKind::lf, g->loop_face, Tier::loop, Tier::face);
    std::vector<Relation> ff;
    for (auto [i, j] : g->face_face) {
      ff.emplace_back(i, j);
      ff.emplace_back(j, i);
    }
    std::sort(ff.begin(), ff.end());
    add(RelationKind::ff, ff, Tier::face, Tier::face);
    add(RelationKind::fl, g->face_loop, Tier::face, Tier::loop);
    add(RelationKind::le, g->loop_edge, Tier::loop, Tier::edge);
    add(RelationKind::ev, g->edge_vertex, Tier::edge, Tier::vertex);
  }
  return b;
}

/// MCF in graph coordinates: global node ids of its references.
struct McfNodes {
  int origin = 0;
  int orient = 0;
  OriginType type = OriginType::centroid;
};

inline McfNodes mcf_nodes(const GraphBatch& b, int part, const Part& p, const Mcf& m) {
  const EntityRef o = p.require(m.origin_ref);
  const EntityRef r = p.require(m.orient_ref);
  return {b.node(part, o.tier, o.index), b.node(part, r.tier, r.index), m.origin_type};
}

template <class T>
class SbgcnModel {
 public:
  struct Linear {
    int w = -1, b = -1;
  };
  struct Block {  // linear + batchnorm + relu
    Linear lin;
    int gamma = -1, beta = -1, mean = -1, var = -1;
  };
  struct Encoded {
    Var nodes;   // N × width
    Var global;  // parts × width
  };

  explicit SbgcnModel(ModelConfig cfg, std::uint64_t seed = 0) : cfg_(cfg) {
    cfg_.validate();
    std::mt19937_64 rng(seed);
    const int w = cfg_.width;
    input_ = block("input", cfg_.input_dim(), w, rng);
    if (cfg_.variant == Variant::sbgcn) {
      auto conv = [&](RelationKind k, const std::string& name) { layers_.push_back({k, block(name, 2 * w, w, rng)}); };
      conv(RelationKind::ve, "conv.ve");
      conv(RelationKind::el, "conv.el");
      conv(RelationKind::lf, "conv.lf");
      for (int i = 0; i < cfg_.inner_layers; ++i) conv(RelationKind::ff, "conv.ff" + std::to_string(i));
      conv(RelationKind::fl, "conv.fl");
      conv(RelationKind::le, "conv.le");
      conv(RelationKind::ev, "conv.ev");
    }
    hidden_ = linear("head.hidden", 2 * cfg_.mcf_dim(), w, rng);
    out_ = linear("head.out", w, cfg_.output_dim(), rng);
  }

  const ModelConfig& config() const { return cfg_; }
  ParamStore<T>& store() { return store_; }
  const ParamStore<T>& store() const { return store_; }

  Var block_forward(Binding<T>& bind, const Block& blk, Var x, bool train) {
    auto& t = bind.tape();
    Var h = nn::add_bias(t, nn::matmul(t, x, bind(blk.lin.w)), bind(blk.lin.b));
    // outside training, `batch` normalizes with this batch's statistics and leaves the buffers alone
    const bool batch_stats = train || cfg_.inference_norm == InferenceNorm::batch;
    h = nn::batchnorm(t, h, bind(blk.gamma), bind(blk.beta), store_.buffer(blk.mean).value,
                      store_.buffer(blk.var).value, nn::BatchNormOptions{batch_stats, 0.1, 1e-5, train});
    return nn::relu(t, h);
  }

  /// Node embeddings after the full layer stack and per-part mean pools.
  Encoded encode(Binding<T>& bind, const GraphBatch& g, bool train) {
    return encode_from(bind, g, bind.tape().constant(input_features(g), "features"), train);
  }

  /// Node feature matrix restricted to the configured feature set.
  Matrix<T> input_features(const GraphBatch& g) const {
    const int in = cfg_.input_dim();
    Matrix<T> x(g.nodes, in);
    for (int n = 0; n < g.nodes; ++n)
      for (int c = 0; c < in; ++c) x(n, c) = static_cast<T>(g.features[static_cast<std::size_t>(n) * features::kDim + c]);
    return x;
  }

  Encoded encode_from(Binding<T>& bind, const GraphBatch& g, Var x, bool train) {
    auto& t = bind.tape();
    if (t.value(x).rows != g.nodes || t.value(x).cols != cfg_.input_dim())
      throw nn::ShapeError("input feature width does not match the model config");
    Var h = block_forward(bind, input_, x, train);

    for (const auto& [kind, blk] : layers_) {
      const auto& dst = g.tier_nodes[static_cast<int>(destination_tier(kind))];
      if (dst.empty()) continue;
      const auto& rel = g.relations[static_cast<int>(kind)];
      const int nd = static_cast<int>(dst.size());
      Var hd = nn::gather_rows(t, h, dst);
      Var sigma;
      if (rel.src.empty()) {
        sigma = t.constant(Matrix<T>(nd, cfg_.width), "empty_neighborhood");
      } else {
        Var diff = nn::sub(t, nn::gather_rows(t, h, rel.src), nn::gather_rows(t, hd, rel.dst_local));
        sigma = nn::segment_max(t, diff, rel.dst_local, nd);
      }
      Var z = block_forward(bind, blk, nn::concat_cols(t, hd, sigma), train);
      h = nn::add(t, h, nn::scatter_rows(t, z, dst, g.nodes));
    }

    Matrix<T> pool(g.parts(), g.nodes);
    for (int p = 0; p < g.parts(); ++p) {
      const int b = g.part_begin[p], e = g.part_begin[p + 1];
      for (int n = b; n < e; ++n) pool(p, n) = T(1) / T(e - b);
    }
    Var global = nn::matmul(t, t.constant(std::move(pool), "meanpool"), h);
    return {h, global};
  }

  /// concat(h_origin, h_orient, one-hot origin type, H_part): M × (3·width + 7).
  Var mcf_features(Binding<T>& bind, const Encoded& e, int part, const std::vector<McfNodes>& mcfs) {
    auto& t = bind.tape();
    std::vector<int> origin, orient;
    Matrix<T> onehot(static_cast<int>(mcfs.size()), kOriginTypeCount);
    for (std::size_t i = 0; i < mcfs.size(); ++i) {
      origin.push_back(mcfs[i].origin);
      orient.push_back(mcfs[i].orient);
      onehot(static_cast<int>(i), static_cast<int>(mcfs[i].type)) = T(1);
    }
    Var f = nn::concat_cols(t, nn::gather_rows(t, e.nodes, origin), nn::gather_rows(t, e.nodes, orient));
    f = nn::concat_cols(t, f, t.constant(std::move(onehot), "origin_type"));
    return nn::concat_cols(t, f, nn::gather_rows(t, e.global, std::vector<int>(mcfs.size(), part)));
  }

  /// Output MLP over ordered pairs (fa[ia[i]], fb[ib[i]]): C × output_dim.
  Var pair_logits(Binding<T>& bind, Var fa, Var fb, const std::vector<int>& ia, const std::vector<int>& ib) {
    auto& t = bind.tape();
    Var x = nn::concat_cols(t, nn::gather_rows(t, fa, ia), nn::gather_rows(t, fb, ib));
    Var h = nn::relu(t, nn::add_bias(t, nn::matmul(t, x, bind(hidden_.w)), bind(hidden_.b)));
    return nn::add_bias(t, nn::matmul(t, h, bind(out_.w)), bind(out_.b));
  }

  std::size_t parameter_count() const { return store_.parameter_count(); }

 private:
  Linear linear(const std::string& name, int in, int out, std::mt19937_64& rng) {
    Linear l;
    l.w = store_.add_parameter(name + ".weight", nn::uniform_init<T>(in, out, in, rng));
    l.b = store_.add_parameter(name + ".bias", nn::uniform_init<T>(1, out, in, rng));
    return l;
  }

  Block block(const std::string& name, int in, int out, std::mt19937_64& rng) {
    Block b;
    b.lin = linear(name + ".linear", in, out, rng);
    b.gamma = store_.add_parameter(name + ".bn.gamma", Matrix<T>(1, out, T(1)));
    b.beta = store_.add_parameter(name + ".bn.beta", Matrix<T>(1, out, T(0)));
    b.mean = store_.add_buffer(name + ".bn.running_mean", Matrix<T>(1, out, T(0)));
    b.var = store_.add_buffer(name + ".bn.running_var", Matrix<T>(1, out, T(1)));
    return b;
  }

  ModelConfig cfg_;
  ParamStore<T> store_;
  Block input_;
  std::vector<std::pair<RelationKind, Block>> layers_;
  Linear hidden_, out_;
};

}  // namespace automate::model
