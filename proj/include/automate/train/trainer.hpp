#pragma once

// Training loop, evaluation, metrics reports and checkpoints.

#include "automate/train/baselines.hpp"
#include "automate/train/losses.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace automate::train {

using model::Head;
using model::ModelConfig;
using model::SbgcnModel;

inline int k_range(Head task) { return task == Head::location ? 10 : kMateTypeCount; }

struct TrainConfig {
  ModelConfig model;
  int epochs = 20;
  int batch_size = 1;  // examples per optimizer step
  std::uint64_t seed = 0;
  nn::AdamOptions adam;
  std::optional<double> stop_at_score;  // end training once val_score reaches it

  void validate() const {
    model.validate();
    if (epochs < 1 || batch_size < 1) throw std::invalid_argument("epochs and batch size must be positive");
  }

  Json to_json() const {
    return Json{{"model", model.to_json()},
                {"epochs", epochs},
                {"batch_size", batch_size},
                {"seed", seed},
                {"lr", adam.lr},
                {"betas", {adam.beta1, adam.beta2}},
                {"eps", adam.eps},
                {"stop_at_score", stop_at_score ? Json(*stop_at_score) : Json()}};
  }
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0;
  double val_score = 0;  // mean hit@1..k
  double val_ndcg = 0;

  Json to_json() const {
    return Json{{"epoch", epoch}, {"train_loss", train_loss}, {"val_score", val_score}, {"val_ndcg_star", val_ndcg}};
  }
};

// ---------------------------------------------------------------- forward

template <class T>
nn::Var location_logits(SbgcnModel<T>& m, nn::Binding<T>& bind, const PreparedExample& ex, bool train) {
  auto e = m.encode(bind, ex.batch, train);
  nn::Var fa = m.mcf_features(bind, e, 0, ex.mcfs_a);
  nn::Var fb = m.mcf_features(bind, e, 1, ex.mcfs_b);
  return m.pair_logits(bind, fa, fb, ex.cand_a, ex.cand_b);
}

template <class T>
nn::Var type_logits(SbgcnModel<T>& m, nn::Binding<T>& bind, const GraphBatch& batch, const McfNodes& a,
                    const McfNodes& b, bool train) {
  auto e = m.encode(bind, batch, train);
  nn::Var fa = m.mcf_features(bind, e, 0, {a});
  nn::Var fb = m.mcf_features(bind, e, 1, {b});
  return m.pair_logits(bind, fa, fb, {0}, {0});
}

/// Loss of one example; accumulates parameter gradients when `train`.
template <class T>
double example_step(SbgcnModel<T>& m, const PreparedExample& ex, bool train) {
  nn::Tape<T> t;
  nn::Binding<T> bind(t, m.store());
  nn::Var loss;
  if (m.config().head == Head::location)
    loss = location_loss(t, location_logits(m, bind, ex, train), ex.positives);
  else
    loss = type_loss(t, type_logits(m, bind, ex.batch, ex.gt_a, ex.gt_b, train), static_cast<int>(ex.mate_type));
  const double value = static_cast<double>(t.value(loss).data[0]);
  if (train) {
    t.backward(loss);
    bind.accumulate();
  }
  return value;
}

/// Eval-mode output row(s) as doubles: C logits (location) or 8 (type).
template <class T>
std::vector<double> predict(SbgcnModel<T>& m, const PreparedExample& ex) {
  nn::Tape<T> t;
  nn::Binding<T> bind(t, m.store());
  nn::Var out = m.config().head == Head::location ? location_logits(m, bind, ex, false)
                                                  : type_logits(m, bind, ex.batch, ex.gt_a, ex.gt_b, false);
  const auto& v = t.value(out).data;
  return std::vector<double>(v.begin(), v.end());
}

template <class T>
Ranking rank_example(SbgcnModel<T>& m, const PreparedExample& ex) {
  const auto scores = predict(m, ex);
  if (m.config().head == Head::location) return rank_scores(scores, ex.positives);
  return rank_scores(scores, {static_cast<int>(ex.mate_type)});
}

template <class T>
std::vector<int> first_correct_ranks(SbgcnModel<T>& m, const std::vector<PreparedExample>& examples) {
  std::vector<int> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(rank_example(m, ex).first_correct);
  return out;
}

// ---------------------------------------------------------------- training

template <class T>
struct TrainResult {
  std::unique_ptr<SbgcnModel<T>> best;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_score = -1;
};

/// Per-epoch seeded shuffle, one optimizer step per `batch_size` examples,
/// validation after every epoch; the best epoch's weights are kept (ties
/// keep the earlier epoch). `start` optionally resumes from a model.
template <class T>
TrainResult<T> train_model(const TrainConfig& cfg, const std::vector<PreparedExample>& train_set,
                           const std::vector<PreparedExample>& val_set,
                           const std::function<void(const EpochRecord&)>& log = {},
                           const SbgcnModel<T>* start = nullptr, int start_epoch = 0) {
  cfg.validate();
  if (train_set.empty()) throw std::invalid_argument("training set is empty");
  const std::vector<PreparedExample>& val = val_set.empty() ? train_set : val_set;
  SbgcnModel<T> m(cfg.model, cfg.seed);
  if (start) {
    if (start->config().hash() != cfg.model.hash()) throw std::invalid_argument("config mismatch on resume");
    m.store() = start->store();
  }
  TrainResult<T> out;
  out.best = std::make_unique<SbgcnModel<T>>(cfg.model, cfg.seed);
  std::mt19937_64 rng(cfg.seed ^ 0x5851f42d4c957f2dULL);
  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = start_epoch + 1; epoch <= start_epoch + cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0;
    int pending = 0;
    auto flush = [&] {
      if (pending == 0) return;
      if (pending > 1)
        for (auto& p : m.store().parameters()) p.grad.map() /= T(pending);
      nn::adam_step(m.store(), cfg.adam);
      pending = 0;
    };
    for (int i : order) {
      total += example_step(m, train_set[i], true);
      if (++pending == cfg.batch_size) flush();
    }
    flush();

    const auto ranks = first_correct_ranks(m, val);
    EpochRecord rec{epoch, total / static_cast<double>(train_set.size()), mean_hit(ranks, k_range(cfg.model.head)),
                    ndcg_star(ranks)};
    out.history.push_back(rec);
    if (rec.val_score > out.best_score) {
      out.best_score = rec.val_score;
      out.best_epoch = epoch;
      out.best->store() = m.store();
    }
    if (log) log(rec);
    if (cfg.stop_at_score && rec.val_score >= *cfg.stop_at_score) break;
  }
  return out;
}

// ---------------------------------------------------------------- reports

inline Json metric_block(const std::vector<int>& ranks, Head task) {
  Json j{{"hit_at_k", hit_curve(ranks, k_range(task))}, {"ndcg_star", ndcg_star(ranks)}, {"examples", ranks.size()}};
  if (task == Head::location)
    j["accuracy_at_6"] = hit_at_k(ranks, 6);
  else
    j["accuracy"] = hit_at_k(ranks, 1);
  return j;
}

struct BaselineOptions {
  std::uint64_t seed = 0;
  OriginTypeTable origin_types;
  LabelDistribution labels;
};

inline Json baseline_blocks(const std::vector<PreparedExample>& examples, Head task, const BaselineOptions& opt) {
  Json out = Json::object();
  if (task == Head::location) {
    std::vector<int> rnd, ot, snap;
    for (const auto& ex : examples) {
      rnd.push_back(random_baseline(ex, opt.seed).first_correct);
      ot.push_back(origin_type_baseline(ex, opt.origin_types).first_correct);
      snap.push_back(snap_to_selection_baseline(ex).first_correct);
    }
    out["random"] = metric_block(rnd, task);
    out["origin_type"] = metric_block(ot, task);
    out["snap_to_selection"] = metric_block(snap, task);
  } else {
    std::vector<int> ld;
    for (const auto& ex : examples) ld.push_back(opt.labels.rank(ex.mate_type).first_correct);
    out["label_distribution"] = metric_block(ld, task);
  }
  return out;
}

/// {task, split, hit_at_k, ndcg_star, accuracy_at_6 | accuracy, baselines, config_hash}.
template <class T>
Json evaluate(SbgcnModel<T>& m, const std::vector<PreparedExample>& examples, const std::string& split,
              const BaselineOptions& baselines) {
  const Head task = m.config().head;
  Json j = metric_block(first_correct_ranks(m, examples), task);
  j["task"] = std::string(model::to_string(task));
  j["split"] = split;
  j["config_hash"] = m.config().hash();
  j["baselines"] = baseline_blocks(examples, task, baselines);
  return j;
}

// ---------------------------------------------------------------- checkpoints

template <class T>
Json save_checkpoint(const SbgcnModel<T>& m, Json metadata) {
  metadata["model"] = m.config().to_json();
  metadata["config_hash"] = m.config().hash();
  return nn::checkpoint_json(m.store(), metadata);
}

/// Rebuilds the model named by the checkpoint metadata. Throws when the
/// embedded config hash does not match the config.
template <class T>
std::unique_ptr<SbgcnModel<T>> load_model(const Json& checkpoint) {
  const Json& meta = checkpoint.at("metadata");
  const ModelConfig cfg = ModelConfig::from_json(meta.at("model"));
  if (meta.at("config_hash").get<std::string>() != cfg.hash())
    throw std::runtime_error("checkpoint config hash mismatch");
  auto m = std::make_unique<SbgcnModel<T>>(cfg);
  nn::load_checkpoint(m->store(), checkpoint);
  return m;
}

}  // namespace automate::train
