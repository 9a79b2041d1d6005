#pragma once

// Finite-difference check of the full location loss w.r.t. model parameters.

#include "automate/nn/gradcheck.hpp"
#include "automate/train/trainer.hpp"

namespace automate::train {

struct ComposedGradCheck {
  double max_rel_error = 0;  // worst parameter tensor
  std::string worst;
  int entries = 0;
  int skipped = 0;  // samples whose difference interval straddled a kink
};

/// Batch-norm runs in eval mode. Node features get a small seeded jitter so
/// exactly symmetric neighbors do not tie inside segment-max. Up to
/// 3 * per_tensor entries are drawn per tensor until per_tensor smooth ones
/// are found.
inline ComposedGradCheck composed_location_gradcheck(const PreparedExample& example, const ModelConfig& cfg,
                                                     std::uint64_t seed, int per_tensor = 4, double h = 1e-6) {
  PreparedExample ex = example;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  for (double& v : ex.batch.features) v += jitter(rng);

  ModelConfig c = cfg;
  c.head = Head::location;
  c.inference_norm = model::InferenceNorm::running;
  SbgcnModel<double> m(c, seed);
  // non-trivial running statistics
  for (auto& b : m.store().buffers())
    for (double& v : b.value.data) v = b.name.ends_with("running_var") ? 0.5 + jitter(rng) * 10 : jitter(rng) * 10;

  auto loss = [&] {
    nn::Tape<double> t;
    nn::Binding<double> bind(t, m.store());
    return t.value(location_loss(t, location_logits(m, bind, ex, false), ex.positives)).data[0];
  };
  {
    nn::Tape<double> t;
    nn::Binding<double> bind(t, m.store());
    t.backward(location_loss(t, location_logits(m, bind, ex, false), ex.positives));
    bind.accumulate();
  }

  ComposedGradCheck out;
  for (auto& p : m.store().parameters()) {
    std::vector<double> analytic, numeric;
    std::uniform_int_distribution<std::size_t> pick(0, p.value.size() - 1);
    for (int draw = 0; draw < 3 * per_tensor && static_cast<int>(analytic.size()) < per_tensor; ++draw) {
      const std::size_t i = pick(rng);
      const auto d = nn::smooth_central_difference(p.value.data[i], loss, h);
      if (!d) {
        ++out.skipped;
        continue;
      }
      analytic.push_back(p.grad.data[i]);
      numeric.push_back(*d);
      ++out.entries;
    }
    const double e = nn::relative_error(analytic, numeric);
    if (e >= out.max_rel_error) {
      out.max_rel_error = e;
      out.worst = p.name;
    }
  }
  return out;
}

}  // namespace automate::train
