#pragma once

#include "automate/nn/tape.hpp"

#include <stdexcept>
#include <vector>

namespace automate::train {

/// Per-candidate targets and weights: positives get #neg / #pos, negatives 1.
/// An example with no negatives weights every positive 1.
template <class T>
std::pair<std::vector<T>, std::vector<T>> location_targets(int candidates, const std::vector<int>& positives) {
  if (positives.empty()) throw std::invalid_argument("location loss needs at least one positive candidate");
  std::vector<T> targets(candidates, T(0));
  for (int p : positives) {
    if (p < 0 || p >= candidates) throw std::out_of_range("positive index out of range");
    targets[p] = T(1);
  }
  const int pos = static_cast<int>(positives.size());
  const int neg = candidates - pos;
  const T w_pos = neg > 0 ? T(neg) / T(pos) : T(1);
  std::vector<T> weights(candidates, T(1));
  for (int p : positives) weights[p] = w_pos;
  return {std::move(targets), std::move(weights)};
}

/// Σ wᵢ ℓᵢ / Σ wᵢ over all candidates of one example (logits C×1).
template <class T>
nn::Var location_loss(nn::Tape<T>& t, nn::Var logits, const std::vector<int>& positives) {
  auto [targets, weights] = location_targets<T>(t.value(logits).rows, positives);
  return nn::weighted_bce_with_logits(t, logits, std::move(targets), std::move(weights));
}

/// Softmax cross-entropy of one 1×8 logit row.
template <class T>
nn::Var type_loss(nn::Tape<T>& t, nn::Var logits, int label) {
  return nn::softmax_cross_entropy(t, logits, {label});
}

}  // namespace automate::train
