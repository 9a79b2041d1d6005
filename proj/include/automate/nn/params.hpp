#pragma once

#include "automate/nn/tape.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <type_traits>
#include <vector>

namespace automate::nn {

using Json = nlohmann::json;

template <class T>
struct Parameter {
  std::string name;
  Matrix<T> value;
  Matrix<T> grad;
  Matrix<T> m;  // Adam first moment
  Matrix<T> v;  // Adam second moment
};

template <class T>
struct Buffer {
  std::string name;
  Matrix<T> value;
};

/// Named parameters and buffers in insertion order.
template <class T>
class ParamStore {
 public:
  int add_parameter(const std::string& name, Matrix<T> init) {
    check_new(name);
    const int rows = init.rows, cols = init.cols;
    params_.push_back({name, std::move(init), Matrix<T>(rows, cols), Matrix<T>(rows, cols), Matrix<T>(rows, cols)});
    index_[name] = static_cast<int>(params_.size()) - 1;
    return index_[name];
  }

  int add_buffer(const std::string& name, Matrix<T> init) {
    check_new(name);
    buffers_.push_back({name, std::move(init)});
    buffer_index_[name] = static_cast<int>(buffers_.size()) - 1;
    return buffer_index_[name];
  }

  Parameter<T>& parameter(int i) { return params_.at(i); }
  const Parameter<T>& parameter(int i) const { return params_.at(i); }
  Parameter<T>& parameter(const std::string& name) { return params_.at(index_.at(name)); }
  Buffer<T>& buffer(int i) { return buffers_.at(i); }
  const Buffer<T>& buffer(int i) const { return buffers_.at(i); }
  Buffer<T>& buffer(const std::string& name) { return buffers_.at(buffer_index_.at(name)); }

  std::vector<Parameter<T>>& parameters() { return params_; }
  const std::vector<Parameter<T>>& parameters() const { return params_; }
  std::vector<Buffer<T>>& buffers() { return buffers_; }
  const std::vector<Buffer<T>>& buffers() const { return buffers_; }

  long step() const { return step_; }
  void set_step(long s) { step_ = s; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
  }

  void zero_grad() {
    for (auto& p : params_) std::fill(p.grad.data.begin(), p.grad.data.end(), T(0));
  }

  /// Copies values and buffers (not optimizer state) from a store with the
  /// same layout.
  void copy_values_from(const ParamStore& o) {
    for (std::size_t i = 0; i < params_.size(); ++i) params_[i].value = o.params_.at(i).value;
    for (std::size_t i = 0; i < buffers_.size(); ++i) buffers_[i].value = o.buffers_.at(i).value;
  }

 private:
  void check_new(const std::string& name) {
    if (index_.count(name) || buffer_index_.count(name))
      throw std::invalid_argument("duplicate parameter name '" + name + "'");
  }

  std::vector<Parameter<T>> params_;
  std::vector<Buffer<T>> buffers_;
  std::map<std::string, int> index_;
  std::map<std::string, int> buffer_index_;
  long step_ = 0;
};

/// Binds store parameters to tape leaves for one forward/backward pass.
template <class T>
class Binding {
 public:
  Binding(Tape<T>& tape, ParamStore<T>& store) : tape_(tape), store_(store), vars_(store.parameters().size()) {}

  Var operator()(int param) {
    Var& v = vars_.at(param);
    if (v.id < 0) v = tape_.leaf(store_.parameter(param).value, store_.parameter(param).name);
    return v;
  }

  /// Adds leaf gradients into the store's accumulators.
  void accumulate() {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i].id < 0 || !tape_.has_grad(vars_[i])) continue;
      const auto& g = tape_.grad(vars_[i]);
      if (!g.all_finite()) throw NonFiniteError(store_.parameter(static_cast<int>(i)).name, "gradient");
      store_.parameter(static_cast<int>(i)).grad.map() += g.map();
    }
  }

  Tape<T>& tape() { return tape_; }
  ParamStore<T>& store() { return store_; }

 private:
  Tape<T>& tape_;
  ParamStore<T>& store_;
  std::vector<Var> vars_;
};

struct AdamOptions {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam update; gradients are zeroed afterwards.
template <class T>
void adam_step(ParamStore<T>& store, const AdamOptions& o = {}) {
  const long t = store.step() + 1;
  store.set_step(t);
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(t));
  for (auto& p : store.parameters()) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const T g = p.grad.data[i];
      p.m.data[i] = T(o.beta1) * p.m.data[i] + T(1 - o.beta1) * g;
      p.v.data[i] = T(o.beta2) * p.v.data[i] + T(1 - o.beta2) * g * g;
      const T mhat = p.m.data[i] / T(c1);
      const T vhat = p.v.data[i] / T(c2);
      p.value.data[i] -= T(o.lr) * mhat / (std::sqrt(vhat) + T(o.eps));
      p.grad.data[i] = T(0);
    }
  }
}

/// U(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
template <class T>
Matrix<T> uniform_init(int rows, int cols, int fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix<T> m(rows, cols);
  for (T& v : m.data) v = static_cast<T>(dist(rng));
  return m;
}

template <class T>
constexpr const char* dtype_name() {
  return std::is_same_v<T, float> ? "float32" : "float64";
}

inline constexpr int kCheckpointVersion = 1;

template <class T>
Json matrix_entry(const std::string& name, const Matrix<T>& m) {
  return Json{{"name", name}, {"shape", {m.rows, m.cols}}, {"dtype", dtype_name<T>()}, {"data", m.data}};
}

/// JSON manifest: parameters, buffers, Adam state and caller metadata.
template <class T>
Json checkpoint_json(const ParamStore<T>& store, const Json& metadata) {
  Json params = Json::array(), buffers = Json::array(), moments = Json::array();
  for (const auto& p : store.parameters()) {
    params.push_back(matrix_entry(p.name, p.value));
    moments.push_back(Json{{"name", p.name}, {"m", p.m.data}, {"v", p.v.data}});
  }
  for (const auto& b : store.buffers()) buffers.push_back(matrix_entry(b.name, b.value));
  return Json{{"format", "automate-checkpoint"},
              {"version", kCheckpointVersion},
              {"metadata", metadata},
              {"parameters", params},
              {"buffers", buffers},
              {"adam", {{"step", store.step()}, {"moments", moments}}}};
}

/// Loads a manifest into a store with the same layout. Throws on any name,
/// shape or version mismatch.
template <class T>
void load_checkpoint(ParamStore<T>& store, const Json& j) {
  auto fail = [](const std::string& why) { throw std::runtime_error("checkpoint mismatch: " + why); };
  if (j.value("format", "") != "automate-checkpoint" || j.value("version", 0) != kCheckpointVersion)
    fail("unsupported format or version");
  auto read = [&](const Json& entry, const std::string& name, Matrix<T>& dst) {
    if (entry.at("name").get<std::string>() != name) fail("expected '" + name + "'");
    const auto shape = entry.at("shape").get<std::vector<int>>();
    if (shape.size() != 2 || shape[0] != dst.rows || shape[1] != dst.cols) fail("shape of '" + name + "'");
    auto data = entry.at("data").get<std::vector<T>>();
    if (data.size() != dst.size()) fail("size of '" + name + "'");
    dst.data = std::move(data);
  };
  const Json& params = j.at("parameters");
  const Json& buffers = j.at("buffers");
  if (params.size() != store.parameters().size() || buffers.size() != store.buffers().size())
    fail("parameter or buffer count");
  for (std::size_t i = 0; i < params.size(); ++i)
    read(params[i], store.parameters()[i].name, store.parameters()[i].value);
  for (std::size_t i = 0; i < buffers.size(); ++i) read(buffers[i], store.buffers()[i].name, store.buffers()[i].value);
  if (j.contains("adam")) {
    const Json& adam = j.at("adam");
    store.set_step(adam.at("step").get<long>());
    const Json& moments = adam.at("moments");
    for (std::size_t i = 0; i < moments.size() && i < store.parameters().size(); ++i) {
      auto& p = store.parameters()[i];
      p.m.data = moments[i].at("m").get<std::vector<T>>();
      p.v.data = moments[i].at("v").get<std::vector<T>>();
      if (p.m.size() != p.value.size() || p.v.size() != p.value.size()) fail("moments of '" + p.name + "'");
    }
  }
}

}  // namespace automate::nn
