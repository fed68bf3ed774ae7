#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "seeaction/nn/tensor.hpp"
#include "seeaction/rng.hpp"

namespace seeaction::nn {

// Named parameters with same-shape gradient slots. Tensors live in deques so
// references handed to a Tape stay valid while parameters are added.
template <typename T>
class ParamStore {
 public:
  explicit ParamStore(uint64_t seed = 0) : seed_(seed) {}

  uint64_t seed() const { return seed_; }
  void set_seed(uint64_t seed) { seed_ = seed; }

  BasicTensor<T>& add(const std::string& name, BasicTensor<T> value) {
    if (index_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
    index_.emplace(name, names_.size());
    names_.push_back(name);
    grads_.emplace_back(value.shape());
    values_.push_back(std::move(value));
    return values_.back();
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  const std::vector<std::string>& names() const { return names_; }
  size_t count() const { return names_.size(); }

  BasicTensor<T>& value(const std::string& name) { return values_[slot(name)]; }
  const BasicTensor<T>& value(const std::string& name) const { return values_[slot(name)]; }
  BasicTensor<T>& grad(const std::string& name) { return grads_[slot(name)]; }
  const BasicTensor<T>& grad(const std::string& name) const { return grads_[slot(name)]; }

  BasicTensor<T>& value_at(size_t i) { return values_[i]; }
  const BasicTensor<T>& value_at(size_t i) const { return values_[i]; }
  BasicTensor<T>& grad_at(size_t i) { return grads_[i]; }
  const BasicTensor<T>& grad_at(size_t i) const { return grads_[i]; }

  void zero_grad() {
    for (auto& g : grads_) g.fill(T(0));
  }

  size_t parameter_count() const {
    size_t n = 0;
    for (const auto& v : values_) n += v.size();
    return n;
  }

  template <typename U>
  ParamStore<U> cast() const {
    ParamStore<U> out(seed_);
    for (size_t i = 0; i < names_.size(); ++i) out.add(names_[i], values_[i].template cast<U>());
    return out;
  }

 private:
  size_t slot(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
    return it->second;
  }

  uint64_t seed_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, size_t> index_;
  std::deque<BasicTensor<T>> values_;
  std::deque<BasicTensor<T>> grads_;
};

// Uniform He-style initialization, U(-sqrt(6/fan_in), sqrt(6/fan_in)).
template <typename T>
BasicTensor<T> he_uniform(Rng& rng, Shape shape, int fan_in) {
  BasicTensor<T> t(std::move(shape));
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (size_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(rng.uniform(-bound, bound));
  return t;
}

template <typename T>
void sgd_step(ParamStore<T>& params, double lr) {
  for (size_t i = 0; i < params.count(); ++i) {
    auto& v = params.value_at(i);
    const auto& g = params.grad_at(i);
    for (size_t j = 0; j < v.size(); ++j) v[j] -= static_cast<T>(lr * g[j]);
  }
}

// Adam with bias correction. State is keyed by parameter position.
class Adam {
 public:
  explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  template <typename T>
  void step(ParamStore<T>& params) {
    if (m_.size() != params.count()) {
      m_.assign(params.count(), {});
      v_.assign(params.count(), {});
      for (size_t i = 0; i < params.count(); ++i) {
        m_[i].assign(params.value_at(i).size(), 0.0);
        v_[i].assign(params.value_at(i).size(), 0.0);
      }
    }
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (size_t i = 0; i < params.count(); ++i) {
      auto& v = params.value_at(i);
      const auto& g = params.grad_at(i);
      auto& m1 = m_[i];
      auto& m2 = v_[i];
      for (size_t j = 0; j < v.size(); ++j) {
        const double gj = static_cast<double>(g[j]);
        m1[j] = beta1_ * m1[j] + (1.0 - beta1_) * gj;
        m2[j] = beta2_ * m2[j] + (1.0 - beta2_) * gj * gj;
        const double update = lr_ * (m1[j] / c1) / (std::sqrt(m2[j] / c2) + eps_);
        v[j] = static_cast<T>(static_cast<double>(v[j]) - update);
      }
    }
  }

  int64_t steps() const { return t_; }
  double learning_rate() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  int64_t t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

// Parameter file: "SAPS" magic, u32 version, u64 seed, u32 entry count, then per
// entry u32 name length, name bytes, u32 rank, u32 dims, float32 payload.
// Little-endian throughout.
void save_params(const std::filesystem::path& path, const ParamStore<float>& params);
ParamStore<float> load_params(const std::filesystem::path& path);
std::vector<uint8_t> serialize_params(const ParamStore<float>& params);
ParamStore<float> deserialize_params(const std::vector<uint8_t>& bytes);

}  // namespace seeaction::nn
