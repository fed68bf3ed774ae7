#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "seeaction/nn/kernels.hpp"
#include "seeaction/nn/params.hpp"
#include "seeaction/nn/tensor.hpp"

namespace seeaction::nn {

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode differentiation tape. Every op appends a node holding its
// forward value and a closure that pushes the node's gradient to its inputs.
// Parameter leaves accumulate their gradient into the owning ParamStore.
template <typename T>
class Tape {
 public:
  using TensorT = BasicTensor<T>;

  Var constant(TensorT value) { return push(std::move(value), false); }

  // Each (store, name) pair gets a single node per tape.
  Var param(ParamStore<T>& store, const std::string& name) {
    const std::string key = std::to_string(reinterpret_cast<uintptr_t>(&store)) + "/" + name;
    auto it = param_ids_.find(key);
    if (it != param_ids_.end()) return Var{it->second};
    Node node;
    node.ref = &store.value(name);
    node.sink = &store.grad(name);
    node.requires_grad = true;
    nodes_.push_back(std::move(node));
    const Var v{static_cast<int>(nodes_.size()) - 1};
    param_ids_.emplace(key, v.id);
    return v;
  }

  const TensorT& value(Var v) const {
    const Node& n = nodes_.at(static_cast<size_t>(v.id));
    return n.ref ? *n.ref : n.value;
  }

  // Gradient of the last backward() target with respect to v (empty if unused).
  const TensorT& grad(Var v) const { return nodes_.at(static_cast<size_t>(v.id)).grad; }

  size_t size() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) with `seed` (e.g. 1/batch for a mean) and
  // propagates to every input that requires a gradient.
  void backward(Var loss, T seed = T(1)) {
    if (value(loss).size() != 1) throw std::invalid_argument("backward target must be a scalar");
    grad_ref(loss.id).values()[0] = seed;
    for (int i = loss.id; i >= 0; --i) {
      Node& n = nodes_[static_cast<size_t>(i)];
      if (!n.requires_grad || n.grad.empty()) continue;
      if (n.backward) n.backward();
      if (n.sink) {
        auto& dst = n.sink->values();
        const auto& src = n.grad.values();
        for (size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
      }
    }
  }

  // ---- elementwise ----

  Var add(Var a, Var b) {
    check_same(a, b, "add");
    TensorT out = value(a);
    const auto& bv = value(b).values();
    for (size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
    return unary_or_binary(std::move(out), {a, b}, [this, a, b](const TensorT& g) {
      if (wants(a)) accumulate(a, g.values(), T(1));
      if (wants(b)) accumulate(b, g.values(), T(1));
    });
  }

  Var mul(Var a, Var b) {
    check_same(a, b, "mul");
    TensorT out = value(a);
    const auto& bv = value(b).values();
    for (size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
    return unary_or_binary(std::move(out), {a, b}, [this, a, b](const TensorT& g) {
      const auto& av = value(a).values();
      const auto& bv2 = value(b).values();
      if (wants(a)) {
        auto& ga = grad_ref(a.id).values();
        for (size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * bv2[i];
      }
      if (wants(b)) {
        auto& gb = grad_ref(b.id).values();
        for (size_t i = 0; i < gb.size(); ++i) gb[i] += g[i] * av[i];
      }
    });
  }

  Var scale(Var a, T s) {
    TensorT out = value(a);
    for (auto& v : out.values()) v *= s;
    return unary_or_binary(std::move(out), {a}, [this, a, s](const TensorT& g) { accumulate(a, g.values(), s); });
  }

  Var relu(Var a) {
    TensorT out = value(a);
    for (auto& v : out.values()) v = v > T(0) ? v : T(0);
    return unary_or_binary(std::move(out), {a}, [this, a](const TensorT& g) {
      const auto& av = value(a).values();
      auto& ga = grad_ref(a.id).values();
      for (size_t i = 0; i < ga.size(); ++i) {
        if (av[i] > T(0)) ga[i] += g[i];
      }
    });
  }

  Var sigmoid(Var a) {
    TensorT out = value(a);
    for (auto& v : out.values()) v = T(1) / (T(1) + std::exp(-v));
    const int self = static_cast<int>(nodes_.size());
    return unary_or_binary(std::move(out), {a}, [this, a, self](const TensorT& g) {
      const auto& y = nodes_[static_cast<size_t>(self)].value.values();
      auto& ga = grad_ref(a.id).values();
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * y[i] * (T(1) - y[i]);
    });
  }

  Var tanh(Var a) {
    TensorT out = value(a);
    for (auto& v : out.values()) v = std::tanh(v);
    const int self = static_cast<int>(nodes_.size());
    return unary_or_binary(std::move(out), {a}, [this, a, self](const TensorT& g) {
      const auto& y = nodes_[static_cast<size_t>(self)].value.values();
      auto& ga = grad_ref(a.id).values();
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * (T(1) - y[i] * y[i]);
    });
  }

  // ---- shape ----

  Var reshape(Var a, Shape shape) {
    TensorT out = value(a).reshaped(std::move(shape));
    return unary_or_binary(std::move(out), {a}, [this, a](const TensorT& g) { accumulate(a, g.values(), T(1)); });
  }

  // Concatenates the flattened inputs into one vector.
  Var concat(const std::vector<Var>& parts) {
    std::vector<T> data;
    for (Var p : parts) data.insert(data.end(), value(p).values().begin(), value(p).values().end());
    const int n = static_cast<int>(data.size());
    return unary_or_binary(TensorT({n}, std::move(data)), parts, [this, parts](const TensorT& g) {
      size_t off = 0;
      for (Var p : parts) {
        const size_t len = value(p).size();
        if (wants(p)) {
          auto& gp = grad_ref(p.id).values();
          for (size_t i = 0; i < len; ++i) gp[i] += g[off + i];
        }
        off += len;
      }
    });
  }

  // Elements [offset, offset + length) of the flattened input.
  Var slice(Var a, int offset, int length) {
    const auto& av = value(a).values();
    if (offset < 0 || length < 0 || static_cast<size_t>(offset + length) > av.size()) {
      throw std::invalid_argument("slice out of range");
    }
    TensorT out({length}, std::vector<T>(av.begin() + offset, av.begin() + offset + length));
    return unary_or_binary(std::move(out), {a}, [this, a, offset](const TensorT& g) {
      auto& ga = grad_ref(a.id).values();
      for (size_t i = 0; i < g.size(); ++i) ga[static_cast<size_t>(offset) + i] += g[i];
    });
  }

  // Row `row` of a [rows, dim] table.
  Var embedding(Var table, int row) {
    const TensorT& t = value(table);
    if (t.rank() != 2 || row < 0 || row >= t.dim(0)) throw std::invalid_argument("embedding row out of range");
    const int dim = t.dim(1);
    TensorT out({dim}, std::vector<T>(t.data() + static_cast<size_t>(row) * dim, t.data() + static_cast<size_t>(row + 1) * dim));
    return unary_or_binary(std::move(out), {table}, [this, table, row, dim](const TensorT& g) {
      T* gt = grad_ref(table.id).data() + static_cast<size_t>(row) * dim;
      for (int i = 0; i < dim; ++i) gt[i] += g[static_cast<size_t>(i)];
    });
  }

  // ---- layers ----

  // y = W x + b with W [m, n]; `bias` may be invalid for no bias.
  Var dense(Var x, Var weight, Var bias = Var{}) {
    const TensorT& w = value(weight);
    const TensorT& xv = value(x);
    if (w.rank() != 2 || static_cast<size_t>(w.dim(1)) != xv.size()) {
      throw std::invalid_argument("dense: weight " + shape_string(w.shape()) + " vs input " + shape_string(xv.shape()));
    }
    const int m = w.dim(0);
    const int n = w.dim(1);
    if (bias.valid() && value(bias).size() != static_cast<size_t>(m)) throw std::invalid_argument("dense: bias size");
    TensorT out({m});
    kernels::matvec(m, n, w.data(), xv.data(), bias.valid() ? value(bias).data() : nullptr, out.data());
    std::vector<Var> inputs{x, weight};
    if (bias.valid()) inputs.push_back(bias);
    return unary_or_binary(std::move(out), inputs, [this, x, weight, bias, m, n](const TensorT& g) {
      const TensorT& wv = value(weight);
      const TensorT& xin = value(x);
      if (wants(x)) {
        T* gx = grad_ref(x.id).data();
        for (int i = 0; i < m; ++i) {
          const T gi = g[static_cast<size_t>(i)];
          if (gi == T(0)) continue;
          const T* row = wv.data() + static_cast<size_t>(i) * n;
          for (int j = 0; j < n; ++j) gx[j] += gi * row[j];
        }
      }
      if (wants(weight)) {
        T* gw = grad_ref(weight.id).data();
        for (int i = 0; i < m; ++i) {
          const T gi = g[static_cast<size_t>(i)];
          if (gi == T(0)) continue;
          T* row = gw + static_cast<size_t>(i) * n;
          for (int j = 0; j < n; ++j) row[j] += gi * xin[static_cast<size_t>(j)];
        }
      }
      if (bias.valid() && wants(bias)) accumulate(bias, g.values(), T(1));
    });
  }

  // input [C_in, D, H, W], kernel [C_out, C_in, kd, kh, kw], bias [C_out].
  Var conv3d(Var input, Var kernel, Var bias) {
    const TensorT& in = value(input);
    const TensorT& k = value(kernel);
    if (in.rank() != 4 || k.rank() != 5 || k.dim(1) != in.dim(0) || value(bias).size() != static_cast<size_t>(k.dim(0))) {
      throw std::invalid_argument("conv3d: input " + shape_string(in.shape()) + " kernel " + shape_string(k.shape()));
    }
    kernels::Conv3dShape s{in.dim(0), in.dim(1), in.dim(2), in.dim(3), k.dim(0), k.dim(2), k.dim(3), k.dim(4)};
    TensorT out({s.c_out, s.depth, s.height, s.width});
    kernels::conv3d_forward(s, in.data(), k.data(), value(bias).data(), out.data());
    return unary_or_binary(std::move(out), {input, kernel, bias}, [this, input, kernel, bias, s](const TensorT& g) {
      if (wants(input)) kernels::conv3d_backward_input(s, g.data(), value(kernel).data(), grad_ref(input.id).data());
      if (wants(kernel) || wants(bias)) {
        TensorT& gk = grad_ref(kernel.id);
        TensorT& gb = grad_ref(bias.id);
        kernels::conv3d_backward_params(s, g.data(), value(input).data(), gk.data(), gb.data());
      }
    });
  }

  // 2x2x2 max pooling, stride 2, ceil mode, on [C, D, H, W].
  Var maxpool3d(Var input) {
    const TensorT& in = value(input);
    if (in.rank() != 4) throw std::invalid_argument("maxpool3d expects [C, D, H, W]");
    kernels::Pool3dShape s{in.dim(0), in.dim(1), in.dim(2), in.dim(3)};
    TensorT out({s.channels, s.out_depth(), s.out_height(), s.out_width()});
    std::vector<int32_t> argmax;
    kernels::maxpool3d_forward(s, in.data(), out.data(), argmax);
    return unary_or_binary(std::move(out), {input}, [this, input, argmax = std::move(argmax)](const TensorT& g) {
      T* gi = grad_ref(input.id).data();
      for (size_t o = 0; o < argmax.size(); ++o) gi[argmax[o]] += g[o];
    });
  }

  // Cross-entropy of softmax(logits) against `target`; scalar output.
  Var softmax_xent(Var logits, int target) {
    const TensorT& z = value(logits);
    if (target < 0 || static_cast<size_t>(target) >= z.size()) throw std::out_of_range("softmax_xent: target out of range");
    std::vector<T> p = softmax(z.values());
    const T loss = -log_softmax_at(z.values(), target);
    return unary_or_binary(TensorT({1}, {loss}), {logits}, [this, logits, target, p = std::move(p)](const TensorT& g) {
      auto& gz = grad_ref(logits.id).values();
      for (size_t i = 0; i < gz.size(); ++i) gz[i] += g[0] * (p[i] - (static_cast<int>(i) == target ? T(1) : T(0)));
    });
  }

  // Sum of scalar vars.
  Var sum(const std::vector<Var>& terms) {
    T total = 0;
    for (Var t : terms) total += value(t)[0];
    return unary_or_binary(TensorT({1}, {total}), terms, [this, terms](const TensorT& g) {
      for (Var t : terms) {
        if (wants(t)) grad_ref(t.id)[0] += g[0];
      }
    });
  }

  static std::vector<T> softmax(const std::vector<T>& z) {
    T mx = -std::numeric_limits<T>::infinity();
    for (T v : z) mx = std::max(mx, v);
    std::vector<T> p(z.size());
    T denom = 0;
    for (size_t i = 0; i < z.size(); ++i) {
      p[i] = std::exp(z[i] - mx);
      denom += p[i];
    }
    for (T& v : p) v /= denom;
    return p;
  }

  static T log_softmax_at(const std::vector<T>& z, int i) {
    T mx = -std::numeric_limits<T>::infinity();
    for (T v : z) mx = std::max(mx, v);
    T denom = 0;
    for (T v : z) denom += std::exp(v - mx);
    return z[static_cast<size_t>(i)] - mx - std::log(denom);
  }

 private:
  struct Node {
    TensorT value;
    const TensorT* ref = nullptr;
    TensorT grad;
    TensorT* sink = nullptr;
    bool requires_grad = false;
    std::function<void()> backward;
  };

  Var push(TensorT value, bool requires_grad) {
    Node node;
    node.value = std::move(value);
    node.requires_grad = requires_grad;
    nodes_.push_back(std::move(node));
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  template <typename F>
  Var unary_or_binary(TensorT out, const std::vector<Var>& inputs, F fn) {
    bool rg = false;
    for (Var v : inputs) rg = rg || nodes_.at(static_cast<size_t>(v.id)).requires_grad;
    const Var self = push(std::move(out), rg);
    if (rg) {
      nodes_[static_cast<size_t>(self.id)].backward = [this, self, fn]() { fn(nodes_[static_cast<size_t>(self.id)].grad); };
    }
    return self;
  }

  bool wants(Var v) const { return nodes_[static_cast<size_t>(v.id)].requires_grad; }

  TensorT& grad_ref(int id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.grad.empty()) n.grad = TensorT((n.ref ? *n.ref : n.value).shape());
    return n.grad;
  }

  void accumulate(Var v, const std::vector<T>& g, T s) {
    if (!wants(v)) return;
    auto& dst = grad_ref(v.id).values();
    for (size_t i = 0; i < dst.size(); ++i) dst[i] += s * g[i];
  }

  void check_same(Var a, Var b, const char* op) const {
    if (value(a).shape() != value(b).shape()) {
      throw std::invalid_argument(std::string(op) + ": shape " + shape_string(value(a).shape()) + " vs " +
                                  shape_string(value(b).shape()));
    }
  }

  std::deque<Node> nodes_;
  std::unordered_map<std::string, int> param_ids_;
};

// LSTM cell parameters as tape vars: w_x [4H, X], w_h [4H, H], bias [4H].
// Gate rows are ordered input, forget, candidate, output.
struct LstmParams {
  Var w_x;
  Var w_h;
  Var bias;
};

struct LstmVars {
  Var hidden;
  Var cell;
};

template <typename T>
LstmVars lstm_step(Tape<T>& tape, Var x, const LstmVars& state, const LstmParams& p) {
  const int hidden = static_cast<int>(tape.value(state.hidden).size());
  const Var gates = tape.add(tape.dense(x, p.w_x, p.bias), tape.dense(state.hidden, p.w_h));
  const Var i = tape.sigmoid(tape.slice(gates, 0, hidden));
  const Var f = tape.sigmoid(tape.slice(gates, hidden, hidden));
  const Var g = tape.tanh(tape.slice(gates, 2 * hidden, hidden));
  const Var o = tape.sigmoid(tape.slice(gates, 3 * hidden, hidden));
  const Var c = tape.add(tape.mul(f, state.cell), tape.mul(i, g));
  const Var h = tape.mul(o, tape.tanh(c));
  return LstmVars{h, c};
}

}  // namespace seeaction::nn
