#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seeaction/nn/params.hpp"
#include "seeaction/nn/tape.hpp"
#include "seeaction/rng.hpp"

namespace seeaction::nn {

struct GradcheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // Elements probed per parameter tensor; larger tensors are sampled.
  size_t max_probes = 64;
};

struct GradcheckResult {
  std::string op;
  uint64_t seed = 0;
  std::string shape;  // human-readable case description
  double max_rel_error = 0.0;
  size_t probes = 0;
  bool passed = false;
};

// Scalar loss over the parameters of `store`, built on a fresh tape each call.
using TapeLoss = std::function<Var(Tape<double>&, ParamStore<double>&)>;
// Scalar loss that writes d(loss)/d(param) into the store's gradients when asked.
using StoreLoss = std::function<double(ParamStore<double>&, bool accumulate_grad)>;

// Relative error of one tensor: |a - n| / max(|a|, |n|) in the 2-norm, taken
// over the probed elements; 0 when both are below 1e-12.
double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric);

// Compares analytic gradients with central differences; returns the worst
// per-tensor relative error and the number of probed elements.
std::pair<double, size_t> check_gradients(ParamStore<double>& store, const StoreLoss& loss, Rng& rng,
                                          const GradcheckOptions& opt = {});
std::pair<double, size_t> check_gradients(ParamStore<double>& store, const TapeLoss& loss, Rng& rng,
                                          const GradcheckOptions& opt = {});

// conv3d, maxpool3d, dense, relu composition, softmax_xent, 4-step LSTM and
// the full model loss on a 2-sample batch, each over `seeds` random cases.
std::vector<GradcheckResult> run_gradcheck_suite(int seeds = 5, uint64_t base_seed = 0, const GradcheckOptions& opt = {});

nlohmann::json to_json(const GradcheckResult& r);

}  // namespace seeaction::nn
