#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "inrb/activations.hpp"
#include "inrb/encoding.hpp"
#include "inrb/kan.hpp"
#include "inrb/tape.hpp"
#include "inrb/tensor.hpp"

namespace inrb {

enum class Arch { Mlp, Kan };

struct NetworkConfig {
  Arch arch = Arch::Mlp;
  int depth = 6;  // number of affine / KAN layers
  int width = 256;
  int in_dim = 1;
  int out_dim = 1;
  ActivationSpec activation;      // MLP
  BasisSpec basis;                // KAN
  EncodingSpec encoding;          // MLP only; KAN takes raw coordinates
  bool kan_bias = true;

  static NetworkConfig mlp(int in_dim, int out_dim, ActivationSpec act, EncodingSpec enc,
                           int depth = 6, int width = 256);
  static NetworkConfig kan(int in_dim, int out_dim, BasisSpec basis, int depth = 6,
                           int width = 64);
};

struct ParamEntry {
  std::string name;
  Tensor value;
  Tensor adam_m;
  Tensor adam_v;
};

struct ParameterSet {
  std::vector<ParamEntry> entries;
  int64_t adam_step = 0;

  int64_t scalar_count() const {
    int64_t n = 0;
    for (const auto& e : entries) n += static_cast<int64_t>(e.value.size());
    return n;
  }
};

// A coordinate network: Eq.-style MLP (affine + fixed nonlinearity per layer,
// optional input encoding) or KAN (learnable edge functions, raw coordinates).
class Network {
 public:
  Network(NetworkConfig cfg, uint64_t seed);

  // Parameter leaves bound to a tape, in param_id order.
  struct Bound {
    std::vector<Value> params;
  };
  Bound bind(Tape& tape) const;
  Value forward(Tape& tape, const Bound& bound, Value x) const;

  // Non-recording forward convenience (chunked over rows).
  Tensor predict(const Tensor& x, int chunk = 8192) const;

  const NetworkConfig& config() const { return cfg_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }
  int n_params() const { return static_cast<int>(params_.entries.size()); }

  // Closed-form parameter count for a config (matches allocated scalars).
  static int64_t param_count(const NetworkConfig& cfg);

 private:
  NetworkConfig cfg_;
  ParameterSet params_;
  std::shared_ptr<const EncodingSpec> enc_;
  std::shared_ptr<const BasisSpec> basis_;
};

// Adam with the cosine-annealed learning rate schedule.
struct TrainConfig {
  double lr0 = 4e-4;
  double lr_min = 0.0;
  int steps = 2000;
  int batch = 8192;
  uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int record_every = 50;
};

double cosine_lr(const TrainConfig& cfg, int t);

// One Adam update from gradients indexed like params.entries.
void adam_step(ParameterSet& params, const std::vector<Tensor>& grads, double lr,
               const TrainConfig& cfg);

}  // namespace inrb
