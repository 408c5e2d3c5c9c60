#include "inrb/network.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace inrb {

NetworkConfig NetworkConfig::mlp(int in_dim, int out_dim, ActivationSpec act, EncodingSpec enc,
                                 int depth, int width) {
  NetworkConfig c;
  c.arch = Arch::Mlp;
  c.in_dim = in_dim;
  c.out_dim = out_dim;
  c.activation = act;
  c.encoding = enc;
  c.depth = depth;
  c.width = width;
  return c;
}

NetworkConfig NetworkConfig::kan(int in_dim, int out_dim, BasisSpec basis, int depth, int width) {
  NetworkConfig c;
  c.arch = Arch::Kan;
  c.in_dim = in_dim;
  c.out_dim = out_dim;
  c.basis = basis;
  c.encoding = EncodingSpec::identity(in_dim);
  c.depth = depth;
  c.width = width;
  return c;
}

namespace {

struct LayerDims {
  std::vector<int> in, out;  // per layer
};

LayerDims layer_dims(const NetworkConfig& cfg) {
  LayerDims d;
  int first = cfg.arch == Arch::Mlp ? cfg.encoding.out_dim() : cfg.in_dim;
  for (int l = 0; l < cfg.depth; ++l) {
    int in = l == 0 ? first : cfg.width;
    int out = l == cfg.depth - 1 ? cfg.out_dim : cfg.width;
    d.in.push_back(in);
    d.out.push_back(out);
  }
  return d;
}

bool sine_family(const ActivationSpec& a) {
  return a.family == Activation::Sine || a.family == Activation::ScaledSine;
}

}  // namespace

int64_t Network::param_count(const NetworkConfig& cfg) {
  LayerDims d = layer_dims(cfg);
  int64_t n = 0;
  if (cfg.arch == Arch::Mlp) {
    if (cfg.encoding.kind == Encoding::Fkan)
      n += static_cast<int64_t>(cfg.encoding.dims) * cfg.encoding.fkan_omega_max * 2;
    for (int l = 0; l < cfg.depth; ++l) n += static_cast<int64_t>(d.in[l]) * d.out[l] + d.out[l];
  } else {
    int cc = coeff_count(cfg.basis);
    for (int l = 0; l < cfg.depth; ++l) {
      n += static_cast<int64_t>(d.out[l]) * d.in[l] * cc;
      if (cfg.kan_bias) n += d.out[l];
    }
  }
  return n;
}

Network::Network(NetworkConfig cfg, uint64_t seed) : cfg_(std::move(cfg)) {
  if (cfg_.depth < 1) throw std::runtime_error("network: depth must be >= 1");
  if (cfg_.arch == Arch::Kan && cfg_.encoding.kind != Encoding::Identity)
    throw std::runtime_error("network: KAN models take raw coordinates (identity encoding only)");
  if (cfg_.arch == Arch::Mlp && cfg_.encoding.dims != cfg_.in_dim)
    throw std::runtime_error("network: encoding dims do not match in_dim");
  if (cfg_.arch == Arch::Mlp) validate(cfg_.activation);
  if (cfg_.arch == Arch::Kan) validate(cfg_.basis);

  enc_ = std::make_shared<const EncodingSpec>(cfg_.encoding);
  basis_ = std::make_shared<const BasisSpec>(cfg_.basis);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  LayerDims d = layer_dims(cfg_);

  auto add_param = [&](const std::string& name, Tensor t) {
    ParamEntry e;
    e.name = name;
    e.adam_m = Tensor(t.shape());
    e.adam_v = Tensor(t.shape());
    e.value = std::move(t);
    params_.entries.push_back(std::move(e));
  };

  if (cfg_.arch == Arch::Mlp) {
    if (cfg_.encoding.kind == Encoding::Fkan) {
      int om = cfg_.encoding.fkan_omega_max;
      Tensor c({cfg_.encoding.dims, om, 2});
      double sd = 1.0 / std::sqrt(static_cast<double>(om));
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = normal(rng) * sd;
      add_param("fkan_coeffs", std::move(c));
    }
    for (int l = 0; l < cfg_.depth; ++l) {
      Tensor w({d.in[l], d.out[l]});
      double bound;
      if (sine_family(cfg_.activation)) {
        bound = l == 0 ? 1.0 / d.in[l] : std::sqrt(6.0 / d.in[l]) / cfg_.activation.omega;
      } else {
        bound = std::sqrt(6.0 / d.in[l]);
      }
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = unit(rng) * bound;
      add_param("w" + std::to_string(l), std::move(w));
      add_param("b" + std::to_string(l), Tensor({d.out[l]}));
    }
  } else {
    int cc = coeff_count(cfg_.basis);
    for (int l = 0; l < cfg_.depth; ++l) {
      Tensor c({d.out[l], d.in[l], cc});
      double sd = 1.0 / std::sqrt(static_cast<double>(d.in[l]) * cc);
      for (std::size_t idx = 0; idx < c.size(); ++idx) {
        int k = static_cast<int>(idx % cc);
        if (cfg_.basis.family == Basis::SineBasis) {
          // triples (amplitude, frequency, phase); frequencies start on the
          // integer grid 1..P
          int slot = k % 3;
          if (slot == 0)
            c[idx] = normal(rng) * sd;
          else if (slot == 1)
            c[idx] = 1.0 + k / 3;
          else
            c[idx] = 0.0;
        } else if (!linear_in_coefficients(cfg_.basis)) {
          // wavelets: (weight, translation, scale)
          if (k == 0)
            c[idx] = normal(rng) * sd;
          else if (k == 1)
            c[idx] = unit(rng);
          else
            c[idx] = 1.0;
        } else {
          c[idx] = normal(rng) * sd;
        }
      }
      add_param("kan_c" + std::to_string(l), std::move(c));
      if (cfg_.kan_bias) add_param("kan_b" + std::to_string(l), Tensor({d.out[l]}));
    }
  }
}

Network::Bound Network::bind(Tape& tape) const {
  Bound b;
  b.params.reserve(params_.entries.size());
  for (std::size_t i = 0; i < params_.entries.size(); ++i)
    b.params.push_back(tape.param(params_.entries[i].value, static_cast<int>(i)));
  return b;
}

Value Network::forward(Tape& tape, const Bound& bound, Value x) const {
  std::size_t p = 0;
  Value h = x;
  if (cfg_.arch == Arch::Mlp) {
    if (cfg_.encoding.kind == Encoding::Fkan) {
      Value coeffs = bound.params[p++];
      h = tape.fkan_encode(enc_, coeffs, h);
    } else if (cfg_.encoding.kind != Encoding::Identity) {
      h = tape.encode(enc_, h);
    }
    for (int l = 0; l < cfg_.depth; ++l) {
      Value w = bound.params[p++];
      Value b = bound.params[p++];
      h = tape.add_rowvec(tape.matmul(h, w), b);
      if (l + 1 < cfg_.depth) h = tape.apply(h, cfg_.activation);
    }
  } else {
    for (int l = 0; l < cfg_.depth; ++l) {
      Value c = bound.params[p++];
      h = tape.kan_layer(basis_, c, h);
      if (cfg_.kan_bias) {
        Value b = bound.params[p++];
        h = tape.add_rowvec(h, b);
      }
    }
  }
  return h;
}

Tensor Network::predict(const Tensor& x, int chunk) const {
  int n = x.rows();
  Tensor out({n, cfg_.out_dim});
  for (int r0 = 0; r0 < n; r0 += chunk) {
    int r1 = std::min(n, r0 + chunk);
    Tensor part({r1 - r0, x.cols()});
    for (int r = r0; r < r1; ++r)
      for (int c = 0; c < x.cols(); ++c) part.at(r - r0, c) = x.at(r, c);
    Tape tape;
    Bound b = bind(tape);
    Value y = forward(tape, b, tape.leaf(std::move(part)));
    const Tensor& ty = tape.value(y);
    for (int r = r0; r < r1; ++r)
      for (int c = 0; c < cfg_.out_dim; ++c) out.at(r, c) = ty.at(r - r0, c);
  }
  return out;
}

double cosine_lr(const TrainConfig& cfg, int t) {
  double frac = cfg.steps > 0 ? static_cast<double>(t) / cfg.steps : 0.0;
  return cfg.lr_min +
         (cfg.lr0 - cfg.lr_min) * (1.0 + std::cos(3.14159265358979323846 * frac)) / 2.0;
}

void adam_step(ParameterSet& params, const std::vector<Tensor>& grads, double lr,
               const TrainConfig& cfg) {
  params.adam_step++;
  double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(params.adam_step));
  double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(params.adam_step));
  for (std::size_t i = 0; i < params.entries.size(); ++i) {
    ParamEntry& e = params.entries[i];
    const Tensor& g = grads[i];
    if (g.size() != e.value.size()) continue;  // parameter unreachable from the loss
    for (std::size_t k = 0; k < e.value.size(); ++k) {
      e.adam_m[k] = cfg.beta1 * e.adam_m[k] + (1.0 - cfg.beta1) * g[k];
      e.adam_v[k] = cfg.beta2 * e.adam_v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
      double mhat = e.adam_m[k] / c1;
      double vhat = e.adam_v[k] / c2;
      e.value[k] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

}  // namespace inrb
