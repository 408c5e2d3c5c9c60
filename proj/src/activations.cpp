#include "inrb/activations.hpp"

#include <cmath>
#include <stdexcept>

namespace inrb {

ActivationSpec ActivationSpec::make(Activation family) {
  ActivationSpec s;
  s.family = family;
  switch (family) {
    case Activation::PReLU:
      s.a = 0.01;
      break;
    case Activation::Gabor:
      s.a = 50.0;  // envelope matched to the Gaussian default sigma = 0.1
      s.omega = 30.0;
      break;
    default:
      break;
  }
  return s;
}

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::ReLU: return "relu";
    case Activation::PReLU: return "prelu";
    case Activation::Sine: return "sine";
    case Activation::ScaledSine: return "scaled_sine";
    case Activation::Gaussian: return "gaussian";
    case Activation::Laplacian: return "laplacian";
    case Activation::SuperGaussian: return "super_gaussian";
    case Activation::Gabor: return "gabor";
    case Activation::Sinc: return "sinc";
    case Activation::ExpSin: return "expsin";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
    case Activation::Quadratic: return "quadratic";
    case Activation::MultiQuadratic: return "multi_quadratic";
  }
  return "?";
}

Activation activation_from_name(const std::string& name) {
  static const std::pair<const char*, Activation> table[] = {
      {"relu", Activation::ReLU},
      {"prelu", Activation::PReLU},
      {"sine", Activation::Sine},
      {"scaled_sine", Activation::ScaledSine},
      {"gaussian", Activation::Gaussian},
      {"laplacian", Activation::Laplacian},
      {"super_gaussian", Activation::SuperGaussian},
      {"gabor", Activation::Gabor},
      {"sinc", Activation::Sinc},
      {"expsin", Activation::ExpSin},
      {"sigmoid", Activation::Sigmoid},
      {"tanh", Activation::Tanh},
      {"quadratic", Activation::Quadratic},
      {"multi_quadratic", Activation::MultiQuadratic},
  };
  for (const auto& [n, a] : table)
    if (name == n) return a;
  std::string valid;
  for (const auto& [n, a] : table) {
    if (!valid.empty()) valid += ", ";
    valid += n;
  }
  throw std::runtime_error("unknown activation '" + name + "' (valid: " + valid + ")");
}

void validate(const ActivationSpec& s) {
  switch (s.family) {
    case Activation::Gaussian:
    case Activation::Laplacian:
    case Activation::SuperGaussian:
      if (!(s.sigma > 0))
        throw std::runtime_error(std::string(activation_name(s.family)) +
                                 ": sigma must be > 0, got " + std::to_string(s.sigma));
      break;
    case Activation::Sine:
    case Activation::ScaledSine:
      if (!(s.omega > 0))
        throw std::runtime_error(std::string(activation_name(s.family)) +
                                 ": omega must be > 0, got " + std::to_string(s.omega));
      break;
    case Activation::Quadratic:
    case Activation::MultiQuadratic:
      if (s.a == 0.0)
        throw std::runtime_error(std::string(activation_name(s.family)) + ": a must be nonzero");
      break;
    default:
      break;
  }
}

namespace {
constexpr double kPi = 3.14159265358979323846;

// sin(pi x)/(pi x) with the removable singularity filled in by series.
double sinc_val(double x) {
  double u = kPi * x;
  if (std::abs(u) < 1e-4) {
    double u2 = u * u;
    return 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
  }
  return std::sin(u) / u;
}

double sinc_deriv(double x) {
  double u = kPi * x;
  if (std::abs(u) < 1e-4) {
    double u2 = u * u;
    return kPi * (-u / 3.0 + u * u2 / 30.0);
  }
  return (u * std::cos(u) - std::sin(u)) / (u * u) * kPi;
}
}  // namespace

double act_value(const ActivationSpec& s, double x) {
  switch (s.family) {
    case Activation::ReLU: return x > 0 ? x : 0.0;
    case Activation::PReLU: return x >= 0 ? x : s.a * x;
    case Activation::Sine: return std::sin(s.omega * x);
    case Activation::ScaledSine: return s.a * std::sin(s.omega * s.b * x + s.c) + s.d;
    case Activation::Gaussian: return std::exp(-x * x / (2.0 * s.sigma * s.sigma));
    case Activation::Laplacian: return std::exp(-std::abs(x) / s.sigma);
    case Activation::SuperGaussian:
      return std::exp(-s.n * x * x / (2.0 * s.sigma * s.sigma));
    case Activation::Gabor: return std::exp(-s.a * x * x) * std::cos(s.omega * x);
    case Activation::Sinc: return sinc_val(x);
    case Activation::ExpSin: return std::exp(std::sin(s.a * x));
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::Tanh: return std::tanh(x);
    case Activation::Quadratic: return 1.0 / (1.0 + s.a * s.a * x * x);
    case Activation::MultiQuadratic: return 1.0 / std::sqrt(1.0 + s.a * s.a * x * x);
  }
  return 0.0;
}

double act_grad(const ActivationSpec& s, double x) {
  switch (s.family) {
    case Activation::ReLU: return x > 0 ? 1.0 : 0.0;
    case Activation::PReLU: return x > 0 ? 1.0 : (x < 0 ? s.a : 1.0);
    case Activation::Sine: return s.omega * std::cos(s.omega * x);
    case Activation::ScaledSine: return s.a * s.omega * s.b * std::cos(s.omega * s.b * x + s.c);
    case Activation::Gaussian: {
      double s2 = s.sigma * s.sigma;
      return -x / s2 * std::exp(-x * x / (2.0 * s2));
    }
    case Activation::Laplacian: {
      double sign = x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
      return -sign / s.sigma * std::exp(-std::abs(x) / s.sigma);
    }
    case Activation::SuperGaussian: {
      double s2 = s.sigma * s.sigma;
      return -s.n * x / s2 * std::exp(-s.n * x * x / (2.0 * s2));
    }
    case Activation::Gabor:
      return -std::exp(-s.a * x * x) *
             (2.0 * s.a * x * std::cos(s.omega * x) + s.omega * std::sin(s.omega * x));
    case Activation::Sinc: return sinc_deriv(x);
    case Activation::ExpSin:
      return s.a * std::exp(std::sin(s.a * x)) * std::cos(s.a * x);
    case Activation::Sigmoid: {
      double f = 1.0 / (1.0 + std::exp(-x));
      return f * (1.0 - f);
    }
    case Activation::Tanh: {
      double f = std::tanh(x);
      return 1.0 - f * f;
    }
    case Activation::Quadratic: {
      double q = 1.0 + s.a * s.a * x * x;
      return -2.0 * s.a * s.a * x / (q * q);
    }
    case Activation::MultiQuadratic: {
      double q = 1.0 + s.a * s.a * x * x;
      return -s.a * s.a * x / (q * std::sqrt(q));
    }
  }
  return 0.0;
}

Tensor act_value(const ActivationSpec& s, const Tensor& x) {
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = act_value(s, x[i]);
  return out;
}

Tensor act_grad(const ActivationSpec& s, const Tensor& x) {
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = act_grad(s, x[i]);
  return out;
}

ActConstants act_constants(const ActivationSpec& s) {
  switch (s.family) {
    case Activation::ReLU: return {1.0, std::nullopt};
    case Activation::PReLU: return {std::max(1.0, std::abs(s.a)), std::nullopt};
    case Activation::Sine: return {s.omega, s.omega * s.omega};
    case Activation::ScaledSine:
      return {std::abs(s.a * s.omega * s.b), std::abs(s.a * s.omega * s.omega * s.b * s.b)};
    case Activation::Gaussian:
      return {std::exp(-0.5) / s.sigma, 2.0 * std::exp(-1.5) / (s.sigma * s.sigma)};
    case Activation::Sigmoid: return {0.25, 1.0 / (6.0 * std::sqrt(3.0))};
    case Activation::Tanh: return {1.0, 4.0 / (3.0 * std::sqrt(3.0))};
    default:
      // Laplacian, SuperGaussian, Gabor, Sinc, ExpSin, Quadratic and
      // MultiQuadratic have no closed-form constant in the catalog.
      return {std::nullopt, std::nullopt};
  }
}

}  // namespace inrb
