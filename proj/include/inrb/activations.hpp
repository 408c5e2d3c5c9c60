#pragma once

#include <optional>
#include <string>

#include "inrb/tensor.hpp"

namespace inrb {

enum class Activation {
  ReLU,
  PReLU,
  Sine,
  ScaledSine,
  Gaussian,
  Laplacian,
  SuperGaussian,
  Gabor,
  Sinc,
  ExpSin,
  Sigmoid,
  Tanh,
  Quadratic,
  MultiQuadratic,
};

// One of the 14 MLP activation families with its parameters.
// Field use per family:
//   Sine/ScaledSine: omega (+ a,b,c,d for ScaledSine)
//   Gaussian/Laplacian/SuperGaussian: sigma (+ n for SuperGaussian)
//   PReLU/ExpSin/Quadratic/MultiQuadratic: a
//   Gabor: a (envelope decay) and omega (carrier frequency)
struct ActivationSpec {
  Activation family = Activation::ReLU;
  double omega = 30.0;
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
  double d = 0.0;
  double sigma = 0.1;
  double n = 2.0;

  static ActivationSpec make(Activation family);
};

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// Throws if the family invariants are violated (sigma > 0, omega > 0, a != 0
// where required).
void validate(const ActivationSpec& spec);

double act_value(const ActivationSpec& spec, double x);
double act_grad(const ActivationSpec& spec, double x);

Tensor act_value(const ActivationSpec& spec, const Tensor& x);
Tensor act_grad(const ActivationSpec& spec, const Tensor& x);

struct ActConstants {
  std::optional<double> lipschitz;
  std::optional<double> smooth;
};

// Closed-form Lipschitz / smoothness constants where the family has one;
// nullopt otherwise.
ActConstants act_constants(const ActivationSpec& spec);

}  // namespace inrb
