#pragma once

#include <string>
#include <vector>

#include "inrb/tensor.hpp"

namespace inrb {

enum class Basis {
  BSpline,
  Chebyshev,
  Chebyshev2,
  Gegenbauer,
  Hermite,
  Jacobi,
  Laguerre,
  Legendre,
  Taylor,
  Bessel,
  Fibonacci,
  Lucas,
  Fourier,
  SineBasis,
  MexicanHat,
  Meyer,
  Morlet,
  DoG,
  Shannon,
  BSRBF,
  GRBF,
  RBF,
};

// One of the 22 KAN edge-function families.
//
// degree applies to the polynomial / Fourier / SineBasis families (terms run
// n = 0..degree, Fourier and SineBasis use k = 1..degree). grid_size and
// spline_order configure the spline and radial families over
// [grid_min, grid_max]. alpha/beta parameterize Gegenbauer, Jacobi and
// Laguerre; morlet_omega0 is the Morlet carrier frequency.
struct BasisSpec {
  Basis family = Basis::BSpline;
  int degree = 4;
  int grid_size = 5;
  int spline_order = 3;
  double grid_min = -1.0;
  double grid_max = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double morlet_omega0 = 5.0;

  static BasisSpec make(Basis family);
};

const char* basis_name(Basis b);
Basis basis_from_name(const std::string& name);
void validate(const BasisSpec& spec);

// Number of learnable coefficients per edge; a pure function of the spec.
int coeff_count(const BasisSpec& spec);

// True for families whose edge output is linear in every coefficient.
bool linear_in_coefficients(const BasisSpec& spec);

// True for the polynomial families whose layer inputs are squashed with tanh
// before evaluating the recurrences.
bool uses_tanh_squash(const BasisSpec& spec);

// Cox-de Boor basis values B_{i,order}(x) for each x row entry.
// knots must be non-decreasing with at least order+2 entries; x is clamped to
// the knot span. Returns [batch, n_bases] with n_bases = knots - order - 1.
Tensor bspline_bases(const std::vector<double>& knots, int order, const Tensor& x);

// Raw basis functions (no squashing): values[k] = phi_k(x) for the
// coeff_count basis terms of a linear family, plus derivs[k] = phi_k'(x).
// Only valid for families with linear_in_coefficients(spec) == true.
void basis_functions(const BasisSpec& spec, double x, std::vector<double>& values,
                     std::vector<double>& derivs);

// One KAN layer: out[b,j] = sum_i phi_{j,i}(x[b,i]).
// coeffs has shape [n_out, n_in, coeff_count(spec)].
Tensor basis_eval(const BasisSpec& spec, const Tensor& coeffs, const Tensor& x);

struct BasisGrads {
  Tensor d_coeffs;  // shape of coeffs
  Tensor d_x;       // shape of x
};

// Vector-Jacobian products of basis_eval for a given upstream [batch, n_out].
BasisGrads basis_grads(const BasisSpec& spec, const Tensor& coeffs, const Tensor& x,
                       const Tensor& upstream);

// Uniform extended knot vector for the spec's grid (grid_size intervals,
// spline_order extra knots on each side).
std::vector<double> spline_knots(const BasisSpec& spec);

}  // namespace inrb
