#pragma once

#include <cstdint>
#include <string>

#include "inrb/tensor.hpp"

namespace inrb {

enum class Encoding { Identity, Nerf, Rff, Fkan };

// Input mapping applied to normalized coordinates in [-1,1]^d.
//
// Identity passes coordinates through. Nerf emits (sin, cos) pairs at
// frequencies 2^l pi, l = 0..levels-1, per input dimension. Rff emits
// (cos, sin) pairs at 2 pi b_i^T x with rows b_i ~ N(0, sigma^2) sampled once
// from the seed. Fkan emits learnable (a cos(w x_i), b sin(w x_i)) pairs for
// w = 1..omega_max; its coefficients live in the owning network's parameters
// as a tensor of shape [d, omega_max, 2].
struct EncodingSpec {
  Encoding kind = Encoding::Identity;
  int dims = 1;
  int nerf_levels = 16;
  int rff_features = 32;
  double rff_sigma = 10.0;
  uint64_t rff_seed = 0;
  Tensor rff_b;  // [rff_features, dims]
  int fkan_omega_max = 128;

  static EncodingSpec identity(int dims);
  static EncodingSpec nerf(int dims, int levels);
  static EncodingSpec rff(int dims, int features, double sigma, uint64_t seed);
  static EncodingSpec fkan(int dims, int omega_max);

  int out_dim() const;
  bool trainable() const { return kind == Encoding::Fkan; }
};

const char* encoding_name(Encoding e);
Encoding encoding_from_name(const std::string& name);

// Forward map. fkan_coeffs is required for the Fkan kind and ignored
// otherwise.
Tensor encode(const EncodingSpec& spec, const Tensor& x, const Tensor* fkan_coeffs = nullptr);

// Stationary kernel k(delta) from Table-style closed forms. Throws for
// Identity (its kernel x1.x2 is not a function of the difference).
double kernel_closed_form(const EncodingSpec& spec, const Tensor& delta,
                          const Tensor* fkan_coeffs = nullptr);

// Backward helpers used by the tape.
void encode_backward(const EncodingSpec& spec, const Tensor& x, const Tensor& upstream,
                     Tensor& d_x, const Tensor* fkan_coeffs = nullptr,
                     Tensor* d_fkan_coeffs = nullptr);

}  // namespace inrb
