#include "inrb/encoding.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace inrb {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_fkan_coeffs(const EncodingSpec& s, const Tensor* c) {
  if (!c) throw std::runtime_error("encode: fkan kind requires a coefficient tensor");
  if (c->shape() != std::vector<int>{s.dims, s.fkan_omega_max, 2})
    throw std::runtime_error("encode: fkan coefficients " + c->shape_str() + " expected [" +
                             std::to_string(s.dims) + "," + std::to_string(s.fkan_omega_max) +
                             ",2]");
}
}  // namespace

EncodingSpec EncodingSpec::identity(int dims) {
  EncodingSpec s;
  s.kind = Encoding::Identity;
  s.dims = dims;
  return s;
}

EncodingSpec EncodingSpec::nerf(int dims, int levels) {
  EncodingSpec s;
  s.kind = Encoding::Nerf;
  s.dims = dims;
  s.nerf_levels = levels;
  return s;
}

EncodingSpec EncodingSpec::rff(int dims, int features, double sigma, uint64_t seed) {
  EncodingSpec s;
  s.kind = Encoding::Rff;
  s.dims = dims;
  s.rff_features = features;
  s.rff_sigma = sigma;
  s.rff_seed = seed;
  s.rff_b = Tensor({features, dims});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  for (std::size_t i = 0; i < s.rff_b.size(); ++i) s.rff_b[i] = dist(rng);
  return s;
}

EncodingSpec EncodingSpec::fkan(int dims, int omega_max) {
  EncodingSpec s;
  s.kind = Encoding::Fkan;
  s.dims = dims;
  s.fkan_omega_max = omega_max;
  return s;
}

int EncodingSpec::out_dim() const {
  switch (kind) {
    case Encoding::Identity: return dims;
    case Encoding::Nerf: return 2 * dims * nerf_levels;
    case Encoding::Rff: return 2 * rff_features;
    case Encoding::Fkan: return 2 * dims * fkan_omega_max;
  }
  return dims;
}

const char* encoding_name(Encoding e) {
  switch (e) {
    case Encoding::Identity: return "identity";
    case Encoding::Nerf: return "nerf";
    case Encoding::Rff: return "rff";
    case Encoding::Fkan: return "fkan";
  }
  return "?";
}

Encoding encoding_from_name(const std::string& name) {
  if (name == "identity") return Encoding::Identity;
  if (name == "nerf") return Encoding::Nerf;
  if (name == "rff") return Encoding::Rff;
  if (name == "fkan") return Encoding::Fkan;
  throw std::runtime_error("unknown encoding '" + name +
                           "' (valid: identity, nerf, rff, fkan)");
}

Tensor encode(const EncodingSpec& s, const Tensor& x, const Tensor* fkan_coeffs) {
  int batch = x.rows();
  if (x.cols() != s.dims)
    throw std::runtime_error("encode: input " + x.shape_str() + " does not match dims=" +
                             std::to_string(s.dims));
  Tensor out({batch, s.out_dim()});
  switch (s.kind) {
    case Encoding::Identity:
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i];
      return out;
    case Encoding::Nerf: {
      for (int b = 0; b < batch; ++b) {
        int o = 0;
        for (int i = 0; i < s.dims; ++i) {
          double freq = kPi;
          for (int l = 0; l < s.nerf_levels; ++l) {
            out.at(b, o++) = std::sin(freq * x.at(b, i));
            out.at(b, o++) = std::cos(freq * x.at(b, i));
            freq *= 2.0;
          }
        }
      }
      return out;
    }
    case Encoding::Rff: {
      for (int b = 0; b < batch; ++b) {
        for (int f = 0; f < s.rff_features; ++f) {
          double arg = 0.0;
          for (int i = 0; i < s.dims; ++i) arg += s.rff_b.at(f, i) * x.at(b, i);
          arg *= 2.0 * kPi;
          out.at(b, 2 * f) = std::cos(arg);
          out.at(b, 2 * f + 1) = std::sin(arg);
        }
      }
      return out;
    }
    case Encoding::Fkan: {
      check_fkan_coeffs(s, fkan_coeffs);
      const Tensor& c = *fkan_coeffs;
      int om = s.fkan_omega_max;
      for (int b = 0; b < batch; ++b) {
        int o = 0;
        for (int i = 0; i < s.dims; ++i) {
          double xi = x.at(b, i);
          for (int w = 1; w <= om; ++w) {
            double a = c[(static_cast<std::size_t>(i) * om + (w - 1)) * 2];
            double bb = c[(static_cast<std::size_t>(i) * om + (w - 1)) * 2 + 1];
            out.at(b, o++) = a * std::cos(w * xi);
            out.at(b, o++) = bb * std::sin(w * xi);
          }
        }
      }
      return out;
    }
  }
  return out;
}

void encode_backward(const EncodingSpec& s, const Tensor& x, const Tensor& upstream,
                     Tensor& d_x, const Tensor* fkan_coeffs, Tensor* d_fkan_coeffs) {
  int batch = x.rows();
  if (upstream.shape() != std::vector<int>{batch, s.out_dim()})
    throw std::runtime_error("encode_backward: upstream " + upstream.shape_str() +
                             " does not match output dim");
  if (!d_x.same_shape(x)) d_x = Tensor(x.shape());
  switch (s.kind) {
    case Encoding::Identity:
      for (std::size_t i = 0; i < x.size(); ++i) d_x[i] += upstream[i];
      return;
    case Encoding::Nerf: {
      for (int b = 0; b < batch; ++b) {
        int o = 0;
        for (int i = 0; i < s.dims; ++i) {
          double acc = 0.0;
          double freq = kPi;
          for (int l = 0; l < s.nerf_levels; ++l) {
            acc += upstream.at(b, o) * freq * std::cos(freq * x.at(b, i));
            acc -= upstream.at(b, o + 1) * freq * std::sin(freq * x.at(b, i));
            o += 2;
            freq *= 2.0;
          }
          d_x.at(b, i) += acc;
        }
      }
      return;
    }
    case Encoding::Rff: {
      for (int b = 0; b < batch; ++b) {
        for (int f = 0; f < s.rff_features; ++f) {
          double arg = 0.0;
          for (int i = 0; i < s.dims; ++i) arg += s.rff_b.at(f, i) * x.at(b, i);
          arg *= 2.0 * kPi;
          double g = -upstream.at(b, 2 * f) * std::sin(arg) +
                     upstream.at(b, 2 * f + 1) * std::cos(arg);
          for (int i = 0; i < s.dims; ++i)
            d_x.at(b, i) += g * 2.0 * kPi * s.rff_b.at(f, i);
        }
      }
      return;
    }
    case Encoding::Fkan: {
      check_fkan_coeffs(s, fkan_coeffs);
      const Tensor& c = *fkan_coeffs;
      int om = s.fkan_omega_max;
      for (int b = 0; b < batch; ++b) {
        int o = 0;
        for (int i = 0; i < s.dims; ++i) {
          double xi = x.at(b, i);
          double acc = 0.0;
          for (int w = 1; w <= om; ++w) {
            std::size_t ci = (static_cast<std::size_t>(i) * om + (w - 1)) * 2;
            double a = c[ci], bb = c[ci + 1];
            double cs = std::cos(w * xi), sn = std::sin(w * xi);
            double ga = upstream.at(b, o);
            double gb = upstream.at(b, o + 1);
            acc += ga * a * (-w * sn) + gb * bb * (w * cs);
            if (d_fkan_coeffs) {
              (*d_fkan_coeffs)[ci] += ga * cs;
              (*d_fkan_coeffs)[ci + 1] += gb * sn;
            }
            o += 2;
          }
          d_x.at(b, i) += acc;
        }
      }
      return;
    }
  }
}

double kernel_closed_form(const EncodingSpec& s, const Tensor& delta,
                          const Tensor* fkan_coeffs) {
  if (static_cast<int>(delta.size()) != s.dims)
    throw std::runtime_error("kernel_closed_form: delta has " + std::to_string(delta.size()) +
                             " entries, expected " + std::to_string(s.dims));
  switch (s.kind) {
    case Encoding::Identity:
      throw std::runtime_error(
          "kernel_closed_form: identity encoding has no stationary kernel (k = x1.x2 depends on "
          "absolute position)");
    case Encoding::Nerf: {
      double k = 0.0;
      for (int i = 0; i < s.dims; ++i) {
        double freq = kPi;
        for (int l = 0; l < s.nerf_levels; ++l) {
          k += std::cos(freq * delta[i]);
          freq *= 2.0;
        }
      }
      return k;
    }
    case Encoding::Rff: {
      double k = 0.0;
      for (int f = 0; f < s.rff_features; ++f) {
        double arg = 0.0;
        for (int i = 0; i < s.dims; ++i) arg += s.rff_b.at(f, i) * delta[i];
        k += std::cos(2.0 * kPi * arg);  // amplitudes a_i fixed to 1
      }
      return k;
    }
    case Encoding::Fkan: {
      check_fkan_coeffs(s, fkan_coeffs);
      const Tensor& c = *fkan_coeffs;
      int om = s.fkan_omega_max;
      double k = 0.0;
      for (int i = 0; i < s.dims; ++i)
        for (int w = 1; w <= om; ++w) {
          std::size_t ci = (static_cast<std::size_t>(i) * om + (w - 1)) * 2;
          k += (c[ci] * c[ci] + c[ci + 1] * c[ci + 1]) * std::cos(w * delta[i]);
        }
      return k;
    }
  }
  return 0.0;
}

}  // namespace inrb
