#include "inrb/kan.hpp"

#include <cmath>
#include <stdexcept>

namespace inrb {

BasisSpec BasisSpec::make(Basis family) {
  BasisSpec s;
  s.family = family;
  switch (family) {
    case Basis::Fourier:
    case Basis::SineBasis:
      s.degree = 8;
      break;
    case Basis::GRBF:
    case Basis::RBF:
      s.grid_size = 8;
      break;
    default:
      break;
  }
  return s;
}

const char* basis_name(Basis b) {
  switch (b) {
    case Basis::BSpline: return "bspline";
    case Basis::Chebyshev: return "chebyshev";
    case Basis::Chebyshev2: return "chebyshev2";
    case Basis::Gegenbauer: return "gegenbauer";
    case Basis::Hermite: return "hermite";
    case Basis::Jacobi: return "jacobi";
    case Basis::Laguerre: return "laguerre";
    case Basis::Legendre: return "legendre";
    case Basis::Taylor: return "taylor";
    case Basis::Bessel: return "bessel";
    case Basis::Fibonacci: return "fibonacci";
    case Basis::Lucas: return "lucas";
    case Basis::Fourier: return "fourier";
    case Basis::SineBasis: return "sine_basis";
    case Basis::MexicanHat: return "mexican_hat";
    case Basis::Meyer: return "meyer";
    case Basis::Morlet: return "morlet";
    case Basis::DoG: return "dog";
    case Basis::Shannon: return "shannon";
    case Basis::BSRBF: return "bsrbf";
    case Basis::GRBF: return "grbf";
    case Basis::RBF: return "rbf";
  }
  return "?";
}

Basis basis_from_name(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(Basis::RBF); ++i) {
    Basis b = static_cast<Basis>(i);
    if (name == basis_name(b)) return b;
  }
  std::string valid;
  for (int i = 0; i <= static_cast<int>(Basis::RBF); ++i) {
    if (!valid.empty()) valid += ", ";
    valid += basis_name(static_cast<Basis>(i));
  }
  throw std::runtime_error("unknown basis '" + name + "' (valid: " + valid + ")");
}

void validate(const BasisSpec& s) {
  if (s.degree < 1) throw std::runtime_error("basis: degree must be >= 1");
  if (s.grid_size < 2) throw std::runtime_error("basis: grid_size must be >= 2");
  if (s.spline_order < 1) throw std::runtime_error("basis: spline_order must be >= 1");
  if (!(s.grid_max > s.grid_min)) throw std::runtime_error("basis: empty grid range");
  if (s.family == Basis::Gegenbauer && s.alpha == 0.0)
    throw std::runtime_error("gegenbauer: alpha must be nonzero");
}

namespace {

bool is_poly(Basis b) {
  switch (b) {
    case Basis::Chebyshev:
    case Basis::Chebyshev2:
    case Basis::Gegenbauer:
    case Basis::Hermite:
    case Basis::Jacobi:
    case Basis::Laguerre:
    case Basis::Legendre:
    case Basis::Taylor:
    case Basis::Bessel:
    case Basis::Fibonacci:
    case Basis::Lucas:
      return true;
    default:
      return false;
  }
}

bool is_wavelet(Basis b) {
  switch (b) {
    case Basis::MexicanHat:
    case Basis::Meyer:
    case Basis::Morlet:
    case Basis::DoG:
    case Basis::Shannon:
      return true;
    default:
      return false;
  }
}

double silu(double x) { return x / (1.0 + std::exp(-x)); }
double silu_deriv(double x) {
  double s = 1.0 / (1.0 + std::exp(-x));
  return s + x * s * (1.0 - s);
}

// sin(u)/u with series fallback near zero.
double sinc_core(double u) {
  if (std::abs(u) < 1e-4) return 1.0 - u * u / 6.0 + u * u * u * u / 120.0;
  return std::sin(u) / u;
}
double sinc_core_deriv(double u) {
  if (std::abs(u) < 1e-4) return -u / 3.0 + u * u * u / 30.0;
  return (u * std::cos(u) - std::sin(u)) / (u * u);
}

constexpr double kPi = 3.14159265358979323846;

// Mother wavelets: value and derivative w.r.t. the scaled input.
void wavelet_psi(const BasisSpec& s, double u, double& psi, double& dpsi) {
  switch (s.family) {
    case Basis::MexicanHat: {
      const double c = 2.0 / (std::sqrt(3.0) * std::pow(kPi, 0.25));
      double e = std::exp(-u * u / 2.0);
      psi = c * (u * u - 1.0) * e;
      dpsi = c * u * (3.0 - u * u) * e;
      return;
    }
    case Basis::Meyer: {
      double v = std::abs(u);
      double sgn = u > 0 ? 1.0 : (u < 0 ? -1.0 : 0.0);
      double aux, daux;
      if (v <= 0.5) {
        aux = 1.0;
        daux = 0.0;
      } else if (v >= 1.0) {
        aux = 0.0;
        daux = 0.0;
      } else {
        double t = 2.0 * v - 1.0;
        double nu = t * t * t * t * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t);
        double dnu = 140.0 * t * t * t * (1.0 - t) * (1.0 - t) * (1.0 - t);
        aux = std::cos(kPi / 2.0 * nu);
        daux = -std::sin(kPi / 2.0 * nu) * (kPi / 2.0) * dnu * 2.0;
      }
      psi = std::sin(kPi * v) * aux;
      dpsi = sgn * (kPi * std::cos(kPi * v) * aux + std::sin(kPi * v) * daux);
      return;
    }
    case Basis::Morlet: {
      double e = std::exp(-u * u / 2.0);
      double w0 = s.morlet_omega0;
      psi = e * std::cos(w0 * u);
      dpsi = -e * (u * std::cos(w0 * u) + w0 * std::sin(w0 * u));
      return;
    }
    case Basis::DoG: {
      double e = std::exp(-u * u / 2.0);
      psi = -u * e;
      dpsi = (u * u - 1.0) * e;
      return;
    }
    case Basis::Shannon: {
      // Hamming window over the clamped scaled input, half-width 4.
      const double bw = 4.0;
      double w = std::min(std::max(u, -bw), bw);
      double ham = 0.54 + 0.46 * std::cos(kPi * w / bw);
      double dham = (std::abs(u) < bw) ? -0.46 * kPi / bw * std::sin(kPi * u / bw) : 0.0;
      double sc = sinc_core(u);
      psi = sc * ham;
      dpsi = sinc_core_deriv(u) * ham + sc * dham;
      return;
    }
    default:
      throw std::runtime_error("wavelet_psi: not a wavelet family");
  }
}

void bspline_point(const std::vector<double>& knots, int order, double x,
                   std::vector<double>& vals, std::vector<double>& derivs) {
  int m = static_cast<int>(knots.size());
  int nb = m - order - 1;
  vals.assign(nb, 0.0);
  derivs.assign(nb, 0.0);

  double lo = knots[order];
  double hi = knots[nb];
  double u = std::min(std::max(x, lo), hi);
  if (u >= hi) u = hi - (hi - lo) * 1e-12;  // keep the last indicator interval active

  // degree-0 indicators
  std::vector<double> b(m - 1, 0.0);
  for (int i = 0; i + 1 < m; ++i) b[i] = (knots[i] <= u && u < knots[i + 1]) ? 1.0 : 0.0;

  std::vector<double> prev;
  for (int p = 1; p <= order; ++p) {
    prev = b;
    for (int i = 0; i + p + 1 < m; ++i) {
      double left = 0.0, right = 0.0;
      double den1 = knots[i + p] - knots[i];
      double den2 = knots[i + p + 1] - knots[i + 1];
      if (den1 > 0.0) left = (u - knots[i]) / den1 * prev[i];
      if (den2 > 0.0) right = (knots[i + p + 1] - u) / den2 * prev[i + 1];
      b[i] = left + right;
    }
  }
  for (int i = 0; i < nb; ++i) vals[i] = b[i];

  if (order >= 1) {
    // prev holds the degree (order-1) bases after the final sweep
    bool clamped = (x < lo) || (x > hi);
    for (int i = 0; i < nb && !clamped; ++i) {
      double a = 0.0, c = 0.0;
      double den1 = knots[i + order] - knots[i];
      double den2 = knots[i + order + 1] - knots[i + 1];
      if (den1 > 0.0) a = prev[i] / den1;
      if (den2 > 0.0) c = prev[i + 1] / den2;
      derivs[i] = order * (a - c);
    }
  }
}

std::vector<double> radial_centers(const BasisSpec& s, int count) {
  std::vector<double> c(count);
  for (int i = 0; i < count; ++i)
    c[i] = s.grid_min + (s.grid_max - s.grid_min) * (count == 1 ? 0.5 : double(i) / (count - 1));
  return c;
}

}  // namespace

std::vector<double> spline_knots(const BasisSpec& s) {
  int g = s.grid_size;
  int k = s.spline_order;
  double h = (s.grid_max - s.grid_min) / g;
  std::vector<double> knots(g + 2 * k + 1);
  for (int i = 0; i < static_cast<int>(knots.size()); ++i)
    knots[i] = s.grid_min + (i - k) * h;
  return knots;
}

int coeff_count(const BasisSpec& s) {
  switch (s.family) {
    case Basis::BSpline: return 1 + s.grid_size + s.spline_order;
    case Basis::Fourier: return 2 * s.degree;
    case Basis::SineBasis: return 3 * s.degree;
    case Basis::MexicanHat:
    case Basis::Meyer:
    case Basis::Morlet:
    case Basis::DoG:
    case Basis::Shannon:
      return 3;  // weight, translation, scale
    case Basis::BSRBF: return s.grid_size + s.spline_order;
    case Basis::GRBF:
    case Basis::RBF:
      return s.grid_size;
    default:
      return s.degree + 1;  // polynomial families, terms n = 0..P
  }
}

bool linear_in_coefficients(const BasisSpec& s) {
  return !is_wavelet(s.family) && s.family != Basis::SineBasis;
}

bool uses_tanh_squash(const BasisSpec& s) { return is_poly(s.family); }

Tensor bspline_bases(const std::vector<double>& knots, int order, const Tensor& x) {
  if (static_cast<int>(knots.size()) < order + 2)
    throw std::runtime_error("bspline_bases: need at least order+2 knots");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (knots[i] < knots[i - 1]) throw std::runtime_error("bspline_bases: knots must be non-decreasing");
  if (!(knots.back() > knots.front()))
    throw std::runtime_error("bspline_bases: degenerate knot vector");

  int nb = static_cast<int>(knots.size()) - order - 1;
  int n = static_cast<int>(x.size());
  Tensor out({n, nb});
  std::vector<double> vals, derivs;
  for (int r = 0; r < n; ++r) {
    bspline_point(knots, order, x[r], vals, derivs);
    for (int i = 0; i < nb; ++i) out.at(r, i) = vals[i];
  }
  return out;
}

void basis_functions(const BasisSpec& s, double x, std::vector<double>& values,
                     std::vector<double>& derivs) {
  int cc = coeff_count(s);
  values.assign(cc, 0.0);
  derivs.assign(cc, 0.0);
  switch (s.family) {
    case Basis::BSpline: {
      auto knots = spline_knots(s);
      std::vector<double> bv, bd;
      bspline_point(knots, s.spline_order, x, bv, bd);
      values[0] = silu(x);
      derivs[0] = silu_deriv(x);
      for (std::size_t i = 0; i < bv.size(); ++i) {
        values[1 + i] = bv[i];
        derivs[1 + i] = bd[i];
      }
      return;
    }
    case Basis::BSRBF: {
      auto knots = spline_knots(s);
      std::vector<double> bv, bd;
      bspline_point(knots, s.spline_order, x, bv, bd);
      auto centers = radial_centers(s, cc);
      double width = (s.grid_max - s.grid_min) / s.grid_size;
      for (int i = 0; i < cc; ++i) {
        double t = (x - centers[i]) / width;
        double r = std::exp(-t * t);
        values[i] = bv[i] + r;
        derivs[i] = bd[i] - 2.0 * t / width * r;
      }
      return;
    }
    case Basis::GRBF: {
      auto centers = radial_centers(s, cc);
      for (int i = 0; i < cc; ++i) {
        double t = x - centers[i];
        values[i] = std::exp(-t * t);
        derivs[i] = -2.0 * t * values[i];
      }
      return;
    }
    case Basis::RBF: {
      auto centers = radial_centers(s, cc);
      double delta = (s.grid_max - s.grid_min) / (s.grid_size - 1);
      for (int i = 0; i < cc; ++i) {
        double t = (x - centers[i]) / delta;
        values[i] = std::exp(-t * t);
        derivs[i] = -2.0 * t / delta * values[i];
      }
      return;
    }
    case Basis::Fourier: {
      for (int k = 1; k <= s.degree; ++k) {
        values[2 * (k - 1)] = std::cos(k * x);
        values[2 * (k - 1) + 1] = std::sin(k * x);
        derivs[2 * (k - 1)] = -k * std::sin(k * x);
        derivs[2 * (k - 1) + 1] = k * std::cos(k * x);
      }
      return;
    }
    default:
      break;
  }

  // Polynomial recurrences: terms n = 0..degree with derivatives carried
  // through the recurrence.
  int P = s.degree;
  auto& v = values;
  auto& d = derivs;
  switch (s.family) {
    case Basis::Chebyshev:
    case Basis::Chebyshev2: {
      v[0] = 1.0;
      d[0] = 0.0;
      if (P >= 1) {
        v[1] = s.family == Basis::Chebyshev ? x : 2.0 * x;
        d[1] = s.family == Basis::Chebyshev ? 1.0 : 2.0;
      }
      for (int n = 2; n <= P; ++n) {
        v[n] = 2.0 * x * v[n - 1] - v[n - 2];
        d[n] = 2.0 * v[n - 1] + 2.0 * x * d[n - 1] - d[n - 2];
      }
      return;
    }
    case Basis::Gegenbauer: {
      v[0] = 1.0;
      if (P >= 1) {
        v[1] = 2.0 * s.alpha * x;
        d[1] = 2.0 * s.alpha;
      }
      for (int n = 1; n + 1 <= P; ++n) {
        v[n + 1] = (2.0 * (n + s.alpha) * x * v[n] - (n + 2.0 * s.alpha - 1.0) * v[n - 1]) / (n + 1);
        d[n + 1] =
            (2.0 * (n + s.alpha) * (v[n] + x * d[n]) - (n + 2.0 * s.alpha - 1.0) * d[n - 1]) /
            (n + 1);
      }
      return;
    }
    case Basis::Hermite: {
      v[0] = 1.0;
      if (P >= 1) {
        v[1] = 2.0 * x;
        d[1] = 2.0;
      }
      for (int n = 2; n <= P; ++n) {
        v[n] = 2.0 * x * v[n - 1] - 2.0 * (n - 1) * v[n - 2];
        d[n] = 2.0 * v[n - 1] + 2.0 * x * d[n - 1] - 2.0 * (n - 1) * d[n - 2];
      }
      return;
    }
    case Basis::Jacobi: {
      double al = s.alpha, be = s.beta;
      v[0] = 1.0;
      if (P >= 1) {
        v[1] = 0.5 * ((al - be) + (al + be + 2.0) * x);
        d[1] = 0.5 * (al + be + 2.0);
      }
      for (int n = 1; n + 1 <= P; ++n) {
        double c1 = 2.0 * (n + 1) * (n + al + be + 1.0) * (2.0 * n + al + be);
        double c2 = (2.0 * n + al + be + 1.0) * (al * al - be * be);
        double c3 = (2.0 * n + al + be) * (2.0 * n + al + be + 1.0) * (2.0 * n + al + be + 2.0);
        double c4 = 2.0 * (n + al) * (n + be) * (2.0 * n + al + be + 2.0);
        v[n + 1] = ((c2 + c3 * x) * v[n] - c4 * v[n - 1]) / c1;
        d[n + 1] = (c3 * v[n] + (c2 + c3 * x) * d[n] - c4 * d[n - 1]) / c1;
      }
      return;
    }
    case Basis::Laguerre: {
      double al = s.alpha;
      v[0] = 1.0;
      if (P >= 1) {
        v[1] = 1.0 + al - x;
        d[1] = -1.0;
      }
      for (int n = 1; n + 1 <= P; ++n) {
        v[n + 1] = ((2.0 * n + 1.0 + al - x) * v[n] - (n + al) * v[n - 1]) / (n + 1);
        d[n + 1] = ((2.0 * n + 1.0 + al - x) * d[n] - v[n] - (n + al) * d[n - 1]) / (n + 1);
      }
      return;
    }
    case Basis::Legendre: {
      v[0] = 1.0;
      if (P >= 1) {
        v[1] = x;
        d[1] = 1.0;
      }
      for (int n = 1; n + 1 <= P; ++n) {
        v[n + 1] = ((2.0 * n + 1.0) * x * v[n] - n * v[n - 1]) / (n + 1);
        d[n + 1] = ((2.0 * n + 1.0) * (v[n] + x * d[n]) - n * d[n - 1]) / (n + 1);
      }
      return;
    }
    case Basis::Taylor: {
      double p = 1.0;
      for (int n = 0; n <= P; ++n) {
        v[n] = p;
        d[n] = n == 0 ? 0.0 : n * v[n - 1];
        p *= x;
      }
      return;
    }
    case Basis::Bessel: {
      v[0] = 1.0;
      if (P >= 1) {
        v[1] = x + 1.0;
        d[1] = 1.0;
      }
      for (int n = 2; n <= P; ++n) {
        v[n] = (2.0 * n - 1.0) * x * v[n - 1] + v[n - 2];
        d[n] = (2.0 * n - 1.0) * (v[n - 1] + x * d[n - 1]) + d[n - 2];
      }
      return;
    }
    case Basis::Fibonacci: {
      v[0] = 0.0;
      if (P >= 1) {
        v[1] = 1.0;
        d[1] = 0.0;
      }
      for (int n = 2; n <= P; ++n) {
        v[n] = x * v[n - 1] + v[n - 2];
        d[n] = v[n - 1] + x * d[n - 1] + d[n - 2];
      }
      return;
    }
    case Basis::Lucas: {
      v[0] = 2.0;
      if (P >= 1) {
        v[1] = x;
        d[1] = 1.0;
      }
      for (int n = 2; n <= P; ++n) {
        v[n] = x * v[n - 1] + v[n - 2];
        d[n] = v[n - 1] + x * d[n - 1] + d[n - 2];
      }
      return;
    }
    default:
      throw std::runtime_error("basis_functions: family has per-edge nonlinear parameters");
  }
}

namespace {

void check_layer_shapes(const BasisSpec& s, const Tensor& coeffs, const Tensor& x) {
  validate(s);
  int cc = coeff_count(s);
  if (coeffs.shape().size() != 3 || coeffs.shape()[2] != cc)
    throw std::runtime_error(std::string("basis_eval: ") + basis_name(s.family) +
                             " expects coeffs [n_out,n_in," + std::to_string(cc) + "], got " +
                             coeffs.shape_str());
  if (x.shape().size() != 2 || x.shape()[1] != coeffs.shape()[1])
    throw std::runtime_error("basis_eval: input " + x.shape_str() +
                             " does not match coeffs " + coeffs.shape_str());
}

// Per-edge evaluation for the wavelet and SineBasis families.
// c points at the edge's coefficients; dc, when non-null, receives d(out)/dc.
double edge_eval(const BasisSpec& s, const double* c, double x, double* dc, double* dx) {
  if (s.family == Basis::SineBasis) {
    double value = 0.0, grad = 0.0;
    for (int k = 0; k < s.degree; ++k) {
      double a = c[3 * k], w = c[3 * k + 1], b = c[3 * k + 2];
      double arg = w * x + b;
      double sn = std::sin(arg), cs = std::cos(arg);
      value += a * sn;
      grad += a * w * cs;
      if (dc) {
        dc[3 * k] = sn;
        dc[3 * k + 1] = a * x * cs;
        dc[3 * k + 2] = a * cs;
      }
    }
    if (dx) *dx = grad;
    return value;
  }
  // wavelets: c = [weight, translation, scale]
  double w = c[0], tr = c[1], sc = c[2];
  double u = (x - tr) / sc;
  double psi, dpsi;
  wavelet_psi(s, u, psi, dpsi);
  if (dc) {
    dc[0] = psi;
    dc[1] = -w * dpsi / sc;
    dc[2] = -w * dpsi * u / sc;
  }
  if (dx) *dx = w * dpsi / sc;
  return w * psi;
}

}  // namespace

Tensor basis_eval(const BasisSpec& s, const Tensor& coeffs, const Tensor& x) {
  check_layer_shapes(s, coeffs, x);
  int n_out = coeffs.shape()[0];
  int n_in = coeffs.shape()[1];
  int cc = coeffs.shape()[2];
  int batch = x.shape()[0];
  Tensor out({batch, n_out});

  if (linear_in_coefficients(s)) {
    bool squash = uses_tanh_squash(s);
    std::vector<double> vals, derivs;
    for (int b = 0; b < batch; ++b) {
      for (int i = 0; i < n_in; ++i) {
        double u = squash ? std::tanh(x.at(b, i)) : x.at(b, i);
        basis_functions(s, u, vals, derivs);
        for (int j = 0; j < n_out; ++j) {
          const double* c = coeffs.data() + (static_cast<std::size_t>(j) * n_in + i) * cc;
          double acc = 0.0;
          for (int k = 0; k < cc; ++k) acc += c[k] * vals[k];
          out.at(b, j) += acc;
        }
      }
    }
  } else {
    for (int b = 0; b < batch; ++b)
      for (int i = 0; i < n_in; ++i)
        for (int j = 0; j < n_out; ++j) {
          const double* c = coeffs.data() + (static_cast<std::size_t>(j) * n_in + i) * cc;
          out.at(b, j) += edge_eval(s, c, x.at(b, i), nullptr, nullptr);
        }
  }
  return out;
}

BasisGrads basis_grads(const BasisSpec& s, const Tensor& coeffs, const Tensor& x,
                       const Tensor& upstream) {
  check_layer_shapes(s, coeffs, x);
  int n_out = coeffs.shape()[0];
  int n_in = coeffs.shape()[1];
  int cc = coeffs.shape()[2];
  int batch = x.shape()[0];
  if (upstream.shape() != std::vector<int>{batch, n_out})
    throw std::runtime_error("basis_grads: upstream " + upstream.shape_str() + " expected [" +
                             std::to_string(batch) + "," + std::to_string(n_out) + "]");

  BasisGrads g{Tensor(coeffs.shape()), Tensor(x.shape())};

  if (linear_in_coefficients(s)) {
    bool squash = uses_tanh_squash(s);
    std::vector<double> vals, derivs;
    for (int b = 0; b < batch; ++b) {
      for (int i = 0; i < n_in; ++i) {
        double raw = x.at(b, i);
        double u = squash ? std::tanh(raw) : raw;
        double du = squash ? 1.0 - u * u : 1.0;
        basis_functions(s, u, vals, derivs);
        double dxi = 0.0;
        for (int j = 0; j < n_out; ++j) {
          double up = upstream.at(b, j);
          if (up == 0.0) continue;
          std::size_t base = (static_cast<std::size_t>(j) * n_in + i) * cc;
          const double* c = coeffs.data() + base;
          double* dci = g.d_coeffs.data() + base;
          double chain = 0.0;
          for (int k = 0; k < cc; ++k) {
            dci[k] += up * vals[k];
            chain += c[k] * derivs[k];
          }
          dxi += up * chain;
        }
        g.d_x.at(b, i) += dxi * du;
      }
    }
  } else {
    std::vector<double> dc(cc);
    for (int b = 0; b < batch; ++b)
      for (int i = 0; i < n_in; ++i)
        for (int j = 0; j < n_out; ++j) {
          double up = upstream.at(b, j);
          if (up == 0.0) continue;
          std::size_t base = (static_cast<std::size_t>(j) * n_in + i) * cc;
          double dx = 0.0;
          edge_eval(s, coeffs.data() + base, x.at(b, i), dc.data(), &dx);
          double* dci = g.d_coeffs.data() + base;
          for (int k = 0; k < cc; ++k) dci[k] += up * dc[k];
          g.d_x.at(b, i) += up * dx;
        }
  }
  return g;
}

}  // namespace inrb
