#pragma once

#include <string>
#include <vector>

#include "inrb/network.hpp"
#include "inrb/tensor.hpp"

namespace inrb {

// Empirical NTK of a scalar-output network on n coordinates:
// K_ij = sum_theta dPhi(x_i)/dtheta . dPhi(x_j)/dtheta, from one backward
// pass per sample. Throws beyond n_cap samples (O(n^2 |theta|) guard).
Tensor empirical_ntk(const Network& net, const Tensor& coords, int n_cap = 512);

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Tensor vectors;              // columns matching values
};

// Cyclic Jacobi rotations for dense symmetric matrices; off-diagonal
// Frobenius norm below 1e-12 * ||K||_F at convergence. Rejects inputs with
// max asymmetry above 1e-8.
EigenDecomposition sym_eig(const Tensor& k);

struct NtkPrediction {
  Tensor values;          // [m, out]
  double condition = 0.0;
  bool pseudo_inverse = false;
};

// Linearized-training prediction K_test K^-1 (I - exp(-eta K t)) y computed
// through the eigendecomposition. Condition numbers above 1e12 fall back to a
// pseudo-inverse and set the flag.
NtkPrediction ntk_predict(const Tensor& k_train, const Tensor& k_test, const Tensor& y,
                          double eta, double t);

struct ResidualSpectrumReport {
  Tensor k;
  std::vector<double> eigenvalues;
  Tensor q;
  std::vector<int> probe_steps;
  // |Q^T e(t)| per probe step, one row per probe
  std::vector<std::vector<double>> projections;
  std::vector<double> fitted_rates;  // per eigendirection decay rates
  bool diverged = false;
};

// Trains the network with full-batch plain gradient descent on the summed
// squared error (L = 1/2 sum e^2, so rates compare against eta * lambda) and
// projects the training residual onto the NTK eigenbasis at probe steps.
ResidualSpectrumReport residual_spectrum(Network& net, const Tensor& coords, const Tensor& y,
                                         double eta, int steps, int n_probes);

// Serializes k/eigenvalues/q as raw f64 files plus a text header in dir.
void write_ntk_report(const std::string& dir, const ResidualSpectrumReport& report);

}  // namespace inrb
