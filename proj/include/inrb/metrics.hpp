#pragma once

#include <vector>

#include "inrb/tensor.hpp"

namespace inrb {

// SNR(y_hat, y) = 20 log10(||y||^2 / ||y_hat - y||^2), the squared-norm form.
// Squared error norm below 1e-15 caps at +200 dB; an all-zero target is an
// error.
double metric_snr(const std::vector<double>& pred, const std::vector<double>& target);

// PSNR for values in [0,1]: 10 log10(1 / MSE), capped at 200 dB when
// MSE < 1e-20.
double metric_psnr(const std::vector<double>& pred, const std::vector<double>& target);

// Log-spectral distance over Hann-windowed frames (defaults 2048/512); the
// frame shrinks to the signal length when the signal is shorter.
// frame_used, when given, receives the effective frame length.
double metric_lsd(const std::vector<double>& pred, const std::vector<double>& target,
                  int frame = 2048, int hop = 512, int* frame_used = nullptr);

// IoU of thresholded occupancies; both empty counts as 1.
double metric_iou(const std::vector<double>& pred, const std::vector<double>& target,
                  double threshold = 0.5);

// Least-squares gain/offset fit of pred to target before PSNR; used by the
// Poisson tasks whose supervision leaves the image mean unconstrained.
double metric_psnr_affine(const std::vector<double>& pred, const std::vector<double>& target);

}  // namespace inrb
