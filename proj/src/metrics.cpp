#include "inrb/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace inrb {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_same_size(const std::vector<double>& a, const std::vector<double>& b,
                     const char* name) {
  if (a.size() != b.size())
    throw std::runtime_error(std::string(name) + ": size mismatch " + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()));
  if (a.empty()) throw std::runtime_error(std::string(name) + ": empty input");
}
}  // namespace

double metric_snr(const std::vector<double>& pred, const std::vector<double>& target) {
  check_same_size(pred, target, "snr");
  double sig = 0.0, err = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sig += target[i] * target[i];
    double d = pred[i] - target[i];
    err += d * d;
  }
  if (sig == 0.0) throw std::runtime_error("snr: target is all-zero, SNR undefined");
  if (err < 1e-15) return 200.0;
  return 20.0 * std::log10(sig / err);
}

double metric_psnr(const std::vector<double>& pred, const std::vector<double>& target) {
  check_same_size(pred, target, "psnr");
  double mse = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    double d = pred[i] - target[i];
    mse += d * d;
  }
  mse /= static_cast<double>(pred.size());
  if (mse < 1e-20) return 200.0;
  return 10.0 * std::log10(1.0 / mse);
}

double metric_lsd(const std::vector<double>& pred, const std::vector<double>& target, int frame,
                  int hop, int* frame_used) {
  check_same_size(pred, target, "lsd");
  int n = static_cast<int>(pred.size());
  if (frame > n) {
    frame = n;
    hop = std::max(1, frame / 4);
  }
  if (frame_used) *frame_used = frame;

  int n_frames = 1 + (n - frame) / hop;
  int n_bins = frame / 2 + 1;
  const double eps = 1e-10;

  // per-frame log power spectra via direct DFT of the Hann-windowed frame
  std::vector<double> window(frame);
  for (int i = 0; i < frame; ++i) window[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / frame));

  auto log_power = [&](const std::vector<double>& sig, int start, int k) {
    double re = 0.0, im = 0.0;
    for (int i = 0; i < frame; ++i) {
      double v = sig[start + i] * window[i];
      double ang = -2.0 * kPi * k * i / frame;
      re += v * std::cos(ang);
      im += v * std::sin(ang);
    }
    return std::log(re * re + im * im + eps);
  };

  double acc = 0.0;
  for (int f = 0; f < n_frames; ++f) {
    int start = f * hop;
    double frame_acc = 0.0;
    for (int k = 0; k < n_bins; ++k) {
      double d = log_power(target, start, k) - log_power(pred, start, k);
      frame_acc += d * d;
    }
    acc += std::sqrt(frame_acc / n_bins);
  }
  return acc / n_frames;
}

double metric_iou(const std::vector<double>& pred, const std::vector<double>& target,
                  double threshold) {
  check_same_size(pred, target, "iou");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    bool p = pred[i] > threshold;
    bool t = target[i] > threshold;
    if (p && t) ++inter;
    if (p || t) ++uni;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double metric_psnr_affine(const std::vector<double>& pred, const std::vector<double>& target) {
  check_same_size(pred, target, "psnr_affine");
  double n = static_cast<double>(pred.size());
  double sp = 0.0, st = 0.0, spp = 0.0, spt = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sp += pred[i];
    st += target[i];
    spp += pred[i] * pred[i];
    spt += pred[i] * target[i];
  }
  double det = n * spp - sp * sp;
  double gain = 1.0, offset = 0.0;
  if (std::abs(det) > 1e-30) {
    gain = (n * spt - sp * st) / det;
    offset = (st - gain * sp) / n;
  } else {
    offset = (st - sp) / n;  // constant prediction: match means
  }
  std::vector<double> adjusted(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) adjusted[i] = gain * pred[i] + offset;
  return metric_psnr(adjusted, target);
}

}  // namespace inrb
