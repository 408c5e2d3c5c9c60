#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "inrb/tensor.hpp"

namespace inrb {

// A sampled signal on a regular grid: 1-D audio, 2-D image (optionally with
// channels), or 3-D occupancy. Values are stored row-major over dims, with
// channels fastest.
struct SignalGrid {
  std::vector<int> dims;
  int channels = 1;
  std::vector<double> values;
  double range_lo = 0.0;  // declared value range metadata
  double range_hi = 1.0;

  std::size_t points() const {
    std::size_t n = 1;
    for (int d : dims) n *= static_cast<std::size_t>(d);
    return n;
  }
  std::size_t total() const { return points() * channels; }
  int rank() const { return static_cast<int>(dims.size()); }
};

// File ingestion. Formats: binary PGM (P5) and PPM (P6) with maxval <= 255,
// 16-bit PCM mono WAV, and the raw f64 container (magic "INRB", u32 rank,
// u64 dims, little-endian f64 payload). Image values scale to [0,1], audio
// to [-1,1].
SignalGrid ingest(const std::string& path);
SignalGrid read_pgm(const std::string& path);
SignalGrid read_ppm(const std::string& path);
SignalGrid read_wav(const std::string& path);
SignalGrid read_raw_f64(const std::string& path);

void write_pgm(const std::string& path, const SignalGrid& g);
void write_wav(const std::string& path, const SignalGrid& g, int sample_rate = 8000);
void write_raw_f64(const std::string& path, const SignalGrid& g);

// Raw f64 container for plain matrices (used by the NTK report).
void write_matrix_f64(const std::string& path, const Tensor& t);
Tensor read_matrix_f64(const std::string& path);

// Procedural desk-scale signals.
struct GenParams {
  int size = 64;          // grid edge (image/volume) or sample count (audio)
  uint64_t seed = 0;
  double f0 = 10.0;       // chirp start frequency (cycles over the unit interval)
  double f1 = 120.0;      // chirp end frequency
  std::vector<double> freqs = {1.0};  // sinusoid-mix frequencies (cycles)
  std::vector<double> amps = {1.0};
  int blocks = 8;         // checker blocks per axis
  double radius = 0.5;    // sphere/torus major radius
  double minor_radius = 0.25;
};

SignalGrid generate_chirp(const GenParams& p);
SignalGrid generate_sinusoid_mix(const GenParams& p);
SignalGrid generate_checker_gradient(const GenParams& p);
SignalGrid generate_phantom(const GenParams& p);       // Shepp-Logan style ellipses
SignalGrid generate_sphere_occupancy(const GenParams& p);
SignalGrid generate_torus_occupancy(const GenParams& p);
SignalGrid generate(const std::string& kind, const GenParams& p);

// Cell-centered coordinates in [-1,1]^rank for every grid point, row-major.
Tensor grid_coordinates(const std::vector<int>& dims);

}  // namespace inrb
