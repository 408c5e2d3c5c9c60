#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "inrb/signal.hpp"

namespace inrb {

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

// Reads one whitespace-delimited token, skipping '#' comment lines.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

SignalGrid read_pnm(const std::string& path, bool color) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  std::string magic = next_token(in);
  const char* want = color ? "P6" : "P5";
  if (magic != want) fail(path, "malformed header: expected " + std::string(want) + ", got '" + magic + "'");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_token(in));
    h = std::stoi(next_token(in));
    maxval = std::stoi(next_token(in));
  } catch (const std::exception&) {
    fail(path, "malformed header: non-numeric dimensions");
  }
  if (w <= 0 || h <= 0) fail(path, "malformed header: bad dimensions");
  if (maxval <= 0 || maxval > 255) fail(path, "unsupported bit depth: maxval " + std::to_string(maxval));
  int ch = color ? 3 : 1;
  std::size_t need = static_cast<std::size_t>(w) * h * ch;
  std::vector<unsigned char> raw(need);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(need));
  if (static_cast<std::size_t>(in.gcount()) != need) fail(path, "truncated payload");
  SignalGrid g;
  g.dims = {h, w};
  g.channels = ch;
  g.values.resize(need);
  for (std::size_t i = 0; i < need; ++i) g.values[i] = raw[i] / static_cast<double>(maxval);
  g.range_lo = 0.0;
  g.range_hi = 1.0;
  return g;
}

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return b[0] | (b[1] << 8) | (b[2] << 16) | (uint32_t(b[3]) << 24);
}

uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<char*>(b), 4);
}

void write_u16(std::ostream& out, uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<char*>(b), 2);
}

}  // namespace

SignalGrid read_pgm(const std::string& path) { return read_pnm(path, false); }
SignalGrid read_ppm(const std::string& path) { return read_pnm(path, true); }

SignalGrid read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  char tag[5] = {0};
  in.read(tag, 4);
  if (std::strncmp(tag, "RIFF", 4) != 0) fail(path, "malformed header: not RIFF");
  read_u32(in);  // riff size
  in.read(tag, 4);
  if (std::strncmp(tag, "WAVE", 4) != 0) fail(path, "malformed header: not WAVE");

  int channels = 0, bits = 0;
  bool have_fmt = false;
  std::vector<int16_t> samples;
  while (in.read(tag, 4)) {
    uint32_t size = read_u32(in);
    if (!in) fail(path, "truncated payload");
    if (std::strncmp(tag, "fmt ", 4) == 0) {
      uint16_t format = read_u16(in);
      channels = read_u16(in);
      read_u32(in);  // sample rate
      read_u32(in);  // byte rate
      read_u16(in);  // block align
      bits = read_u16(in);
      if (size > 16) in.ignore(size - 16);
      if (format != 1) fail(path, "unsupported encoding: only PCM supported");
      if (bits != 16) fail(path, "unsupported bit depth: " + std::to_string(bits));
      if (channels != 1) fail(path, "unsupported channel count: " + std::to_string(channels));
      have_fmt = true;
    } else if (std::strncmp(tag, "data", 4) == 0) {
      if (!have_fmt) fail(path, "malformed header: data before fmt");
      std::size_t n = size / 2;
      samples.resize(n);
      in.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(n * 2));
      if (static_cast<std::size_t>(in.gcount()) != n * 2) fail(path, "truncated payload");
      break;
    } else {
      in.ignore(size + (size & 1));
    }
  }
  if (samples.empty()) fail(path, "malformed header: no data chunk");
  SignalGrid g;
  g.dims = {static_cast<int>(samples.size())};
  g.values.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) g.values[i] = samples[i] / 32768.0;
  g.range_lo = -1.0;
  g.range_hi = 1.0;
  return g;
}

void write_wav(const std::string& path, const SignalGrid& g, int sample_rate) {
  if (g.rank() != 1 || g.channels != 1) throw std::runtime_error("write_wav: expects 1-D mono signal");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  uint32_t n = static_cast<uint32_t>(g.values.size());
  out.write("RIFF", 4);
  write_u32(out, 36 + n * 2);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, 1);  // PCM
  write_u16(out, 1);  // mono
  write_u32(out, static_cast<uint32_t>(sample_rate));
  write_u32(out, static_cast<uint32_t>(sample_rate * 2));
  write_u16(out, 2);
  write_u16(out, 16);
  out.write("data", 4);
  write_u32(out, n * 2);
  for (double v : g.values) {
    double clamped = std::min(1.0, std::max(-1.0, v));
    int s = static_cast<int>(std::lround(clamped * 32767.0));
    write_u16(out, static_cast<uint16_t>(static_cast<int16_t>(s)));
  }
}

void write_pgm(const std::string& path, const SignalGrid& g) {
  if (g.rank() != 2 || g.channels != 1) throw std::runtime_error("write_pgm: expects 2-D grayscale");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << "P5\n" << g.dims[1] << " " << g.dims[0] << "\n255\n";
  for (double v : g.values) {
    double clamped = std::min(1.0, std::max(0.0, v));
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(clamped * 255.0))));
  }
}

SignalGrid read_raw_f64(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::strncmp(magic, "INRB", 4) != 0) fail(path, "malformed header: bad magic");
  uint32_t rank = read_u32(in);
  if (!in || rank == 0 || rank > 8) fail(path, "malformed header: bad rank");
  std::vector<int> dims(rank);
  std::size_t n = 1;
  for (uint32_t i = 0; i < rank; ++i) {
    uint64_t lo = read_u32(in);
    uint64_t hi = read_u32(in);
    uint64_t d = lo | (hi << 32);
    if (!in || d == 0 || d > (1ull << 31)) fail(path, "malformed header: bad extent");
    dims[i] = static_cast<int>(d);
    n *= d;
  }
  SignalGrid g;
  g.dims = dims;
  g.values.resize(n);
  in.read(reinterpret_cast<char*>(g.values.data()), static_cast<std::streamsize>(n * 8));
  if (static_cast<std::size_t>(in.gcount()) != n * 8) fail(path, "truncated payload");
  double lo = g.values.empty() ? 0.0 : g.values[0], hi = lo;
  for (double v : g.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  g.range_lo = lo;
  g.range_hi = hi;
  return g;
}

void write_raw_f64(const std::string& path, const SignalGrid& g) {
  if (g.channels != 1) throw std::runtime_error("write_raw_f64: channels not supported");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out.write("INRB", 4);
  write_u32(out, static_cast<uint32_t>(g.dims.size()));
  for (int d : g.dims) {
    write_u32(out, static_cast<uint32_t>(d));
    write_u32(out, 0);
  }
  out.write(reinterpret_cast<const char*>(g.values.data()),
            static_cast<std::streamsize>(g.values.size() * 8));
}

void write_matrix_f64(const std::string& path, const Tensor& t) {
  SignalGrid g;
  g.dims = t.shape();
  g.values = t.vec();
  write_raw_f64(path, g);
}

Tensor read_matrix_f64(const std::string& path) {
  SignalGrid g = read_raw_f64(path);
  return Tensor(g.dims, g.values);
}

SignalGrid ingest(const std::string& path) {
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "pgm") return read_pgm(path);
  if (ext == "ppm") return read_ppm(path);
  if (ext == "wav") return read_wav(path);
  if (ext == "f64") return read_raw_f64(path);
  fail(path, "unsupported format (expected .pgm/.ppm/.wav/.f64)");
}

Tensor grid_coordinates(const std::vector<int>& dims) {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  int rank = static_cast<int>(dims.size());
  Tensor coords({static_cast<int>(n), rank});
  std::vector<int> idx(rank, 0);
  for (std::size_t r = 0; r < n; ++r) {
    for (int a = 0; a < rank; ++a)
      coords.at(static_cast<int>(r), a) = -1.0 + 2.0 * (idx[a] + 0.5) / dims[a];
    for (int a = rank - 1; a >= 0; --a) {
      if (++idx[a] < dims[a]) break;
      idx[a] = 0;
    }
  }
  return coords;
}

SignalGrid generate_chirp(const GenParams& p) {
  SignalGrid g;
  g.dims = {p.size};
  g.values.resize(p.size);
  for (int i = 0; i < p.size; ++i) {
    double t = (i + 0.5) / p.size;  // unit interval, cell centered
    double phase = 2.0 * kPi * (p.f0 * t + 0.5 * (p.f1 - p.f0) * t * t);
    g.values[i] = std::sin(phase);
  }
  g.range_lo = -1.0;
  g.range_hi = 1.0;
  return g;
}

SignalGrid generate_sinusoid_mix(const GenParams& p) {
  if (p.freqs.size() != p.amps.size())
    throw std::runtime_error("sinusoid_mix: freqs and amps differ in length");
  SignalGrid g;
  g.dims = {p.size};
  g.values.resize(p.size);
  for (int i = 0; i < p.size; ++i) {
    double t = static_cast<double>(i) / p.size;  // x_k = k/n on [0,1)
    double v = 0.0;
    for (std::size_t f = 0; f < p.freqs.size(); ++f)
      v += p.amps[f] * std::sin(2.0 * kPi * p.freqs[f] * t);
    g.values[i] = v;
  }
  g.range_lo = -1.0;
  g.range_hi = 1.0;
  return g;
}

SignalGrid generate_checker_gradient(const GenParams& p) {
  SignalGrid g;
  g.dims = {p.size, p.size};
  g.values.resize(static_cast<std::size_t>(p.size) * p.size);
  int block = std::max(1, p.size / p.blocks);
  for (int r = 0; r < p.size; ++r)
    for (int c = 0; c < p.size; ++c) {
      int checker = ((r / block) + (c / block)) % 2;
      double grad = 0.5 * (static_cast<double>(r) + c) / (2.0 * (p.size - 1));
      double v = 0.15 + 0.5 * checker + grad;
      g.values[static_cast<std::size_t>(r) * p.size + c] = std::min(1.0, std::max(0.0, v));
    }
  return g;
}

SignalGrid generate_phantom(const GenParams& p) {
  // Shepp-Logan style: intensities of overlapping ellipses add up.
  struct Ellipse {
    double x, y, a, b, phi_deg, value;
  };
  static const Ellipse ellipses[] = {
      {0.0, 0.0, 0.69, 0.92, 0.0, 2.0},
      {0.0, -0.0184, 0.6624, 0.874, 0.0, -0.98},
      {0.22, 0.0, 0.11, 0.31, -18.0, -0.02},
      {-0.22, 0.0, 0.16, 0.41, 18.0, -0.02},
      {0.0, 0.35, 0.21, 0.25, 0.0, 0.01},
      {0.0, 0.1, 0.046, 0.046, 0.0, 0.01},
      {0.0, -0.1, 0.046, 0.046, 0.0, 0.01},
      {-0.08, -0.605, 0.046, 0.023, 0.0, 0.01},
      {0.0, -0.605, 0.023, 0.023, 0.0, 0.01},
      {0.06, -0.605, 0.023, 0.046, 0.0, 0.01},
  };
  SignalGrid g;
  g.dims = {p.size, p.size};
  g.values.assign(static_cast<std::size_t>(p.size) * p.size, 0.0);
  for (int r = 0; r < p.size; ++r)
    for (int c = 0; c < p.size; ++c) {
      double y = 1.0 - 2.0 * (r + 0.5) / p.size;  // row 0 at the top
      double x = -1.0 + 2.0 * (c + 0.5) / p.size;
      double v = 0.0;
      for (const Ellipse& e : ellipses) {
        double phi = e.phi_deg * kPi / 180.0;
        double dx = x - e.x, dy = y - e.y;
        double xr = dx * std::cos(phi) + dy * std::sin(phi);
        double yr = -dx * std::sin(phi) + dy * std::cos(phi);
        if (xr * xr / (e.a * e.a) + yr * yr / (e.b * e.b) <= 1.0) v += e.value;
      }
      g.values[static_cast<std::size_t>(r) * p.size + c] = v / 2.0;  // main ellipse maps to 1
    }
  return g;
}

SignalGrid generate_sphere_occupancy(const GenParams& p) {
  SignalGrid g;
  g.dims = {p.size, p.size, p.size};
  g.values.resize(g.points());
  std::size_t i = 0;
  for (int a = 0; a < p.size; ++a)
    for (int b = 0; b < p.size; ++b)
      for (int c = 0; c < p.size; ++c) {
        double x = -1.0 + 2.0 * (a + 0.5) / p.size;
        double y = -1.0 + 2.0 * (b + 0.5) / p.size;
        double z = -1.0 + 2.0 * (c + 0.5) / p.size;
        g.values[i++] = (x * x + y * y + z * z <= p.radius * p.radius) ? 1.0 : 0.0;
      }
  return g;
}

SignalGrid generate_torus_occupancy(const GenParams& p) {
  SignalGrid g;
  g.dims = {p.size, p.size, p.size};
  g.values.resize(g.points());
  std::size_t i = 0;
  for (int a = 0; a < p.size; ++a)
    for (int b = 0; b < p.size; ++b)
      for (int c = 0; c < p.size; ++c) {
        double x = -1.0 + 2.0 * (a + 0.5) / p.size;
        double y = -1.0 + 2.0 * (b + 0.5) / p.size;
        double z = -1.0 + 2.0 * (c + 0.5) / p.size;
        double ring = std::sqrt(x * x + y * y) - p.radius;
        g.values[i++] =
            (ring * ring + z * z <= p.minor_radius * p.minor_radius) ? 1.0 : 0.0;
      }
  return g;
}

SignalGrid generate(const std::string& kind, const GenParams& p) {
  if (kind == "chirp") return generate_chirp(p);
  if (kind == "sinusoid_mix") return generate_sinusoid_mix(p);
  if (kind == "checker_gradient") return generate_checker_gradient(p);
  if (kind == "phantom") return generate_phantom(p);
  if (kind == "sphere") return generate_sphere_occupancy(p);
  if (kind == "torus") return generate_torus_occupancy(p);
  throw std::runtime_error("unknown signal kind '" + kind +
                           "' (valid: chirp, sinusoid_mix, checker_gradient, phantom, sphere, "
                           "torus)");
}

}  // namespace inrb
