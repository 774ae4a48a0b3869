#include "spdc/hologram.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <fstream>
#include <memory>
#include <numbers>

#include "spdc/errors.hpp"

namespace spdc {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct FftwDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

FftwBuffer alloc_fftw(size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (!p) throw std::bad_alloc();
  return FftwBuffer(p);
}

double pixel_x(const SlmSpec& spec, int col) {
  return (col - 0.5 * (spec.width_px - 1)) * spec.pixel_pitch;
}

double pixel_y(const SlmSpec& spec, int row) {
  return (0.5 * (spec.height_px - 1) - row) * spec.pixel_pitch;
}

// Field samples at the pixel centers, same (row, col) layout as the hologram.
Eigen::MatrixXcd sample_on_slm(const ModeField& field, const SlmSpec& spec) {
  Eigen::MatrixXcd out(spec.height_px, spec.width_px);
  for (int row = 0; row < spec.height_px; ++row) {
    const double y = pixel_y(spec, row);
    for (int col = 0; col < spec.width_px; ++col)
      out(row, col) = field.amplitude(pixel_x(spec, col), y);
  }
  return out;
}

// Carrier offset in FFT bins and the window half-widths that keep the first
// order clear of both the zeroth order and the Nyquist wrap.
struct Window {
  int carrier = 0;
  int half_x = 0;
  int half_y = 0;
};

Window first_order_window(const SlmSpec& spec) {
  Window win;
  win.carrier = static_cast<int>(
      std::llround(spec.width_px * spec.pixel_pitch / spec.grating_period));
  if (win.carrier < 4)
    throw ConfigError(
        "first diffraction order sits on the zeroth order: grating period too "
        "large for the panel width");
  win.half_x = std::min(win.carrier / 2, spec.width_px / 2 - win.carrier);
  win.half_y = std::min(win.half_x, spec.height_px / 2 - 1);
  if (win.half_x < 2 || win.half_y < 1)
    throw ConfigError(
        "first diffraction order too close to the Nyquist edge: grating period "
        "too small to isolate");
  return win;
}

}  // namespace

void validate(const SlmSpec& spec) {
  if (spec.width_px < 8 || spec.height_px < 8)
    throw ConfigError("SLM needs at least 8x8 pixels");
  if (!(spec.pixel_pitch > 0.0)) throw ConfigError("pixel pitch must be positive");
  if (!(spec.grating_period >= 2.0 * spec.pixel_pitch))
    throw ConfigError("grating period under-resolved: need at least 2 pixels per period");
  if (spec.phase_levels < 2) throw ConfigError("need at least 2 phase levels");
}

Hologram encode(const ModeField& field, const SlmSpec& spec) {
  validate(spec);

  Eigen::MatrixXcd samples = sample_on_slm(field, spec);

  // Canonicalize the global phase: rotate so the peak-amplitude pixel is
  // real positive (first such pixel in row-major order on exact ties).
  double peak = 0.0;
  complexd peak_value = 0.0;
  for (int row = 0; row < spec.height_px; ++row)
    for (int col = 0; col < spec.width_px; ++col) {
      const double a = std::abs(samples(row, col));
      if (a > peak) {
        peak = a;
        peak_value = samples(row, col);
      }
    }
  if (!(peak > 0.0))
    throw std::invalid_argument("cannot encode an identically zero field");
  samples *= std::conj(peak_value) / std::abs(peak_value);

  Hologram holo;
  holo.spec = spec;
  holo.phase.resize(spec.height_px, spec.width_px);
  const double level_step = kTwoPi / spec.phase_levels;
  for (int row = 0; row < spec.height_px; ++row) {
    for (int col = 0; col < spec.width_px; ++col) {
      const complexd f = samples(row, col);
      const double depth = std::abs(f) / peak;
      const double carrier =
          kTwoPi * pixel_x(spec, col) / spec.grating_period + std::arg(f);
      double saw = std::fmod(carrier, kTwoPi);
      if (saw < 0.0) saw += kTwoPi;
      const double phase = std::numbers::pi + depth * (saw - std::numbers::pi);
      // Quantize; the epsilon keeps exact level values from flooring down.
      double q = std::floor(phase / level_step + 1e-9);
      if (q >= spec.phase_levels) q = spec.phase_levels - 1;
      if (q < 0.0) q = 0.0;
      holo.phase(row, col) = q * level_step;
    }
  }
  return holo;
}

double verify_first_order(const Hologram& holo, const ModeField& target) {
  const SlmSpec& spec = holo.spec;
  validate(spec);
  if (holo.phase.rows() != spec.height_px || holo.phase.cols() != spec.width_px)
    throw std::invalid_argument("hologram phase map does not match its SLM spec");
  const Window win = first_order_window(spec);

  const int w = spec.width_px;
  const int h = spec.height_px;
  const size_t n = static_cast<size_t>(w) * h;
  FftwBuffer buf = alloc_fftw(n);
  FftwBuffer spectrum = alloc_fftw(n);

  for (int row = 0; row < h; ++row)
    for (int col = 0; col < w; ++col) {
      const size_t at = static_cast<size_t>(row) * w + col;
      buf[at][0] = std::cos(holo.phase(row, col));
      buf[at][1] = std::sin(holo.phase(row, col));
    }

  fftw_plan forward = fftw_plan_dft_2d(h, w, buf.get(), spectrum.get(),
                                       FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(forward);
  fftw_destroy_plan(forward);

  // Move the windowed first order to baseband, zero everything else.
  for (size_t k = 0; k < n; ++k) buf[k][0] = buf[k][1] = 0.0;
  for (int ky = -win.half_y; ky <= win.half_y; ++ky) {
    const int src_row = (ky % h + h) % h;
    for (int kx = -win.half_x; kx <= win.half_x; ++kx) {
      const int src_col = ((win.carrier + kx) % w + w) % w;
      const int dst_col = (kx % w + w) % w;
      const size_t src = static_cast<size_t>(src_row) * w + src_col;
      const size_t dst = static_cast<size_t>(src_row) * w + dst_col;
      buf[dst][0] = spectrum[src][0];
      buf[dst][1] = spectrum[src][1];
    }
  }

  fftw_plan backward = fftw_plan_dft_2d(h, w, buf.get(), spectrum.get(),
                                        FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(backward);
  fftw_destroy_plan(backward);

  const Eigen::MatrixXcd t = sample_on_slm(target, spec);
  complexd overlap = 0.0;
  double rec_norm2 = 0.0;
  for (int row = 0; row < h; ++row)
    for (int col = 0; col < w; ++col) {
      const size_t at = static_cast<size_t>(row) * w + col;
      const complexd r(spectrum[at][0], spectrum[at][1]);
      overlap += std::conj(t(row, col)) * r;
      rec_norm2 += std::norm(r);
    }
  const double tgt_norm2 = t.squaredNorm();
  if (!(tgt_norm2 > 0.0))
    throw std::invalid_argument("verification target is identically zero");
  if (rec_norm2 <= 1e-30 * tgt_norm2) return 0.0;
  return std::norm(overlap) / (tgt_norm2 * rec_norm2);
}

std::vector<std::uint8_t> to_gray8(const Hologram& holo) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(static_cast<size_t>(holo.phase.size()));
  for (Eigen::Index row = 0; row < holo.phase.rows(); ++row)
    for (Eigen::Index col = 0; col < holo.phase.cols(); ++col) {
      // Same epsilon rule as the encoder so quantized levels map exactly.
      int v = static_cast<int>(
          std::floor(holo.phase(row, col) / kTwoPi * 256.0 + 1e-9));
      if (v > 255) v = 255;
      if (v < 0) v = 0;
      bytes.push_back(static_cast<std::uint8_t>(v));
    }
  return bytes;
}

void write_pgm(const Hologram& holo, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "P5\n" << holo.phase.cols() << " " << holo.phase.rows() << "\n255\n";
  const std::vector<std::uint8_t> bytes = to_gray8(holo);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace spdc
