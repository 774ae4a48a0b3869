#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spdc/modes.hpp"

namespace spdc {

// Phase-only SLM panel: pixel grid, pitch, blaze period (along x), and the
// number of addressable phase levels.
struct SlmSpec {
  int width_px = 1920;
  int height_px = 1080;
  double pixel_pitch = 8e-6;
  double grating_period = 1.28e-4;  // 16 pixels per blaze period
  int phase_levels = 256;

  friend bool operator==(const SlmSpec&, const SlmSpec&) = default;
};

void validate(const SlmSpec& spec);

// Quantized phase pattern; phase(row, col) in [0, 2pi) with row 0 the top
// pixel line (+y) and col 0 the leftmost (-x).
struct Hologram {
  Eigen::MatrixXd phase;
  SlmSpec spec;
};

// Blazed-grating hologram with amplitude control by blaze-depth scaling:
//   phase = pi + A * (wrap(2 pi x / period + arg field) - pi),
//   A = |field| / max |field|,
// quantized to spec.phase_levels.  Scaling the sawtooth about its pi mean
// keeps the first diffraction order's phase independent of A (a zero-anchored
// scaling would mix amplitude into phase and destroy the reconstruction).
// The input's global phase is canonicalized (peak-amplitude pixel made real
// positive) so equivalent fields produce identical holograms.
// Throws std::invalid_argument for an identically zero field and ConfigError
// for an invalid SLM spec.
Hologram encode(const ModeField& field, const SlmSpec& spec);

// Simulated readout: diffract a unit plane wave off exp(i phase), isolate the
// first order with a square spectral window of half-width ~ half the carrier
// frequency, and return |<target|reconstructed>|^2 in [0, 1].  Throws
// ConfigError when the window geometry cannot separate the orders (carrier
// below 4 bins, or too close to Nyquist).
double verify_first_order(const Hologram& holo, const ModeField& target);

// 8-bit gray mapping value = floor(phase / 2pi * 256) clamped to 255,
// row-major from the top pixel line.
std::vector<std::uint8_t> to_gray8(const Hologram& holo);

// Binary PGM (P5, maxval 255) of to_gray8().
void write_pgm(const Hologram& holo, const std::string& path);

}  // namespace spdc
