#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spdc/biphoton.hpp"
#include "spdc/chsh.hpp"
#include "spdc/hologram.hpp"
#include "spdc/overlap.hpp"

namespace spdc {

// One reproducible run: pump composition, geometry, numerics, and noise.
// Defaults describe the reference setup: Gaussian pump, equal 0.87 mm
// waists, Gauss-Hermite quadrature, second-order truncation.
struct RunConfig {
  std::vector<std::pair<ModeId, complexd>> pump = {{ModeId{}, complexd(1.0, 0.0)}};
  WaistConfig waists{8.7e-4, 8.7e-4};
  QuadratureSpec quadrature{};
  Basis basis = Basis::HG;
  int truncation_order = 2;
  ChshAngles angles = canonical_chsh_angles();
  std::optional<PoissonNoiseSpec> noise;
  SlmSpec slm{};
  std::uint64_t seed = 1;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// The normalized pump field described by the config (superpose of the pump
// terms at the pump waist).
ModeField pump_field(const RunConfig& config);

// "HG(i,j)" / "LG(p,l)" plus the compact two-digit HG/LG form ("HG01").
// Throws ConfigError on anything else.
ModeId parse_mode_label(const std::string& text);

// Strict JSON parsing: unknown keys, malformed values, and out-of-range
// settings all raise ConfigError.  Missing keys fall back to defaults.
// parse_config(emit_config(c)) == c.
RunConfig parse_config(const std::string& json_text);
std::string emit_config(const RunConfig& config);

// Fixed-format helpers shared by all writers: 12 significant digits,
// locale-independent, LF line endings.
std::string format_real(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const CsvTable& table, const std::string& path);
void write_text(const std::string& text, const std::string& path);

}  // namespace spdc
