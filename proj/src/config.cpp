#include "spdc/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <regex>
#include <set>

#include "json.hpp"

#include "spdc/errors.hpp"

namespace spdc {
namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

void check_keys(const ordered_json& j, const std::string& where,
                const std::set<std::string>& known) {
  if (!j.is_object()) fail(where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) fail(where + ": unknown key '" + key + "'");
}

double get_number(const ordered_json& j, const std::string& where) {
  if (!j.is_number()) fail(where + " must be a number");
  return j.get<double>();
}

double get_positive(const ordered_json& j, const std::string& where) {
  const double v = get_number(j, where);
  if (!(v > 0.0)) fail(where + " must be positive");
  return v;
}

int get_int(const ordered_json& j, const std::string& where, int lo, int hi) {
  if (!j.is_number_integer()) fail(where + " must be an integer");
  const auto v = j.get<long long>();
  if (v < lo || v > hi)
    fail(where + " must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

complexd get_complex(const ordered_json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(where + " must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

ordered_json put_complex(complexd z) {
  return ordered_json::array({z.real(), z.imag()});
}

}  // namespace

ModeId parse_mode_label(const std::string& text) {
  static const std::regex full(R"(^(HG|LG)\((-?\d+),(-?\d+)\)$)");
  static const std::regex compact(R"(^(HG|LG)(\d)(\d)$)");
  std::smatch m;
  if (!std::regex_match(text, m, full) && !std::regex_match(text, m, compact))
    fail("cannot parse mode label '" + text + "' (expected e.g. HG(0,1) or HG01)");
  ModeId mode;
  mode.family = m[1].str() == "HG" ? ModeFamily::HG : ModeFamily::LG;
  mode.a = std::stoi(m[2].str());
  mode.b = std::stoi(m[3].str());
  try {
    validate(mode);
  } catch (const std::domain_error& e) {
    fail(e.what());
  }
  return mode;
}

ModeField pump_field(const RunConfig& config) {
  try {
    return superpose(config.pump, config.waists.pump).field;
  } catch (const std::exception& e) {
    fail(std::string("invalid pump: ") + e.what());
  }
}

RunConfig parse_config(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"pump", "waists", "quadrature", "basis", "truncation_order",
              "angles", "noise", "slm", "seed"});

  RunConfig config;

  if (j.contains("pump")) {
    const auto& pump = j["pump"];
    if (!pump.is_array() || pump.empty())
      fail("pump must be a nonempty array of {mode, weight} terms");
    config.pump.clear();
    for (const auto& term : pump) {
      check_keys(term, "pump term", {"mode", "weight"});
      if (!term.contains("mode") || !term["mode"].is_string())
        fail("pump term needs a string 'mode'");
      const ModeId mode = parse_mode_label(term["mode"].get<std::string>());
      if (mode.family != ModeFamily::HG)
        fail("pump terms must be HG modes");
      if (!term.contains("weight")) fail("pump term needs a 'weight'");
      config.pump.emplace_back(mode, get_complex(term["weight"], "pump weight"));
    }
  }

  if (j.contains("waists")) {
    check_keys(j["waists"], "waists", {"pump", "downconverted"});
    if (j["waists"].contains("pump"))
      config.waists.pump = get_positive(j["waists"]["pump"], "waists.pump");
    if (j["waists"].contains("downconverted"))
      config.waists.downconverted =
          get_positive(j["waists"]["downconverted"], "waists.downconverted");
  }

  if (j.contains("quadrature")) {
    check_keys(j["quadrature"], "quadrature", {"scheme", "nodes"});
    if (j["quadrature"].contains("scheme")) {
      const auto s = j["quadrature"]["scheme"];
      if (!s.is_string()) fail("quadrature.scheme must be a string");
      const std::string name = s.get<std::string>();
      if (name == "gauss-hermite")
        config.quadrature.scheme = QuadratureScheme::GaussHermite;
      else if (name == "riemann-grid")
        config.quadrature.scheme = QuadratureScheme::RiemannGrid;
      else
        fail("quadrature.scheme must be 'gauss-hermite' or 'riemann-grid'");
    }
    if (j["quadrature"].contains("nodes"))
      config.quadrature.nodes = get_int(j["quadrature"]["nodes"], "quadrature.nodes", 1, 2048);
  }

  if (j.contains("basis")) {
    if (!j["basis"].is_string()) fail("basis must be a string");
    const std::string b = j["basis"].get<std::string>();
    if (b == "HG")
      config.basis = Basis::HG;
    else if (b == "LG")
      config.basis = Basis::LG;
    else
      fail("basis must be 'HG' or 'LG'");
  }

  if (j.contains("truncation_order"))
    config.truncation_order = get_int(j["truncation_order"], "truncation_order", 1, 12);

  if (j.contains("angles")) {
    check_keys(j["angles"], "angles", {"a", "a_prime", "b", "b_prime"});
    if (j["angles"].contains("a")) config.angles.a = get_number(j["angles"]["a"], "angles.a");
    if (j["angles"].contains("a_prime"))
      config.angles.a_prime = get_number(j["angles"]["a_prime"], "angles.a_prime");
    if (j["angles"].contains("b")) config.angles.b = get_number(j["angles"]["b"], "angles.b");
    if (j["angles"].contains("b_prime"))
      config.angles.b_prime = get_number(j["angles"]["b_prime"], "angles.b_prime");
  }

  if (j.contains("noise") && !j["noise"].is_null()) {
    check_keys(j["noise"], "noise", {"mean_counts", "trials", "background"});
    PoissonNoiseSpec noise;
    if (j["noise"].contains("mean_counts"))
      noise.mean_counts = get_positive(j["noise"]["mean_counts"], "noise.mean_counts");
    if (j["noise"].contains("trials"))
      noise.trials = get_int(j["noise"]["trials"], "noise.trials", 1, 10000000);
    if (j["noise"].contains("background")) {
      noise.background = get_number(j["noise"]["background"], "noise.background");
      if (noise.background < 0.0) fail("noise.background must be nonnegative");
    }
    config.noise = noise;
  }

  if (j.contains("slm")) {
    check_keys(j["slm"], "slm",
               {"width_px", "height_px", "pixel_pitch", "grating_period", "phase_levels"});
    if (j["slm"].contains("width_px"))
      config.slm.width_px = get_int(j["slm"]["width_px"], "slm.width_px", 8, 16384);
    if (j["slm"].contains("height_px"))
      config.slm.height_px = get_int(j["slm"]["height_px"], "slm.height_px", 8, 16384);
    if (j["slm"].contains("pixel_pitch"))
      config.slm.pixel_pitch = get_positive(j["slm"]["pixel_pitch"], "slm.pixel_pitch");
    if (j["slm"].contains("grating_period"))
      config.slm.grating_period =
          get_positive(j["slm"]["grating_period"], "slm.grating_period");
    if (j["slm"].contains("phase_levels"))
      config.slm.phase_levels = get_int(j["slm"]["phase_levels"], "slm.phase_levels", 2, 65536);
    if (config.slm.grating_period < 2.0 * config.slm.pixel_pitch)
      fail("slm.grating_period must be at least twice the pixel pitch");
  }

  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("seed must be a nonnegative integer");
    config.seed = j["seed"].get<std::uint64_t>();
  }

  return config;
}

std::string emit_config(const RunConfig& config) {
  ordered_json j;
  j["pump"] = ordered_json::array();
  for (const auto& [mode, weight] : config.pump)
    j["pump"].push_back({{"mode", mode.label()}, {"weight", put_complex(weight)}});
  j["waists"] = {{"pump", config.waists.pump},
                 {"downconverted", config.waists.downconverted}};
  j["quadrature"] = {
      {"scheme", config.quadrature.scheme == QuadratureScheme::GaussHermite
                     ? "gauss-hermite"
                     : "riemann-grid"},
      {"nodes", config.quadrature.nodes}};
  j["basis"] = to_string(config.basis);
  j["truncation_order"] = config.truncation_order;
  j["angles"] = {{"a", config.angles.a},
                 {"a_prime", config.angles.a_prime},
                 {"b", config.angles.b},
                 {"b_prime", config.angles.b_prime}};
  if (config.noise)
    j["noise"] = {{"mean_counts", config.noise->mean_counts},
                  {"trials", config.noise->trials},
                  {"background", config.noise->background}};
  j["slm"] = {{"width_px", config.slm.width_px},
              {"height_px", config.slm.height_px},
              {"pixel_pitch", config.slm.pixel_pitch},
              {"grating_period", config.slm.grating_period},
              {"phase_levels", config.slm.phase_levels}};
  j["seed"] = config.seed;
  return j.dump(2) + "\n";
}

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void write_csv(const CsvTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (size_t c = 0; c < table.header.size(); ++c)
    out << (c ? "," : "") << table.header[c];
  out << "\n";
  for (const auto& row : table.rows) {
    for (size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace spdc
