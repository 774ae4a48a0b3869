// Command-line front end: spectrum | chsh | design | hologram | convert.
// Every run is a deterministic function of (config, seed); flags override the
// corresponding config-file fields.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "spdc/commands.hpp"
#include "spdc/errors.hpp"

namespace {

struct SharedOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  double noise_counts = 0.0;
  std::string basis;
};

void add_shared(CLI::App* sub, SharedOptions& shared) {
  sub->add_option("--config", shared.config_path, "JSON config file");
  sub->add_option("--out-dir", shared.out_dir, "output directory (default: .)");
  sub->add_option("--seed", shared.seed, "override the config seed");
  sub->add_option("--noise-counts", shared.noise_counts,
                  "enable Poisson noise with this mean count per orientation");
  sub->add_option("--basis", shared.basis, "measurement basis: HG or LG")
      ->check(CLI::IsMember({"HG", "LG"}));
}

spdc::RunConfig resolve_config(const CLI::App* sub, const SharedOptions& shared) {
  spdc::RunConfig config;
  if (!shared.config_path.empty()) {
    std::ifstream in(shared.config_path, std::ios::binary);
    if (!in) throw spdc::ConfigError("cannot read config file " + shared.config_path);
    std::ostringstream text;
    text << in.rdbuf();
    config = spdc::parse_config(text.str());
  }
  if (sub->count("--seed")) config.seed = shared.seed;
  if (sub->count("--basis"))
    config.basis = shared.basis == "LG" ? spdc::Basis::LG : spdc::Basis::HG;
  if (sub->count("--noise-counts")) {
    if (!(shared.noise_counts > 0.0))
      throw spdc::ConfigError("--noise-counts must be positive");
    spdc::PoissonNoiseSpec noise = config.noise.value_or(spdc::PoissonNoiseSpec{});
    noise.mean_counts = shared.noise_counts;
    config.noise = noise;
  }
  return config;
}

spdc::BellState parse_target(const std::string& name) {
  if (name == "phi+") return spdc::BellState::PhiPlus;
  if (name == "phi-") return spdc::BellState::PhiMinus;
  if (name == "psi+") return spdc::BellState::PsiPlus;
  if (name == "psi-") return spdc::BellState::PsiMinus;
  throw spdc::ConfigError("unknown design target '" + name +
                          "' (expected phi+, phi-, psi+, psi-)");
}

void report(const std::vector<std::string>& files, const std::string& out_dir) {
  for (const auto& name : files)
    std::cout << "wrote " << out_dir << "/" << name << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"biphoton mode toolkit: SPDC spectra, CHSH runs, pump design, "
               "SLM holograms"};
  app.require_subcommand(1);

  SharedOptions spectrum_opts, chsh_opts, design_opts, hologram_opts, convert_opts;

  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "coincidence-probability matrix over the truncated mode basis");
  add_shared(spectrum, spectrum_opts);

  CLI::App* chsh = app.add_subcommand(
      "chsh", "CHSH S value and analyzer-angle sweep on the first-order pair");
  add_shared(chsh, chsh_opts);
  int trials = 0;
  chsh->add_option("--trials", trials, "Poisson trials (needs noise enabled)")
      ->check(CLI::PositiveNumber);

  CLI::App* design = app.add_subcommand(
      "design", "least-squares pump composition for a target two-photon state");
  add_shared(design, design_opts);
  std::string target = "psi+";
  std::vector<double> coeffs;
  double regularization = 1e-8;
  bool with_hologram = false;
  design->add_option("--target", target, "phi+, phi-, psi+ or psi- (default psi+)");
  design->add_option("--coeffs", coeffs,
                     "custom target: 8 comma-separated reals, re,im per entry, "
                     "row-major over the first-order pair")
      ->delimiter(',');
  design->add_option("--regularization", regularization,
                     "Tikhonov weight (default 1e-8; 0 = plain least squares)");
  design->add_flag("--hologram", with_hologram, "also encode the designed pump "
                   "as a PGM hologram");

  CLI::App* hologram = app.add_subcommand(
      "hologram", "encode the configured pump field as a blazed-grating PGM");
  add_shared(hologram, hologram_opts);

  CLI::App* convert = app.add_subcommand(
      "convert", "first-order state report in both the HG and LG bases");
  add_shared(convert, convert_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (spectrum->parsed()) {
      const auto config = resolve_config(spectrum, spectrum_opts);
      report(spdc::cmd_spectrum(config, spectrum_opts.out_dir), spectrum_opts.out_dir);
    } else if (chsh->parsed()) {
      auto config = resolve_config(chsh, chsh_opts);
      if (chsh->count("--trials")) {
        if (!config.noise)
          throw spdc::ConfigError("--trials needs noise enabled "
                                  "(--noise-counts or a config noise block)");
        config.noise->trials = trials;
      }
      report(spdc::cmd_chsh(config, chsh_opts.out_dir), chsh_opts.out_dir);
    } else if (design->parsed()) {
      const auto config = resolve_config(design, design_opts);
      spdc::DesignRequest request;
      request.bell = parse_target(target);
      if (design->count("--coeffs")) {
        if (coeffs.size() != 8)
          throw spdc::ConfigError("--coeffs needs exactly 8 reals (4 complex entries)");
        for (size_t k = 0; k < 8; k += 2)
          request.custom_coeffs.emplace_back(coeffs[k], coeffs[k + 1]);
      }
      request.regularization = regularization;
      request.emit_hologram = with_hologram;
      report(spdc::cmd_design(config, request, design_opts.out_dir),
             design_opts.out_dir);
    } else if (hologram->parsed()) {
      const auto config = resolve_config(hologram, hologram_opts);
      report(spdc::cmd_hologram(config, hologram_opts.out_dir), hologram_opts.out_dir);
    } else if (convert->parsed()) {
      const auto config = resolve_config(convert, convert_opts);
      report(spdc::cmd_convert(config, convert_opts.out_dir), convert_opts.out_dir);
    }
  } catch (const spdc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const spdc::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
