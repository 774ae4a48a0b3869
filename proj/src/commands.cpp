#include "spdc/commands.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>

#include "json.hpp"

#include "spdc/chsh.hpp"
#include "spdc/errors.hpp"
#include "spdc/hologram.hpp"

namespace spdc {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

fs::path prepare(const std::string& out_dir) {
  fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  fs::create_directories(dir);
  return dir;
}

ordered_json config_json(const RunConfig& config) {
  return ordered_json::parse(emit_config(config));
}

ordered_json complex_json(complexd z) {
  return ordered_json::array({z.real(), z.imag()});
}

ordered_json matrix_json(const Eigen::MatrixXcd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

void write_json(const ordered_json& j, const fs::path& path) {
  write_text(j.dump(2) + "\n", path.string());
}

std::vector<ModeId> measurement_modes(Basis basis, int max_order) {
  return basis == Basis::HG ? hg_modes_up_to(max_order) : lg_modes_up_to(max_order);
}

// Shared by chsh/convert: the configured state restricted to the first-order
// HG qubit pair.  A pump whose state carries no weight there is a config
// problem, not a numerical one.
BiphotonState first_order_state(const RunConfig& config) {
  const BiphotonState full = biphoton_state(pump_field(config), config.truncation_order,
                                            config.waists, config.quadrature);
  try {
    return renormalize(full, first_order_modes(Basis::HG));
  } catch (const std::domain_error&) {
    throw ConfigError(
        "configured pump generates no coincidences in the first-order mode pair");
  }
}

ordered_json bell_report(const BiphotonState& state, Basis basis) {
  ordered_json fidelities;
  for (BellState which : {BellState::PhiPlus, BellState::PhiMinus,
                          BellState::PsiPlus, BellState::PsiMinus})
    fidelities[to_string(which)] = bell_fidelity(state, which, basis);
  const BellVerdict verdict = classify_bell(state, basis);
  ordered_json j;
  j["modes"] = ordered_json::array();
  for (const ModeId& mode : state.modes) j["modes"].push_back(mode.label());
  j["coefficients"] = matrix_json(state.coeffs);
  j["bell_fidelities"] = fidelities;
  j["classification"] = {{"state", to_string(verdict.nearest)},
                         {"fidelity", verdict.fidelity}};
  return j;
}

}  // namespace

std::vector<std::string> cmd_spectrum(const RunConfig& config,
                                      const std::string& out_dir) {
  const fs::path dir = prepare(out_dir);
  const BiphotonState state = biphoton_state(
      pump_field(config), config.truncation_order, config.waists, config.quadrature);
  const std::vector<ModeId> modes =
      measurement_modes(config.basis, config.truncation_order);
  const Eigen::MatrixXd probs = coincidence_spectrum(state, modes);

  CsvTable table;
  table.header.push_back("signal_mode");
  for (const ModeId& mode : modes) table.header.push_back(mode.label());
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    std::vector<std::string> row;
    row.push_back(modes[static_cast<size_t>(r)].label());
    for (Eigen::Index c = 0; c < probs.cols(); ++c)
      row.push_back(format_real(probs(r, c)));
    table.rows.push_back(std::move(row));
  }
  write_csv(table, (dir / "spectrum.csv").string());

  ordered_json meta;
  meta["command"] = "spectrum";
  meta["config"] = config_json(config);
  meta["basis"] = to_string(config.basis);
  meta["modes"] = ordered_json::array();
  for (const ModeId& mode : modes) meta["modes"].push_back(mode.label());
  meta["probability_sum"] = probs.sum();
  meta["csv"] = "spectrum.csv";
  write_json(meta, dir / "spectrum.json");
  return {"spectrum.csv", "spectrum.json"};
}

std::vector<std::string> cmd_chsh(const RunConfig& config,
                                  const std::string& out_dir) {
  const fs::path dir = prepare(out_dir);
  const BiphotonState state = first_order_state(config);
  const ChshRecord record = chsh_S(state, config.angles, config.noise, config.seed);

  const std::vector<double> theta_a = {config.angles.a, config.angles.a_prime,
                                       config.angles.b, config.angles.b_prime};
  const ChshCurve curve =
      chsh_curve(state, theta_a, 0.0, std::numbers::pi, 181, config.noise, config.seed);

  CsvTable table;
  table.header.push_back("theta_b");
  for (double a : theta_a) table.header.push_back("rate_theta_a_" + format_real(a));
  for (Eigen::Index r = 0; r < curve.values.rows(); ++r) {
    std::vector<std::string> row;
    row.push_back(format_real(curve.theta_b[static_cast<size_t>(r)]));
    for (Eigen::Index c = 0; c < curve.values.cols(); ++c)
      row.push_back(format_real(curve.values(r, c)));
    table.rows.push_back(std::move(row));
  }
  write_csv(table, (dir / "chsh_curve.csv").string());

  ordered_json j;
  j["command"] = "chsh";
  j["config"] = config_json(config);
  j["angles"] = {{"a", record.angles.a},
                 {"a_prime", record.angles.a_prime},
                 {"b", record.angles.b},
                 {"b_prime", record.angles.b_prime}};
  j["e_values"] = {{"ab", record.e_values[0]},
                   {"ab_prime", record.e_values[1]},
                   {"a_prime_b", record.e_values[2]},
                   {"a_prime_b_prime", record.e_values[3]}};
  j["s"] = record.s;
  j["s_uncertainty"] = record.s_uncertainty;
  j["s_propagated_sigma"] = record.s_propagated_sigma;
  j["seed"] = config.seed;
  if (record.raw_counts) {
    ordered_json blocks = ordered_json::array();
    for (const auto& block : *record.raw_counts)
      blocks.push_back(ordered_json::array({block[0], block[1], block[2], block[3]}));
    j["raw_counts_trial0"] = blocks;
  }
  j["curve_csv"] = "chsh_curve.csv";
  write_json(j, dir / "chsh.json");
  return {"chsh_curve.csv", "chsh.json"};
}

std::vector<std::string> cmd_design(const RunConfig& config,
                                    const DesignRequest& request,
                                    const std::string& out_dir) {
  const fs::path dir = prepare(out_dir);

  BiphotonState target;
  std::string target_label;
  if (!request.custom_coeffs.empty()) {
    if (request.custom_coeffs.size() != 4)
      throw ConfigError("custom design target needs exactly 4 complex entries "
                        "(row-major over the first-order pair)");
    double norm2 = 0.0;
    for (complexd z : request.custom_coeffs) norm2 += std::norm(z);
    if (norm2 <= 0.0) throw ConfigError("custom design target must be nonzero");
    target.modes = first_order_modes(Basis::HG);
    target.coeffs = Eigen::MatrixXcd(2, 2);
    target.coeffs << request.custom_coeffs[0], request.custom_coeffs[1],
        request.custom_coeffs[2], request.custom_coeffs[3];
    target.coeffs /= std::sqrt(norm2);
    target.waist = config.waists.downconverted;
    target.normalized = true;
    target_label = "custom";
  } else {
    target = bell_state(request.bell, Basis::HG, config.waists.downconverted);
    target_label = to_string(request.bell);
  }

  DesignProblem problem;
  problem.target = target;
  problem.pump_basis = hg_modes_up_to(config.truncation_order);
  problem.waists = config.waists;
  problem.regularization = request.regularization;
  problem.quadrature = config.quadrature;
  const DesignSolution solution = solve_design(problem);

  ordered_json j;
  j["command"] = "design";
  j["config"] = config_json(config);
  j["target"] = target_label;
  j["target_coefficients"] = matrix_json(target.coeffs);
  j["regularization"] = request.regularization;
  j["pump_basis"] = ordered_json::array();
  for (const ModeId& mode : solution.pump_basis) j["pump_basis"].push_back(mode.label());
  j["pump_weights"] = ordered_json::array();
  for (Eigen::Index q = 0; q < solution.weights.size(); ++q)
    j["pump_weights"].push_back(complex_json(solution.weights(q)));
  j["achieved_fidelity"] = solution.achieved_fidelity;
  j["low_fidelity"] = solution.low_fidelity;
  j["residual"] = solution.residual;
  j["conditioning"] = solution.conditioning;
  j["subspace_leakage"] = solution.subspace_leakage;

  std::vector<std::string> written;
  if (request.emit_hologram) {
    if (solution.weights.norm() <= 0.0)
      throw ConfigError("design produced an all-zero pump; nothing to encode");
    std::vector<std::pair<ModeId, complexd>> terms;
    for (Eigen::Index q = 0; q < solution.weights.size(); ++q)
      terms.emplace_back(solution.pump_basis[static_cast<size_t>(q)],
                         solution.weights(q));
    const ModeField pump = superpose(terms, config.waists.pump).field;
    const Hologram holo = encode(pump, config.slm);
    write_pgm(holo, (dir / "design_hologram.pgm").string());
    j["hologram"] = {{"pgm", "design_hologram.pgm"},
                     {"first_order_fidelity", verify_first_order(holo, pump)}};
    written.push_back("design_hologram.pgm");
  }

  write_json(j, dir / "design.json");
  written.insert(written.begin(), "design.json");
  return written;
}

std::vector<std::string> cmd_hologram(const RunConfig& config,
                                      const std::string& out_dir) {
  const fs::path dir = prepare(out_dir);
  const ModeField field = pump_field(config);
  const Hologram holo = encode(field, config.slm);
  write_pgm(holo, (dir / "hologram.pgm").string());

  ordered_json j;
  j["command"] = "hologram";
  j["config"] = config_json(config);
  j["pgm"] = "hologram.pgm";
  j["first_order_fidelity"] = verify_first_order(holo, field);
  write_json(j, dir / "hologram.json");
  return {"hologram.pgm", "hologram.json"};
}

std::vector<std::string> cmd_convert(const RunConfig& config,
                                     const std::string& out_dir) {
  const fs::path dir = prepare(out_dir);
  const BiphotonState hg_state = first_order_state(config);
  const BiphotonState lg_state = to_lg_first_order(hg_state);

  ordered_json j;
  j["command"] = "convert";
  j["config"] = config_json(config);
  j["hg"] = bell_report(hg_state, Basis::HG);
  j["lg"] = bell_report(lg_state, Basis::LG);
  write_json(j, dir / "convert.json");
  return {"convert.json"};
}

}  // namespace spdc
