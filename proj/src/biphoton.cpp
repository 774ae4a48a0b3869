#include "spdc/biphoton.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spdc {
namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

int index_of(const std::vector<ModeId>& modes, const ModeId& m) {
  auto it = std::find(modes.begin(), modes.end(), m);
  return it == modes.end() ? -1 : static_cast<int>(it - modes.begin());
}

// <hg | lg> from the exact same-order expansion; zero when the orders differ.
complexd hg_lg_overlap(const ModeId& hg_mode, const ModeId& lg_mode) {
  if (hg_mode.order() != lg_mode.order()) return 0.0;
  for (const auto& [m, c] : lg_in_hg_basis(lg_mode.a, lg_mode.b))
    if (m == hg_mode) return c;
  return 0.0;
}

complexd mode_overlap(const ModeId& bra, const ModeId& ket) {
  if (bra.family == ket.family) return bra == ket ? 1.0 : 0.0;
  if (bra.family == ModeFamily::HG) return hg_lg_overlap(bra, ket);
  return std::conj(hg_lg_overlap(ket, bra));
}

Eigen::Matrix2cd bell_matrix(BellState which) {
  Eigen::Matrix2cd c = Eigen::Matrix2cd::Zero();
  switch (which) {
    case BellState::PhiPlus:  c(0, 0) = kInvSqrt2; c(1, 1) = kInvSqrt2; break;
    case BellState::PhiMinus: c(0, 0) = kInvSqrt2; c(1, 1) = -kInvSqrt2; break;
    case BellState::PsiPlus:  c(0, 1) = kInvSqrt2; c(1, 0) = kInvSqrt2; break;
    case BellState::PsiMinus: c(0, 1) = kInvSqrt2; c(1, 0) = -kInvSqrt2; break;
    case BellState::None:
      throw std::invalid_argument("'none' is not a preparable Bell state");
  }
  return c;
}

void require_first_order(const BiphotonState& state, Basis basis,
                         const char* who) {
  if (state.modes != first_order_modes(basis))
    throw std::invalid_argument(std::string(who) +
                                " expects a state on the first-order " +
                                to_string(basis) + " mode pair");
}

}  // namespace

std::string to_string(Basis basis) { return basis == Basis::HG ? "HG" : "LG"; }

std::string to_string(BellState bell) {
  switch (bell) {
    case BellState::PhiPlus: return "PhiPlus";
    case BellState::PhiMinus: return "PhiMinus";
    case BellState::PsiPlus: return "PsiPlus";
    case BellState::PsiMinus: return "PsiMinus";
    default: return "None";
  }
}

std::vector<ModeId> first_order_modes(Basis basis) {
  if (basis == Basis::HG) return {hg(0, 1), hg(1, 0)};
  return {lg(0, 1), lg(0, -1)};
}

std::vector<ModeId> lg_modes_up_to(int max_order) {
  if (max_order < 0) throw std::domain_error("mode order cap must be nonnegative");
  std::vector<ModeId> modes;
  for (int order = 0; order <= max_order; ++order)
    for (int l = -order; l <= order; ++l) {
      if ((order - std::abs(l)) % 2 != 0) continue;
      modes.push_back(lg((order - std::abs(l)) / 2, l));
    }
  return modes;
}

BiphotonState biphoton_state(const ModeField& pump, int truncation_order,
                             const WaistConfig& waists,
                             const QuadratureSpec& quad) {
  BiphotonState state;
  state.modes = hg_modes_up_to(truncation_order);
  state.coeffs = coefficient_matrix(pump, state.modes, state.modes, waists, quad);
  state.waist = waists.downconverted;
  state.normalized = false;
  return state;
}

BiphotonState renormalize(const BiphotonState& state,
                          const std::vector<ModeId>& subspace) {
  if (subspace.empty())
    throw std::invalid_argument("renormalize needs a nonempty mode subset");

  Eigen::MatrixXcd sub =
      Eigen::MatrixXcd::Zero(subspace.size(), subspace.size());
  for (size_t s = 0; s < subspace.size(); ++s) {
    const int is = index_of(state.modes, subspace[s]);
    if (is < 0) continue;
    for (size_t i = 0; i < subspace.size(); ++i) {
      const int ii = index_of(state.modes, subspace[i]);
      if (ii >= 0) sub(s, i) = state.coeffs(is, ii);
    }
  }

  const double norm = sub.norm();
  if (norm < 1e-12 * std::max(1.0, state.norm()))
    throw std::domain_error("renormalize: restriction carries no weight");

  BiphotonState out;
  out.modes = subspace;
  out.coeffs = sub / norm;
  out.waist = state.waist;
  out.normalized = true;
  return out;
}

BiphotonState bell_state(BellState which, Basis basis, double waist) {
  if (!(waist > 0.0)) throw std::domain_error("mode waist must be positive");
  BiphotonState out;
  out.modes = first_order_modes(basis);
  out.coeffs = bell_matrix(which);
  out.waist = waist;
  out.normalized = true;
  return out;
}

double bell_fidelity(const BiphotonState& state, BellState which, Basis basis) {
  require_first_order(state, basis, "bell_fidelity");
  const double norm = state.norm();
  if (norm < 1e-14)
    throw std::domain_error("bell_fidelity: state has zero norm");
  const Eigen::Matrix2cd bell = bell_matrix(which);
  const complexd overlap = (bell.conjugate().cwiseProduct(state.coeffs)).sum();
  return std::norm(overlap) / (norm * norm);
}

BellVerdict classify_bell(const BiphotonState& state, Basis basis) {
  const BellState candidates[] = {BellState::PhiPlus, BellState::PhiMinus,
                                  BellState::PsiPlus, BellState::PsiMinus};
  double best = -1.0, second = -1.0;
  BellState best_state = BellState::None;
  for (BellState b : candidates) {
    const double f = bell_fidelity(state, b, basis);
    if (f > best) {
      second = best;
      best = f;
      best_state = b;
    } else if (f > second) {
      second = f;
    }
  }
  if (best - second <= 1e-9) return {BellState::None, best};
  return {best_state, best};
}

BiphotonState change_basis_two_photon(const BiphotonState& state,
                                      const Eigen::Matrix2cd& u,
                                      std::vector<ModeId> new_modes) {
  if (state.modes.size() != 2 || state.coeffs.rows() != 2 ||
      state.coeffs.cols() != 2)
    throw std::invalid_argument("change_basis_two_photon needs a 2-mode state");
  if (!new_modes.empty() && new_modes.size() != 2)
    throw std::invalid_argument("new_modes must name exactly two modes");
  if (((u * u.adjoint()) - Eigen::Matrix2cd::Identity()).norm() > 1e-10)
    throw std::invalid_argument("basis-change matrix is not unitary");

  BiphotonState out;
  out.modes = new_modes.empty() ? state.modes : std::move(new_modes);
  // Both photons transform with the same single-photon map, so the
  // coefficient matrix picks up U on the left and U^T on the right.
  out.coeffs = u * state.coeffs * u.transpose();
  out.waist = state.waist;
  out.normalized = state.normalized;
  return out;
}

BiphotonState to_lg_first_order(const BiphotonState& state) {
  require_first_order(state, Basis::HG, "to_lg_first_order");
  return change_basis_two_photon(state, hg_to_lg_first_order(),
                                 first_order_modes(Basis::LG));
}

Eigen::MatrixXd coincidence_spectrum(const BiphotonState& state,
                                     const std::vector<ModeId>& measurement_modes) {
  if (measurement_modes.empty())
    throw std::invalid_argument("coincidence_spectrum needs measurement modes");
  for (const auto& m : measurement_modes) validate(m);

  const size_t n = measurement_modes.size();
  Eigen::MatrixXcd v(n, state.modes.size());
  for (size_t a = 0; a < n; ++a)
    for (size_t s = 0; s < state.modes.size(); ++s)
      v(a, s) = mode_overlap(measurement_modes[a], state.modes[s]);

  const Eigen::MatrixXcd amplitudes = v * state.coeffs * v.transpose();
  Eigen::MatrixXd probs = amplitudes.cwiseAbs2();
  const double total = probs.sum();
  if (!(total > 1e-300))
    throw std::domain_error("coincidence_spectrum: state has no weight on the measurement modes");
  return probs / total;
}

}  // namespace spdc
