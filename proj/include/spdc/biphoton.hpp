#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spdc/modes.hpp"
#include "spdc/overlap.hpp"

namespace spdc {

enum class Basis { HG, LG };
enum class BellState { PhiPlus, PhiMinus, PsiPlus, PsiMinus, None };

std::string to_string(Basis basis);
std::string to_string(BellState bell);

// The degenerate first-order mode pair acting as the qubit basis:
//   HG: [HG(0,1), HG(1,0)]     LG: [LG(0,+1), LG(0,-1)]
// with |0> identified with the first entry.
std::vector<ModeId> first_order_modes(Basis basis);

// Enumerates LG modes with order 2p+|l| <= max_order, sorted by
// (order, l, p); the azimuthal-index pairs +/-l appear adjacently.
std::vector<ModeId> lg_modes_up_to(int max_order);

// Two-photon transverse state over a shared signal/idler mode list:
//   |Psi> = sum_{s,i} coeffs(s, i) |modes[s]>_signal |modes[i]>_idler.
struct BiphotonState {
  std::vector<ModeId> modes;
  Eigen::MatrixXcd coeffs;
  double waist = 0.0;       // waist of the decomposition modes
  bool normalized = false;

  double norm() const { return coeffs.norm(); }
};

// Assembles the raw (unnormalized) coefficient matrix generated by `pump`
// over all HG modes of total order <= truncation_order.
BiphotonState biphoton_state(const ModeField& pump, int truncation_order,
                             const WaistConfig& waists,
                             const QuadratureSpec& quad = {});

// Restriction of the state to `subspace` (modes absent from the state count
// as zero rows/columns) rescaled to unit norm.  Throws std::domain_error
// when the restriction carries no weight.
BiphotonState renormalize(const BiphotonState& state,
                          const std::vector<ModeId>& subspace);

// The four maximally entangled two-qubit states over first_order_modes(basis):
// PhiPlus/PhiMinus = (|00> +/- |11>)/sqrt2, PsiPlus/PsiMinus = (|01> +/- |10>)/sqrt2.
BiphotonState bell_state(BellState which, Basis basis, double waist);

// |<bell|state>|^2 for a state on first_order_modes(basis); a non-normalized
// state is normalized on the fly (zero-norm states are a domain error).
double bell_fidelity(const BiphotonState& state, BellState which, Basis basis);

struct BellVerdict {
  BellState nearest = BellState::None;
  double fidelity = 0.0;
};

// Highest-fidelity Bell state; `nearest` is None when the best two fidelities
// tie within 1e-9 (no meaningful winner).
BellVerdict classify_bell(const BiphotonState& state, Basis basis);

// Two-photon change of basis C' = U C U^T for states on a 2-mode set, with
// U(a, s) = <new_a|old_s> acting identically on signal and idler (see
// hg_to_lg_first_order()).  `new_modes` labels the transformed pair; when
// empty the old labels are kept.  U must be unitary to 1e-10.
BiphotonState change_basis_two_photon(const BiphotonState& state,
                                      const Eigen::Matrix2cd& u,
                                      std::vector<ModeId> new_modes = {});

// Convenience: rotates a first-order HG state into the LG qubit pair.
BiphotonState to_lg_first_order(const BiphotonState& state);

// Normalized joint detection probabilities |<a|<b| state>|^2 over an
// arbitrary measurement mode list (HG or LG labels; cross-family overlaps
// use the exact same-order expansion).  Rows index the signal-arm mode.
Eigen::MatrixXd coincidence_spectrum(const BiphotonState& state,
                                     const std::vector<ModeId>& measurement_modes);

}  // namespace spdc
