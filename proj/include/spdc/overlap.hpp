#pragma once

#include <vector>

#include <Eigen/Dense>

#include "spdc/errors.hpp"
#include "spdc/modes.hpp"

namespace spdc {

enum class QuadratureScheme { GaussHermite, RiemannGrid };

// Quadrature request; `nodes` counts points per axis.  Every evaluation is
// repeated at 2x nodes and the pair must agree to kQuadratureAgreementTol,
// otherwise a ConvergenceError (carrying both estimates) is thrown.
struct QuadratureSpec {
  QuadratureScheme scheme = QuadratureScheme::GaussHermite;
  int nodes = 64;

  friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

// Beam waists of the interacting fields at the crystal plane (thin-crystal,
// collinear, frequency-degenerate picture): one waist for the pump, one
// shared by the signal/idler decomposition modes.
struct WaistConfig {
  double pump = 0.0;
  double downconverted = 0.0;

  friend bool operator==(const WaistConfig&, const WaistConfig&) = default;
};

inline constexpr double kQuadratureAgreementTol = 1e-8;

// Gauss-Hermite nodes/weights for weight function exp(-t^2) on the real
// line (Golub-Welsch via a symmetric tridiagonal eigenproblem).
void gauss_hermite_rule(int n, std::vector<double>& nodes,
                        std::vector<double>& weights);

// Mode-overlap coefficient of collinear degenerate down-conversion,
//   C^{ij,mn} = Int d2r  pump(r) * HG_ij(r; w_dc) * HG_mn(r; w_dc),
// the amplitude for the pair to land in signal mode HG_ij and idler mode
// HG_mn.  (The decomposition modes are real at the waist plane, so the
// conjugation usually written on them is a no-op.)
//
// With Gauss-Hermite quadrature the shared Gaussian envelope
// exp(-alpha r^2), alpha = 1/w_pump^2 + 2/w_dc^2, is absorbed into the
// weight function, making the rule exact for pure HG pumps; the Riemann
// scheme integrates the full amplitudes on a midpoint grid.
//
// Throws std::invalid_argument for non-HG signal/idler labels, empty or
// zero-norm pumps, nonpositive waists, a pump field whose waist disagrees
// with the waist configuration, or nodes < 1; ConvergenceError as above.
complexd coefficient(const ModeField& pump, const ModeId& signal,
                     const ModeId& idler, const WaistConfig& waists,
                     const QuadratureSpec& quad = {});

// Full matrix of coefficient() values; entry (s, i) couples signal_modes[s]
// with idler_modes[i].  Exploits the exact signal/idler exchange symmetry
// when both lists are identical, and shares pump node tables across entries.
Eigen::MatrixXcd coefficient_matrix(const ModeField& pump,
                                    const std::vector<ModeId>& signal_modes,
                                    const std::vector<ModeId>& idler_modes,
                                    const WaistConfig& waists,
                                    const QuadratureSpec& quad = {});

// Independent cross-check of coefficient(): brute-force midpoint Riemann sum
// of the full mode amplitudes over a square window of 6x the larger waist,
// with quad.nodes samples per axis (the scheme field is ignored).  Slower
// and single-resolution by design; used as the reference in tests.
complexd oracle_coefficient(const ModeField& pump, const ModeId& signal,
                            const ModeId& idler, const WaistConfig& waists,
                            const QuadratureSpec& quad);

}  // namespace spdc
