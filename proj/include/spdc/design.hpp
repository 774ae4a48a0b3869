#pragma once

#include <vector>

#include <Eigen/Dense>

#include "spdc/biphoton.hpp"

namespace spdc {

// Fidelity below which a design is flagged as not reaching its target.
inline constexpr double kReachableFidelity = 0.99;

// Conditioning (sigma_min / sigma_max) below which an unregularized design
// map is treated as rank deficient.
inline constexpr double kIllPosedConditioning = 1e-12;

struct DesignProblem {
  BiphotonState target;            // desired coefficients over HG modes
  std::vector<ModeId> pump_basis;  // HG modes the pump may use
  WaistConfig waists;
  double regularization = 0.0;     // Tikhonov weight; 0 = plain least squares
  QuadratureSpec quadrature{};
  int leakage_order = 4;           // order cap when reporting leakage
};

struct DesignSolution {
  std::vector<ModeId> pump_basis;
  // Unit-norm pump weights, global phase fixed so the largest component is
  // real positive; all zero in the degenerate case where the target is
  // orthogonal to everything the basis can produce.
  Eigen::VectorXcd weights;
  double achieved_fidelity = 0.0;
  bool low_fidelity = false;       // achieved_fidelity < kReachableFidelity
  double residual = 0.0;           // relative least-squares residual
  double conditioning = 0.0;       // sigma_min / sigma_max of the design map
  double subspace_leakage = 0.0;   // forward weight outside the target pairs
};

// Linear map from pump-basis weights to the flattened coefficient matrix
// over the target's mode pairs: column q holds the coefficients generated by
// unit pump mode pump_basis[q], rows run row-major over (signal, idler).
Eigen::MatrixXcd assemble_design_map(const DesignProblem& problem);

// Least-squares pump design  min || M p - tau c ||^2 + lambda ||p||^2  with
// tau set to the mean column norm of M (fixing the arbitrary overall scale).
// With lambda = 0 a rank-deficient map raises IllPosedError; a small lambda
// turns the same problem into the minimum-norm solution.  The returned
// fidelity/leakage come from an independent forward run of the designed pump.
DesignSolution solve_design(const DesignProblem& problem);

}  // namespace spdc
