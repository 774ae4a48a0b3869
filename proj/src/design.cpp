#include "spdc/design.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spdc {
namespace {

void check_problem(const DesignProblem& problem) {
  if (problem.pump_basis.empty())
    throw std::invalid_argument("design needs a nonempty pump basis");
  for (const auto& m : problem.pump_basis) {
    validate(m);
    if (m.family != ModeFamily::HG)
      throw std::invalid_argument("pump basis must consist of HG modes");
  }
  for (size_t i = 0; i < problem.pump_basis.size(); ++i)
    for (size_t j = i + 1; j < problem.pump_basis.size(); ++j)
      if (problem.pump_basis[i] == problem.pump_basis[j])
        throw std::invalid_argument("pump basis contains duplicate modes");

  const auto& t = problem.target;
  if (t.modes.empty())
    throw std::invalid_argument("design target has no modes");
  for (const auto& m : t.modes) {
    validate(m);
    if (m.family != ModeFamily::HG)
      throw std::invalid_argument("design target must be expressed over HG modes");
  }
  if (t.coeffs.rows() != static_cast<Eigen::Index>(t.modes.size()) ||
      t.coeffs.cols() != static_cast<Eigen::Index>(t.modes.size()))
    throw std::invalid_argument("design target coefficient matrix has wrong shape");
  if (!(t.norm() > 1e-14))
    throw std::invalid_argument("design target has zero norm");
  if (problem.regularization < 0.0)
    throw std::invalid_argument("regularization must be nonnegative");
  if (problem.leakage_order < 0)
    throw std::invalid_argument("leakage order cap must be nonnegative");
}

int max_order(const std::vector<ModeId>& modes) {
  int order = 0;
  for (const auto& m : modes) order = std::max(order, m.order());
  return order;
}

}  // namespace

Eigen::MatrixXcd assemble_design_map(const DesignProblem& problem) {
  check_problem(problem);
  const auto& modes = problem.target.modes;
  const Eigen::Index rows =
      static_cast<Eigen::Index>(modes.size() * modes.size());
  Eigen::MatrixXcd map(rows, problem.pump_basis.size());
  for (size_t q = 0; q < problem.pump_basis.size(); ++q) {
    ModeField unit_pump{problem.waists.pump, {{problem.pump_basis[q], 1.0}}};
    const Eigen::MatrixXcd c = coefficient_matrix(unit_pump, modes, modes,
                                                  problem.waists,
                                                  problem.quadrature);
    for (size_t s = 0; s < modes.size(); ++s)
      for (size_t i = 0; i < modes.size(); ++i)
        map(static_cast<Eigen::Index>(s * modes.size() + i),
            static_cast<Eigen::Index>(q)) = c(s, i);
  }
  return map;
}

DesignSolution solve_design(const DesignProblem& problem) {
  const Eigen::MatrixXcd m = assemble_design_map(problem);
  const Eigen::Index cols = m.cols();

  DesignSolution solution;
  solution.pump_basis = problem.pump_basis;
  solution.weights = Eigen::VectorXcd::Zero(cols);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const double sigma_max = svd.singularValues().maxCoeff();
  const double sigma_min = svd.singularValues().minCoeff();
  solution.conditioning = sigma_max > 0.0 ? sigma_min / sigma_max : 0.0;

  // Flattened, normalized target, scaled to the typical column magnitude so
  // the least-squares problem is well scaled.
  const size_t n = problem.target.modes.size();
  Eigen::VectorXcd c(static_cast<Eigen::Index>(n * n));
  for (size_t s = 0; s < n; ++s)
    for (size_t i = 0; i < n; ++i)
      c[static_cast<Eigen::Index>(s * n + i)] = problem.target.coeffs(s, i);
  c /= c.norm();
  const double tau = m.colwise().norm().mean();
  if (!(tau > 0.0)) {
    // Every pump mode produces an identically zero coefficient matrix.
    if (problem.regularization == 0.0)
      throw IllPosedError("design map is identically zero");
    solution.low_fidelity = true;
    solution.residual = 1.0;
    return solution;
  }
  const Eigen::VectorXcd target = tau * c;

  Eigen::VectorXcd p;
  if (problem.regularization == 0.0) {
    if (solution.conditioning < kIllPosedConditioning)
      throw IllPosedError(
          "unregularized design map is rank deficient (conditioning " +
          std::to_string(solution.conditioning) +
          "); pass a small regularization to select the minimum-norm solution");
    p = m.colPivHouseholderQr().solve(target);
  } else {
    const double mu = std::sqrt(problem.regularization);
    Eigen::MatrixXcd aug(m.rows() + cols, cols);
    aug.topRows(m.rows()) = m;
    aug.bottomRows(cols) =
        mu * Eigen::MatrixXcd::Identity(cols, cols);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m.rows() + cols);
    rhs.head(m.rows()) = target;
    p = aug.colPivHouseholderQr().solve(rhs);
  }

  solution.residual = (m * p - target).norm() / target.norm();

  const double pnorm = p.norm();
  if (pnorm < 1e-14 || (m * p).norm() <= 1e-10 * target.norm()) {
    // Target orthogonal to the reachable set (e.g. an antisymmetric
    // coefficient matrix: every pump produces a symmetric one).  The solve
    // then returns weights at numerical-noise level; report zero weights
    // rather than normalizing that noise into a fake pump.
    solution.low_fidelity = true;
    return solution;
  }
  p /= pnorm;

  // Fix the global phase: largest-magnitude weight becomes real positive.
  Eigen::Index peak = 0;
  for (Eigen::Index k = 1; k < cols; ++k)
    if (std::abs(p[k]) > std::abs(p[peak])) peak = k;
  p *= std::conj(p[peak]) / std::abs(p[peak]);
  solution.weights = p;

  // Forward-verify with an independent run of the designed pump.
  std::vector<std::pair<ModeId, complexd>> terms;
  for (Eigen::Index k = 0; k < cols; ++k)
    terms.emplace_back(problem.pump_basis[k], p[k]);
  const ModeField pump = superpose(std::move(terms), problem.waists.pump).field;

  const int forward_order =
      std::max(problem.leakage_order, max_order(problem.target.modes));
  const BiphotonState achieved =
      biphoton_state(pump, forward_order, problem.waists, problem.quadrature);

  std::vector<Eigen::Index> where(n);
  for (size_t s = 0; s < n; ++s)
    where[s] = std::find(achieved.modes.begin(), achieved.modes.end(),
                         problem.target.modes[s]) - achieved.modes.begin();

  double weight_inside = 0.0;
  complexd overlap = 0.0;
  const double target_norm = problem.target.norm();
  for (size_t s = 0; s < n; ++s)
    for (size_t i = 0; i < n; ++i) {
      const complexd a = achieved.coeffs(where[s], where[i]);
      weight_inside += std::norm(a);
      overlap += std::conj(problem.target.coeffs(s, i) / target_norm) * a;
    }

  const double weight_total = achieved.coeffs.squaredNorm();
  solution.subspace_leakage =
      weight_total > 0.0 ? 1.0 - weight_inside / weight_total : 0.0;
  solution.achieved_fidelity =
      weight_inside > 0.0 ? std::norm(overlap) / weight_inside : 0.0;
  solution.low_fidelity = solution.achieved_fidelity < kReachableFidelity;
  return solution;
}

}  // namespace spdc
