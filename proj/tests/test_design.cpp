#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "spdc/design.hpp"

using namespace spdc;

namespace {

const double kWaist = 8.7e-4;
const WaistConfig kWaists{kWaist, kWaist};

DesignProblem bell_problem(BellState which, double regularization) {
  DesignProblem problem;
  problem.target = bell_state(which, Basis::HG, kWaist);
  problem.pump_basis = hg_modes_up_to(2);
  problem.waists = kWaists;
  problem.regularization = regularization;
  return problem;
}

// angle-free distance between unit vectors: || a - e^{i phi} b ||
double phase_free_error(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const complexd overlap = b.dot(a);
  const complexd phase =
      std::abs(overlap) > 0 ? overlap / std::abs(overlap) : complexd(1, 0);
  return (a - phase * b).norm();
}

}  // namespace

TEST_CASE("four-row target with six pump modes is ill-posed unregularized") {
  try {
    solve_design(bell_problem(BellState::PsiPlus, 0.0));
    FAIL("expected IllPosedError");
  } catch (const IllPosedError& e) {
    // conditioning info is part of the message
    CHECK(std::string(e.what()).find("conditioning") != std::string::npos);
  }
}

TEST_CASE("regularized design for the odd Bell state is HG11-dominant") {
  const DesignProblem problem = bell_problem(BellState::PsiPlus, 1e-8);
  const DesignSolution sol = solve_design(problem);
  REQUIRE(sol.weights.size() == 6);
  // pump_basis order: 00, 01, 10, 02, 11, 20
  CHECK(std::abs(sol.weights(4)) > 0.999);
  CHECK(sol.achieved_fidelity > 0.99);
  CHECK(!sol.low_fidelity);
  // weights come out unit-norm with the dominant entry made real positive
  CHECK(sol.weights.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.weights(4).imag() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sol.weights(4).real() > 0.0);

  // Leakage must match a from-scratch forward run over the documented
  // order-4 reporting cap: weight outside the target's four mode pairs.
  std::vector<std::pair<ModeId, complexd>> terms;
  for (int q = 0; q < 6; ++q)
    terms.emplace_back(problem.pump_basis[static_cast<size_t>(q)], sol.weights(q));
  const ModeField pump = superpose(terms, kWaist).field;
  const BiphotonState forward = biphoton_state(pump, 4, kWaists);
  double inside = 0.0;
  for (const ModeId& s : problem.target.modes)
    for (const ModeId& i : problem.target.modes) {
      const auto si = std::find(forward.modes.begin(), forward.modes.end(), s) -
                      forward.modes.begin();
      const auto ii = std::find(forward.modes.begin(), forward.modes.end(), i) -
                      forward.modes.begin();
      inside += std::norm(forward.coeffs(si, ii));
    }
  const double leakage = 1.0 - inside / forward.coeffs.squaredNorm();
  CHECK(sol.subspace_leakage == doctest::Approx(leakage).epsilon(1e-9));
  CHECK(sol.subspace_leakage > 0.0);
  CHECK(sol.subspace_leakage < 1.0);
}

TEST_CASE("design for the even Bell state avoids odd pump modes") {
  const DesignSolution sol = solve_design(bell_problem(BellState::PhiPlus, 1e-8));
  CHECK(sol.achieved_fidelity > 0.99);
  CHECK(!sol.low_fidelity);
  CHECK(std::abs(sol.weights(1)) < 1e-6);  // HG(0,1)
  CHECK(std::abs(sol.weights(2)) < 1e-6);  // HG(1,0)
  CHECK(std::abs(sol.weights(4)) < 1e-6);  // HG(1,1)
}

TEST_CASE("antisymmetric target is unreachable and flagged, not thrown") {
  const DesignSolution sol = solve_design(bell_problem(BellState::PsiMinus, 1e-8));
  CHECK(sol.weights.norm() == 0.0);
  CHECK(sol.low_fidelity);
  CHECK(sol.achieved_fidelity == 0.0);
  // nothing of the target is reachable, so the full target remains as residual
  CHECK(sol.residual == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("round trip: forward coefficients pin the pump back down") {
  std::mt19937 rng(31);
  std::normal_distribution<double> gauss;
  const auto basis = hg_modes_up_to(2);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXcd p(6);
    for (int q = 0; q < 6; ++q) p(q) = complexd(gauss(rng), gauss(rng));
    p /= p.norm();

    std::vector<std::pair<ModeId, complexd>> terms;
    for (int q = 0; q < 6; ++q) terms.emplace_back(basis[static_cast<size_t>(q)], p(q));
    const ModeField pump = superpose(terms, kWaist).field;

    DesignProblem problem;
    problem.target = biphoton_state(pump, 2, kWaists);
    problem.pump_basis = basis;
    problem.waists = kWaists;
    problem.regularization = 0.0;  // full-rank 36x6 map, plain least squares
    const DesignSolution sol = solve_design(problem);

    CHECK(phase_free_error(sol.weights, p) < 1e-6);
    CHECK(sol.residual < 1e-6);
    CHECK(sol.conditioning > 1e-6);
    CHECK(sol.achieved_fidelity > 0.99);
  }
}

TEST_CASE("design map shape and input validation") {
  DesignProblem problem = bell_problem(BellState::PsiPlus, 0.0);
  const Eigen::MatrixXcd m = assemble_design_map(problem);
  CHECK(m.rows() == 4);   // 2x2 target pairs, row-major
  CHECK(m.cols() == 6);   // order <= 2 pump modes

  problem.pump_basis = {hg(0, 0), hg(0, 0)};
  CHECK_THROWS_AS(assemble_design_map(problem), std::invalid_argument);
  problem.pump_basis = {lg(0, 1)};
  CHECK_THROWS_AS(assemble_design_map(problem), std::invalid_argument);
  problem.pump_basis = {};
  CHECK_THROWS_AS(assemble_design_map(problem), std::invalid_argument);
}
