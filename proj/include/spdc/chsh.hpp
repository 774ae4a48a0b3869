#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "spdc/biphoton.hpp"

namespace spdc {

// Analyzer setting: each arm projects onto the equal-weight first-order
// superposition (e^{i theta}|HG01> + e^{-i theta}|HG10>)/sqrt2.
struct MeasurementSetting {
  double theta_a = 0.0;
  double theta_b = 0.0;
};

// The four analyzer orientations of one CHSH run.
struct ChshAngles {
  double a = 0.0;
  double a_prime = 0.0;
  double b = 0.0;
  double b_prime = 0.0;

  friend bool operator==(const ChshAngles&, const ChshAngles&) = default;
};

// Angles maximizing S for the ideal correlated state: S = 2 sqrt2.
ChshAngles canonical_chsh_angles();

// Poisson shot-noise model: every projective orientation accumulates counts
// with mean mean_counts * probability + background, independently per trial.
struct PoissonNoiseSpec {
  double mean_counts = 50.0;
  int trials = 1;
  double background = 0.0;

  friend bool operator==(const PoissonNoiseSpec&, const PoissonNoiseSpec&) = default;
};

struct ChshRecord {
  ChshAngles angles;
  // E for the setting pairs [(a,b), (a,b'), (a',b), (a',b')]; with noise these
  // are per-trial means.
  std::array<double, 4> e_values{};
  double s = 0.0;
  // Sample standard deviation of S over trials (the propagated sigma when
  // only one trial was run); zero for noiseless runs.
  double s_uncertainty = 0.0;
  // Mean over trials of the first-order Poisson error propagation
  // sigma_S^2 = sum_blocks (1 - E^2) / D.
  double s_propagated_sigma = 0.0;
  // First trial's raw counts, [block][orientation], when noise was enabled.
  std::optional<std::array<std::array<std::uint64_t, 4>, 4>> raw_counts;
};

Eigen::Vector2cd projector_state(double theta);

// Coincidence probability of the joint projection at one setting; the state
// must live on the first-order HG pair.
double coincidence_probability(const BiphotonState& state,
                               const MeasurementSetting& setting);

// E = (N1 + N2 - N3 - N4) / (N1 + N2 + N3 + N4) for the orientation counts
// [(a,b), (a+90,b+90), (a+90,b), (a,b+90)].  Throws
// UndefinedCorrelationError when all four entries vanish.
double correlation_E(const std::array<double, 4>& counts);

// Full CHSH evaluation.  Without noise the probabilities enter E directly
// and S is exact; with noise, counts are drawn per trial from Poisson
// statistics (deterministic in `seed`) and S statistics are accumulated
// over the trials.
ChshRecord chsh_S(const BiphotonState& state, const ChshAngles& angles,
                  const std::optional<PoissonNoiseSpec>& noise = {},
                  std::uint64_t seed = 1);

// Normalized coincidence-rate curve vs theta_b, one column per theta_a:
// each point is N(a,b) / D(a,b) with D summed over the four completing
// orientations (exactly cos^2(theta_a - theta_b) for the ideal PsiPlus).
struct ChshCurve {
  std::vector<double> theta_a;
  std::vector<double> theta_b;
  Eigen::MatrixXd values;  // rows follow theta_b, columns theta_a
};

ChshCurve chsh_curve(const BiphotonState& state,
                     const std::vector<double>& theta_a_list, double b_start,
                     double b_stop, int b_count,
                     const std::optional<PoissonNoiseSpec>& noise = {},
                     std::uint64_t seed = 1);

}  // namespace spdc
