#include "spdc/chsh.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace spdc {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2.0;

// splitmix64 step; used to derive independent, reproducible RNG streams from
// (seed, stream-index) so results do not depend on evaluation order.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ stream));
}

std::uint64_t draw_poisson(std::mt19937_64& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(rng);
}

// The four orientations completing one setting pair: (a,b), the pair with
// both analyzers rotated by 90 degrees, and the two mixed rotations.
std::array<MeasurementSetting, 4> orientations(double a, double b) {
  return {{{a, b}, {a + kHalfPi, b + kHalfPi}, {a + kHalfPi, b}, {a, b + kHalfPi}}};
}

void check_noise(const PoissonNoiseSpec& noise) {
  if (!(noise.mean_counts > 0.0))
    throw std::invalid_argument("noise mean_counts must be positive");
  if (noise.trials < 1)
    throw std::invalid_argument("noise trials must be at least 1");
  if (noise.background < 0.0)
    throw std::invalid_argument("noise background must be nonnegative");
}

}  // namespace

ChshAngles canonical_chsh_angles() {
  return {0.0, kPi / 4.0, kPi / 8.0, 3.0 * kPi / 8.0};
}

Eigen::Vector2cd projector_state(double theta) {
  const complexd phase(std::cos(theta), std::sin(theta));
  Eigen::Vector2cd v;
  v << phase, std::conj(phase);
  return v / std::numbers::sqrt2;
}

double coincidence_probability(const BiphotonState& state,
                               const MeasurementSetting& setting) {
  if (state.modes != first_order_modes(Basis::HG))
    throw std::invalid_argument(
        "coincidence_probability expects a state on the first-order HG mode pair");
  const double norm2 = state.coeffs.squaredNorm();
  if (norm2 < 1e-28)
    throw std::domain_error("coincidence_probability: state has zero norm");
  const Eigen::Vector2cd a = projector_state(setting.theta_a);
  const Eigen::Vector2cd b = projector_state(setting.theta_b);
  const complexd amplitude = a.dot(state.coeffs * b.conjugate());
  return std::norm(amplitude) / norm2;
}

double correlation_E(const std::array<double, 4>& counts) {
  for (double c : counts)
    if (c < 0.0) throw std::invalid_argument("correlation counts must be nonnegative");
  const double d = counts[0] + counts[1] + counts[2] + counts[3];
  if (!(d > 0.0))
    throw UndefinedCorrelationError(
        "correlation undefined: all four orientation counts are zero");
  return (counts[0] + counts[1] - counts[2] - counts[3]) / d;
}

ChshRecord chsh_S(const BiphotonState& state, const ChshAngles& angles,
                  const std::optional<PoissonNoiseSpec>& noise,
                  std::uint64_t seed) {
  ChshRecord record;
  record.angles = angles;

  const std::array<std::pair<double, double>, 4> setting_pairs = {{
      {angles.a, angles.b},
      {angles.a, angles.b_prime},
      {angles.a_prime, angles.b},
      {angles.a_prime, angles.b_prime},
  }};

  // Probabilities are trial-independent; compute the 4x4 table once.
  std::array<std::array<double, 4>, 4> probs{};
  for (size_t blk = 0; blk < 4; ++blk) {
    const auto ors = orientations(setting_pairs[blk].first, setting_pairs[blk].second);
    for (size_t o = 0; o < 4; ++o)
      probs[blk][o] = coincidence_probability(state, ors[o]);
  }

  const auto combine = [](const std::array<double, 4>& e) {
    return e[0] - e[1] + e[2] + e[3];
  };

  if (!noise) {
    for (size_t blk = 0; blk < 4; ++blk)
      record.e_values[blk] = correlation_E(probs[blk]);
    record.s = combine(record.e_values);
    if (std::abs(record.s) > 2.0 * std::numbers::sqrt2 + 1e-6)
      throw std::logic_error("noiseless |S| exceeded the quantum bound");
    return record;
  }

  check_noise(*noise);
  const int trials = noise->trials;
  std::vector<double> s_per_trial(trials);
  double sigma_sum = 0.0;
  std::array<double, 4> e_sums{};

  for (int t = 0; t < trials; ++t) {
    auto rng = stream_rng(seed, static_cast<std::uint64_t>(t));
    std::array<double, 4> e{};
    double var_s = 0.0;
    for (size_t blk = 0; blk < 4; ++blk) {
      std::array<std::uint64_t, 4> counts{};
      std::array<double, 4> counts_d{};
      double d = 0.0;
      for (size_t o = 0; o < 4; ++o) {
        counts[o] = draw_poisson(rng, noise->mean_counts * probs[blk][o] +
                                          noise->background);
        counts_d[o] = static_cast<double>(counts[o]);
        d += counts_d[o];
      }
      e[blk] = correlation_E(counts_d);
      var_s += (1.0 - e[blk] * e[blk]) / d;
      if (t == 0) {
        if (!record.raw_counts) record.raw_counts.emplace();
        (*record.raw_counts)[blk] = counts;
      }
    }
    s_per_trial[t] = combine(e);
    sigma_sum += std::sqrt(var_s);
    for (size_t blk = 0; blk < 4; ++blk) e_sums[blk] += e[blk];
  }

  double s_mean = 0.0;
  for (double s : s_per_trial) s_mean += s;
  s_mean /= trials;
  record.s = s_mean;
  for (size_t blk = 0; blk < 4; ++blk) record.e_values[blk] = e_sums[blk] / trials;
  record.s_propagated_sigma = sigma_sum / trials;

  if (trials > 1) {
    double ss = 0.0;
    for (double s : s_per_trial) ss += (s - s_mean) * (s - s_mean);
    record.s_uncertainty = std::sqrt(ss / (trials - 1));
  } else {
    record.s_uncertainty = record.s_propagated_sigma;
  }
  return record;
}

ChshCurve chsh_curve(const BiphotonState& state,
                     const std::vector<double>& theta_a_list, double b_start,
                     double b_stop, int b_count,
                     const std::optional<PoissonNoiseSpec>& noise,
                     std::uint64_t seed) {
  if (theta_a_list.empty())
    throw std::invalid_argument("chsh_curve needs at least one theta_a value");
  if (b_count < 1)
    throw std::invalid_argument("chsh_curve needs at least one sweep point");
  if (noise) check_noise(*noise);

  ChshCurve curve;
  curve.theta_a = theta_a_list;
  curve.theta_b.resize(b_count);
  for (int k = 0; k < b_count; ++k)
    curve.theta_b[k] = b_count == 1
                           ? b_start
                           : b_start + (b_stop - b_start) * k / (b_count - 1);

  curve.values.resize(b_count, static_cast<int>(theta_a_list.size()));
  for (size_t ia = 0; ia < theta_a_list.size(); ++ia) {
    for (int ib = 0; ib < b_count; ++ib) {
      const auto ors = orientations(theta_a_list[ia], curve.theta_b[ib]);
      std::array<double, 4> values{};
      for (size_t o = 0; o < 4; ++o)
        values[o] = coincidence_probability(state, ors[o]);

      if (noise) {
        // Independent stream per curve point, offset away from the trial
        // streams used by chsh_S.
        auto rng = stream_rng(seed ^ 0xC5C5C5C5C5C5C5C5ull,
                              ia * 1000003ull + static_cast<std::uint64_t>(ib));
        for (size_t o = 0; o < 4; ++o)
          values[o] = static_cast<double>(draw_poisson(
              rng, noise->mean_counts * values[o] + noise->background));
      }

      const double d = values[0] + values[1] + values[2] + values[3];
      if (!(d > 0.0))
        throw UndefinedCorrelationError(
            "normalized rate undefined: zero counts across orientations");
      curve.values(ib, static_cast<int>(ia)) = values[0] / d;
    }
  }
  return curve;
}

}  // namespace spdc
