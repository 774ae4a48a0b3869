#include "spdc/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spdc {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

// Physicists' Hermite polynomial H_n via upward recurrence.
double hermite(int n, double xi) {
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next = 2.0 * xi * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// Generalized Laguerre polynomial L_p^alpha via upward recurrence.
double laguerre(int p, int alpha, double z) {
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 0; k < p; ++k) {
    const double next =
        ((2.0 * k + 1.0 + alpha - z) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

// 1D Hermite-Gaussian normalization sqrt(sqrt(2/pi) / (2^n n! w)), evaluated
// in log space so high orders neither overflow nor lose precision.
double hg_norm_1d(int n, double w) {
  const double log_norm = 0.5 * (0.5 * std::log(2.0 / kPi) -
                                 n * std::numbers::ln2 -
                                 std::lgamma(n + 1.0) - std::log(w));
  return std::exp(log_norm);
}

// Laguerre-Gaussian normalization sqrt(2 p! / (pi (p+|l|)!)) / w.
double lg_norm(int p, int l, double w) {
  const double log_norm =
      0.5 * (std::numbers::ln2 - std::log(kPi) + std::lgamma(p + 1.0) -
             std::lgamma(p + std::abs(l) + 1.0)) -
      std::log(w);
  return std::exp(log_norm);
}

// Envelope-free factor of the 1D HG mode: N_n * H_n(sqrt(2) x / w).
double hg_poly_1d(int n, double w, double x) {
  return hg_norm_1d(n, w) * hermite(n, kSqrt2 * x / w);
}

// Envelope-free factor of LG(p, l).  The azimuthal phase and radial power
// combine into (sqrt(2)/w)^|l| (x +/- i y)^|l|, which keeps the evaluation
// polynomial in (x, y) and avoids atan2 branch cuts.
complexd lg_poly(int p, int l, double w, double x, double y) {
  const int al = std::abs(l);
  complexd azimuthal(1.0, 0.0);
  if (al > 0) {
    const complexd base =
        complexd(x, l > 0 ? y : -y) * (kSqrt2 / w);
    for (int k = 0; k < al; ++k) azimuthal *= base;
  }
  const double r2 = x * x + y * y;
  return lg_norm(p, l, w) * azimuthal * laguerre(p, al, 2.0 * r2 / (w * w));
}

double binomial(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                  std::lgamma(n - k + 1.0));
}

complexd i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void check_waist(double waist) {
  if (!(waist > 0.0)) throw std::domain_error("mode waist must be positive");
}

}  // namespace

int ModeId::order() const {
  return family == ModeFamily::HG ? a + b : 2 * a + std::abs(b);
}

std::string ModeId::label() const {
  const char* name = family == ModeFamily::HG ? "HG" : "LG";
  return std::string(name) + "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

ModeId hg(int i, int j) { return {ModeFamily::HG, i, j}; }
ModeId lg(int p, int l) { return {ModeFamily::LG, p, l}; }

void validate(const ModeId& mode) {
  if (mode.family == ModeFamily::HG) {
    if (mode.a < 0 || mode.b < 0)
      throw std::domain_error("HG mode orders must be nonnegative: " + mode.label());
  } else {
    if (mode.a < 0)
      throw std::domain_error("LG radial index must be nonnegative: " + mode.label());
  }
}

std::vector<double> GridSpec::axis() const {
  if (samples <= 0 || !(half_width > 0.0))
    throw std::domain_error("grid needs positive half width and sample count");
  std::vector<double> xs(samples);
  const double h = step();
  for (int k = 0; k < samples; ++k) xs[k] = -half_width + (k + 0.5) * h;
  return xs;
}

GridSpec default_grid(double max_waist) {
  check_waist(max_waist);
  return GridSpec{5.0 * max_waist, 256};
}

complexd mode_amplitude(const ModeId& mode, double waist, double x, double y) {
  validate(mode);
  check_waist(waist);
  const double envelope = std::exp(-(x * x + y * y) / (waist * waist));
  if (mode.family == ModeFamily::HG)
    return hg_poly_1d(mode.a, waist, x) * hg_poly_1d(mode.b, waist, y) * envelope;
  return lg_poly(mode.a, mode.b, waist, x, y) * envelope;
}

complexd mode_polynomial_part(const ModeId& mode, double waist, double x, double y) {
  validate(mode);
  check_waist(waist);
  if (mode.family == ModeFamily::HG)
    return hg_poly_1d(mode.a, waist, x) * hg_poly_1d(mode.b, waist, y);
  return lg_poly(mode.a, mode.b, waist, x, y);
}

double hg_polynomial_1d(int order, double waist, double x) {
  if (order < 0) throw std::domain_error("HG order must be nonnegative");
  check_waist(waist);
  return hg_poly_1d(order, waist, x);
}

std::vector<complexd> evaluate_mode(const ModeId& mode, double waist,
                                    std::span<const std::array<double, 2>> points) {
  validate(mode);
  check_waist(waist);
  std::vector<complexd> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(mode_amplitude(mode, waist, p[0], p[1]));
  return out;
}

complexd ModeField::amplitude(double x, double y) const {
  complexd acc = 0.0;
  for (const auto& [mode, weight] : terms)
    acc += weight * mode_amplitude(mode, waist, x, y);
  return acc;
}

complexd ModeField::polynomial_part(double x, double y) const {
  complexd acc = 0.0;
  for (const auto& [mode, weight] : terms)
    acc += weight * mode_polynomial_part(mode, waist, x, y);
  return acc;
}

Eigen::MatrixXcd ModeField::sample(const GridSpec& grid) const {
  const auto xs = grid.axis();
  Eigen::MatrixXcd field(grid.samples, grid.samples);
  for (int iy = 0; iy < grid.samples; ++iy)
    for (int ix = 0; ix < grid.samples; ++ix)
      field(iy, ix) = amplitude(xs[ix], xs[iy]);
  return field;
}

SuperposeResult superpose(std::vector<std::pair<ModeId, complexd>> terms,
                          double waist) {
  check_waist(waist);
  if (terms.empty()) throw std::invalid_argument("superpose needs at least one term");

  ModeField field;
  field.waist = waist;
  for (const auto& [mode, weight] : terms) {
    validate(mode);
    auto it = std::find_if(field.terms.begin(), field.terms.end(),
                           [&](const auto& t) { return t.first == mode; });
    if (it == field.terms.end())
      field.terms.emplace_back(mode, weight);
    else
      it->second += weight;
  }

  double norm2 = 0.0;
  for (const auto& [mode, weight] : field.terms) norm2 += std::norm(weight);
  const double norm = std::sqrt(norm2);
  if (!(norm > 1e-300))
    throw std::invalid_argument("superpose: weights have zero norm (degenerate input)");
  for (auto& [mode, weight] : field.terms) weight /= norm;
  return {std::move(field), norm};
}

Eigen::Matrix2cd hg_to_lg_first_order() {
  // U(a, s) = <lg_a | hg_s> with hg = [HG(0,1), HG(1,0)], lg = [LG(0,+1), LG(0,-1)]
  // and LG(0,+-1) = (HG(1,0) +- i HG(0,1)) / sqrt(2).
  Eigen::Matrix2cd u;
  const complexd i(0.0, 1.0);
  u << -i, 1.0,
        i, 1.0;
  return u / kSqrt2;
}

std::vector<std::pair<ModeId, complexd>> lg_in_hg_basis(int p, int l) {
  validate(lg(p, l));
  const int al = std::abs(l);
  const int order = 2 * p + al;
  const int n = p + std::max(-l, 0);
  const int m = p + std::max(l, 0);

  // Taylor coefficients of (1-t)^n (1+t)^m around t = 0 by convolution.
  std::vector<double> taylor(order + 1, 0.0);
  for (int r = 0; r <= n; ++r) {
    const double left = binomial(n, r) * (r % 2 == 0 ? 1.0 : -1.0);
    for (int s = 0; s <= m && r + s <= order; ++s)
      taylor[r + s] += left * binomial(m, s);
  }

  // Expansion over same-order HG modes; the (-1)^p front factor aligns the
  // result with the Laguerre convention used by mode_amplitude().
  const double sign = (p % 2 == 0) ? 1.0 : -1.0;
  std::vector<std::pair<ModeId, complexd>> expansion;
  expansion.reserve(order + 1);
  for (int k = 0; k <= order; ++k) {
    const double log_b = 0.5 * (std::lgamma(order - k + 1.0) + std::lgamma(k + 1.0) -
                                order * std::numbers::ln2 -
                                std::lgamma(n + 1.0) - std::lgamma(m + 1.0));
    const complexd coeff = sign * i_power(k) * std::exp(log_b) * taylor[k];
    expansion.emplace_back(hg(order - k, k), coeff);
  }
  return expansion;
}

complexd grid_inner_product(const ModeField& f, const ModeField& g,
                            const GridSpec& grid) {
  const auto xs = grid.axis();
  const double cell = grid.step() * grid.step();
  complexd acc = 0.0;
  for (double y : xs)
    for (double x : xs)
      acc += std::conj(f.amplitude(x, y)) * g.amplitude(x, y);
  return acc * cell;
}

std::vector<ModeId> hg_modes_up_to(int max_order) {
  if (max_order < 0) throw std::domain_error("mode order cap must be nonnegative");
  std::vector<ModeId> modes;
  for (int order = 0; order <= max_order; ++order)
    for (int a = 0; a <= order; ++a) modes.push_back(hg(a, order - a));
  return modes;
}

}  // namespace spdc
