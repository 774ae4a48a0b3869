#include "spdc/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <utility>

namespace spdc {
namespace {

void check_common(const ModeField& pump, const ModeId& signal,
                  const ModeId& idler, const WaistConfig& waists,
                  const QuadratureSpec& quad) {
  if (signal.family != ModeFamily::HG || idler.family != ModeFamily::HG)
    throw std::invalid_argument("overlap coefficients are defined on HG signal/idler labels");
  validate(signal);
  validate(idler);
  if (!(waists.pump > 0.0) || !(waists.downconverted > 0.0))
    throw std::invalid_argument("waists must be positive");
  if (quad.nodes < 1)
    throw std::invalid_argument("quadrature needs at least one node per axis");
  if (pump.terms.empty())
    throw std::invalid_argument("pump field has no terms");
  double norm2 = 0.0;
  for (const auto& [mode, weight] : pump.terms) norm2 += std::norm(weight);
  if (!(norm2 > 0.0)) throw std::invalid_argument("pump field has zero norm");
  if (std::abs(pump.waist - waists.pump) > 1e-9 * waists.pump)
    throw std::invalid_argument("pump field waist disagrees with waist configuration");
}

// 1D mode tables over a fixed set of abscissae, keyed by (HG order, waist).
class Table1d {
 public:
  explicit Table1d(const std::vector<double>& xs) : xs_(xs) {}

  // envelope-free factor N_n H_n(sqrt2 x / w)
  const Eigen::VectorXd& poly(int order, double w) {
    return fetch(poly_, order, w, [&](double x) {
      return hg_polynomial_1d(order, w, x);
    });
  }

  // full 1D amplitude, envelope included
  const Eigen::VectorXd& amp(int order, double w) {
    return fetch(amp_, order, w, [&](double x) {
      return hg_polynomial_1d(order, w, x) * std::exp(-x * x / (w * w));
    });
  }

 private:
  using Key = std::pair<int, double>;

  template <typename F>
  const Eigen::VectorXd& fetch(std::map<Key, Eigen::VectorXd>& cache, int order,
                               double w, F&& f) {
    auto it = cache.find({order, w});
    if (it != cache.end()) return it->second;
    Eigen::VectorXd values(xs_.size());
    for (size_t k = 0; k < xs_.size(); ++k) values[k] = f(xs_[k]);
    return cache.emplace(Key{order, w}, std::move(values)).first->second;
  }

  std::vector<double> xs_;
  std::map<Key, Eigen::VectorXd> poly_;
  std::map<Key, Eigen::VectorXd> amp_;
};

// One Gauss-Hermite resolution: the combined envelope
// exp(-alpha r^2), alpha = 1/w_p^2 + 2/w_dc^2, becomes the GH weight after
// rescaling x = s t with s = 1/sqrt(alpha), leaving a pure polynomial
// integrand evaluated at the scaled nodes.
struct GhEval {
  Eigen::VectorXd weights;     // GH weights (include the envelope)
  std::vector<double> xs;      // scaled abscissae s * t
  double jacobian = 0.0;       // s^2
  double wd = 0.0;             // signal/idler waist
  Eigen::MatrixXcd pump_poly;  // pump polynomial part at (xs[k], xs[l])
  std::unique_ptr<Table1d> tables;
};

GhEval make_gh_eval(const ModeField& pump, const WaistConfig& waists, int n) {
  GhEval ev;
  std::vector<double> t, w;
  gauss_hermite_rule(n, t, w);

  const double alpha = 1.0 / (waists.pump * waists.pump) +
                       2.0 / (waists.downconverted * waists.downconverted);
  const double s = 1.0 / std::sqrt(alpha);
  ev.jacobian = s * s;
  ev.wd = waists.downconverted;
  ev.xs.resize(n);
  ev.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    ev.xs[k] = s * t[k];
    ev.weights[k] = w[k];
  }
  ev.tables = std::make_unique<Table1d>(ev.xs);

  // Pump polynomial part over the node lattice.  HG terms separate into
  // outer products of 1D tables; LG terms are evaluated directly.
  ev.pump_poly = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [mode, weight] : pump.terms) {
    if (mode.family == ModeFamily::HG) {
      const Eigen::VectorXd& ux = ev.tables->poly(mode.a, pump.waist);
      const Eigen::VectorXd& uy = ev.tables->poly(mode.b, pump.waist);
      ev.pump_poly.noalias() += weight * (ux * uy.transpose()).cast<complexd>();
    } else {
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          ev.pump_poly(k, l) +=
              weight * mode_polynomial_part(mode, pump.waist, ev.xs[k], ev.xs[l]);
    }
  }
  return ev;
}

complexd gh_contract(const GhEval& ev, const ModeId& signal, const ModeId& idler) {
  const Eigen::VectorXd& sx = ev.tables->poly(signal.a, ev.wd);
  const Eigen::VectorXd& sy = ev.tables->poly(signal.b, ev.wd);
  const Eigen::VectorXd& ix = ev.tables->poly(idler.a, ev.wd);
  const Eigen::VectorXd& iy = ev.tables->poly(idler.b, ev.wd);

  // C = s^2 * sum_{k,l} w_k w_l P(k,l) sx_k ix_k sy_l iy_l; the x-products
  // are symmetric under signal<->idler exchange, so swapped labels
  // reproduce the identical value bit for bit.
  const Eigen::VectorXd u = ev.weights.cwiseProduct(sx.cwiseProduct(ix));
  const Eigen::VectorXd v = ev.weights.cwiseProduct(sy.cwiseProduct(iy));
  const complexd total = u.cast<complexd>().transpose() * (ev.pump_poly * v.cast<complexd>());
  return ev.jacobian * total;
}

// Midpoint Riemann sum of the full amplitudes over [-6 w_max, 6 w_max]^2.
// Row-by-row accumulation of pump * signal * idler; the only shortcut is
// evaluating the separable 1D factors through tables.
complexd riemann_eval(const ModeField& pump, const ModeId& signal,
                      const ModeId& idler, const WaistConfig& waists, int n) {
  const double half = 6.0 * std::max(waists.pump, waists.downconverted);
  const GridSpec grid{half, n};
  const std::vector<double> xs = grid.axis();
  Table1d tables(xs);

  const Eigen::VectorXd& sx = tables.amp(signal.a, waists.downconverted);
  const Eigen::VectorXd& sy = tables.amp(signal.b, waists.downconverted);
  const Eigen::VectorXd& ix = tables.amp(idler.a, waists.downconverted);
  const Eigen::VectorXd& iy = tables.amp(idler.b, waists.downconverted);

  std::vector<const Eigen::VectorXd*> px, py;
  std::vector<complexd> hg_weights;
  std::vector<std::pair<ModeId, complexd>> lg_terms;
  for (const auto& [mode, weight] : pump.terms) {
    if (mode.family == ModeFamily::HG) {
      px.push_back(&tables.amp(mode.a, pump.waist));
      py.push_back(&tables.amp(mode.b, pump.waist));
      hg_weights.push_back(weight);
    } else {
      lg_terms.emplace_back(mode, weight);
    }
  }

  std::vector<complexd> pump_row(n);
  complexd acc = 0.0;
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      complexd p = 0.0;
      for (size_t t = 0; t < hg_weights.size(); ++t)
        p += hg_weights[t] * ((*px[t])[col] * (*py[t])[row]);
      for (const auto& [mode, weight] : lg_terms)
        p += weight * mode_amplitude(mode, pump.waist, xs[col], xs[row]);
      pump_row[col] = p;
    }
    complexd row_acc = 0.0;
    for (int col = 0; col < n; ++col)
      row_acc += pump_row[col] * (sx[col] * ix[col]);
    acc += row_acc * (sy[row] * iy[row]);
  }
  return acc * (grid.step() * grid.step());
}

std::string pair_context(const ModeId& signal, const ModeId& idler) {
  return "C[" + signal.label() + "][" + idler.label() + "]";
}

complexd converged(complexd coarse, complexd fine, const ModeId& signal,
                   const ModeId& idler) {
  if (std::abs(coarse - fine) > kQuadratureAgreementTol)
    throw ConvergenceError(pair_context(signal, idler), coarse, fine);
  return fine;
}

}  // namespace

void gauss_hermite_rule(int n, std::vector<double>& nodes,
                        std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("Gauss-Hermite rule needs n >= 1");

  // Golub-Welsch: Jacobi matrix of the Hermite recurrence has zero diagonal
  // and off-diagonal beta_k = sqrt(k/2); nodes are its eigenvalues and
  // weights sqrt(pi) times the squared first eigenvector components.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(k / 2.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("Gauss-Hermite eigen decomposition failed");

  nodes.resize(n);
  weights.resize(n);
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  for (int k = 0; k < n; ++k) {
    nodes[k] = solver.eigenvalues()[k];
    const double v0 = solver.eigenvectors()(0, k);
    weights[k] = sqrt_pi * v0 * v0;
  }

  // Enforce the exact +/- symmetry of the rule; this makes parity-forbidden
  // overlaps cancel identically instead of to eigensolver precision.
  for (int k = 0; k < n / 2; ++k) {
    const int m = n - 1 - k;
    const double t = 0.5 * (nodes[m] - nodes[k]);
    nodes[k] = -t;
    nodes[m] = t;
    const double w = 0.5 * (weights[k] + weights[m]);
    weights[k] = weights[m] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

complexd coefficient(const ModeField& pump, const ModeId& signal,
                     const ModeId& idler, const WaistConfig& waists,
                     const QuadratureSpec& quad) {
  check_common(pump, signal, idler, waists, quad);
  if (quad.scheme == QuadratureScheme::GaussHermite) {
    const GhEval coarse = make_gh_eval(pump, waists, quad.nodes);
    const GhEval fine = make_gh_eval(pump, waists, 2 * quad.nodes);
    return converged(gh_contract(coarse, signal, idler),
                     gh_contract(fine, signal, idler), signal, idler);
  }
  return converged(riemann_eval(pump, signal, idler, waists, quad.nodes),
                   riemann_eval(pump, signal, idler, waists, 2 * quad.nodes),
                   signal, idler);
}

Eigen::MatrixXcd coefficient_matrix(const ModeField& pump,
                                    const std::vector<ModeId>& signal_modes,
                                    const std::vector<ModeId>& idler_modes,
                                    const WaistConfig& waists,
                                    const QuadratureSpec& quad) {
  if (signal_modes.empty() || idler_modes.empty())
    throw std::invalid_argument("coefficient_matrix needs nonempty mode lists");

  Eigen::MatrixXcd out(signal_modes.size(), idler_modes.size());
  const bool symmetric = signal_modes == idler_modes;

  if (quad.scheme != QuadratureScheme::GaussHermite) {
    for (size_t s = 0; s < signal_modes.size(); ++s)
      for (size_t i = symmetric ? s : 0; i < idler_modes.size(); ++i) {
        out(s, i) = coefficient(pump, signal_modes[s], idler_modes[i], waists, quad);
        if (symmetric) out(i, s) = out(s, i);
      }
    return out;
  }

  check_common(pump, signal_modes[0], idler_modes[0], waists, quad);
  const GhEval coarse = make_gh_eval(pump, waists, quad.nodes);
  const GhEval fine = make_gh_eval(pump, waists, 2 * quad.nodes);
  for (size_t s = 0; s < signal_modes.size(); ++s) {
    validate(signal_modes[s]);
    for (size_t i = symmetric ? s : 0; i < idler_modes.size(); ++i) {
      validate(idler_modes[i]);
      if (signal_modes[s].family != ModeFamily::HG ||
          idler_modes[i].family != ModeFamily::HG)
        throw std::invalid_argument("overlap coefficients are defined on HG signal/idler labels");
      out(s, i) = converged(gh_contract(coarse, signal_modes[s], idler_modes[i]),
                            gh_contract(fine, signal_modes[s], idler_modes[i]),
                            signal_modes[s], idler_modes[i]);
      if (symmetric) out(i, s) = out(s, i);
    }
  }
  return out;
}

complexd oracle_coefficient(const ModeField& pump, const ModeId& signal,
                            const ModeId& idler, const WaistConfig& waists,
                            const QuadratureSpec& quad) {
  check_common(pump, signal, idler, waists, quad);
  return riemann_eval(pump, signal, idler, waists, quad.nodes);
}

}  // namespace spdc
