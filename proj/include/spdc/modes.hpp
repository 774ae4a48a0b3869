#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace spdc {

using complexd = std::complex<double>;

enum class ModeFamily { HG, LG };

// Identifies one transverse mode.  For HG modes (a, b) are the (x, y) orders;
// for LG modes a is the radial index p >= 0 and b the azimuthal index l
// (any sign).  Both families share a common beam waist supplied separately.
struct ModeId {
  ModeFamily family = ModeFamily::HG;
  int a = 0;
  int b = 0;

  // Combined transverse order: i + j for HG, 2p + |l| for LG.  Modes of equal
  // order are degenerate and mix under basis changes.
  int order() const;

  // "HG(i,j)" or "LG(p,l)" - the form accepted back by parse_mode_label().
  std::string label() const;

  friend bool operator==(const ModeId&, const ModeId&) = default;
};

ModeId hg(int i, int j);
ModeId lg(int p, int l);

// Throws std::domain_error for negative HG orders or negative radial index.
void validate(const ModeId& mode);

// Square sampling window, symmetric about the beam axis.  Points are cell
// midpoints, so integrals over samples use the plain midpoint rule with
// weight step()^2 and no boundary special-casing.
struct GridSpec {
  double half_width = 0.0;
  int samples = 0;

  double step() const { return 2.0 * half_width / samples; }
  std::vector<double> axis() const;
};

// Window wide enough that every mode of interest has decayed to numerical
// zero at the edge: 5 waists covers orders well past anything used here.
GridSpec default_grid(double max_waist);

// Single-mode amplitude u(x, y) at the beam waist for the given 1/e^2 field
// radius.  HG modes are unit-norm Hermite-Gaussians, LG modes unit-norm
// Laguerre-Gaussians with azimuthal phase exp(i*l*phi); both satisfy
// integral |u|^2 dx dy = 1.
complexd mode_amplitude(const ModeId& mode, double waist, double x, double y);

// mode_amplitude with the Gaussian envelope exp(-(x^2+y^2)/w^2) divided out.
// What remains is a polynomial in x and y, which is what Gauss-Hermite
// quadrature integrates exactly.
complexd mode_polynomial_part(const ModeId& mode, double waist, double x, double y);

// Envelope-free 1D Hermite-Gaussian factor N_n H_n(sqrt(2) x / waist); the
// full 1D mode is this times exp(-x^2/waist^2), and HG(i,j) separates into
// the product of the 1D factors in x and y.
double hg_polynomial_1d(int order, double waist, double x);

// Batch evaluation over arbitrary sample positions {x, y}.
std::vector<complexd> evaluate_mode(const ModeId& mode, double waist,
                                    std::span<const std::array<double, 2>> points);

// A normalized coherent superposition of modes at a common waist.
struct ModeField {
  double waist = 0.0;
  std::vector<std::pair<ModeId, complexd>> terms;

  complexd amplitude(double x, double y) const;
  complexd polynomial_part(double x, double y) const;

  // Samples the field on a grid; element (iy, ix) is the amplitude at
  // (axis[ix], axis[iy]) with both axes ascending.
  Eigen::MatrixXcd sample(const GridSpec& grid) const;
};

struct SuperposeResult {
  ModeField field;            // weights scaled to unit L2 norm
  double normalization = 0;   // norm of the weight vector that was divided out
};

// Builds a normalized field from (mode, weight) terms.  Duplicate modes are
// merged.  Throws std::invalid_argument when the combined weight vector has
// zero norm and std::domain_error for invalid mode indices or waist <= 0.
SuperposeResult superpose(std::vector<std::pair<ModeId, complexd>> terms,
                          double waist);

// Unitary relating the first-order bases.  Row/column convention:
//   (new coefficients) = U * (old coefficients),  U(a, s) = <new_a | old_s>
// with old basis ordered [HG(0,1), HG(1,0)] and new [LG(0,+1), LG(0,-1)],
// where LG(0,+1) = (HG(1,0) + i HG(0,1)) / sqrt(2).
Eigen::Matrix2cd hg_to_lg_first_order();

// Exact finite expansion of LG(p, l) over the HG modes of the same order
// N = 2p + |l|, i.e. HG(N-k, k) for k = 0..N.  Matches mode_amplitude()
// conventions; verified numerically in the test suite.
std::vector<std::pair<ModeId, complexd>> lg_in_hg_basis(int p, int l);

// Midpoint-rule inner product <f|g> = sum conj(f) g step^2 of two sampled
// fields.  Convergent to the analytic overlap once the grid resolves both.
complexd grid_inner_product(const ModeField& f, const ModeField& g,
                            const GridSpec& grid);

// Enumerates HG modes with order() <= max_order, sorted by (order, a).
std::vector<ModeId> hg_modes_up_to(int max_order);

}  // namespace spdc
