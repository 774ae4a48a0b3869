#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "spdc/biphoton.hpp"  // modes plus the LG enumeration helper

using namespace spdc;
using std::numbers::pi;

namespace {
ModeField single(const ModeId& mode, double waist) {
  return ModeField{waist, {{mode, complexd(1.0, 0.0)}}};
}
}  // namespace

TEST_CASE("mode ids: order, label, validation") {
  CHECK(hg(2, 3).order() == 5);
  CHECK(lg(1, -2).order() == 4);
  CHECK(hg(2, 3).label() == "HG(2,3)");
  CHECK(lg(1, -2).label() == "LG(1,-2)");
  CHECK_NOTHROW(validate(lg(0, -5)));
  CHECK_THROWS_AS(validate(hg(-1, 0)), std::domain_error);
  CHECK_THROWS_AS(validate(hg(0, -2)), std::domain_error);
  CHECK_THROWS_AS(validate(lg(-1, 0)), std::domain_error);
}

TEST_CASE("grid: midpoint axis is symmetric and uniform") {
  GridSpec grid{2.0, 8};
  const auto axis = grid.axis();
  REQUIRE(axis.size() == 8);
  CHECK(axis.front() == doctest::Approx(-axis.back()).epsilon(1e-15));
  CHECK(axis[1] - axis[0] == doctest::Approx(grid.step()).epsilon(1e-15));
  // midpoints: first point is half a step inside the window
  CHECK(axis.front() == doctest::Approx(-2.0 + grid.step() / 2).epsilon(1e-15));
}

TEST_CASE("HG amplitude: fundamental peak value") {
  const double w = 8.7e-4;
  const complexd a = mode_amplitude(hg(0, 0), w, 0.0, 0.0);
  CHECK(a.imag() == 0.0);
  CHECK(a.real() == doctest::Approx(std::sqrt(2.0 / (pi * w * w))).epsilon(1e-12));
  // odd y-order vanishes on the x axis
  CHECK(std::abs(mode_amplitude(hg(0, 1), w, 0.3 * w, 0.0)) < 1e-300);
}

TEST_CASE("HG modes are orthonormal on the sampling grid") {
  const double w = 8.7e-4;
  const auto modes = hg_modes_up_to(4);
  REQUIRE(modes.size() == 15);
  const GridSpec grid = default_grid(w);
  for (size_t a = 0; a < modes.size(); ++a)
    for (size_t b = a; b < modes.size(); ++b) {
      const complexd ip = grid_inner_product(single(modes[a], w), single(modes[b], w), grid);
      const double expect = a == b ? 1.0 : 0.0;
      CHECK(std::abs(ip - expect) < 1e-9);
    }
}

TEST_CASE("LG modes are orthonormal on the sampling grid") {
  const double w = 1.1e-3;
  const auto modes = lg_modes_up_to(3);
  REQUIRE(modes.size() == 10);
  const GridSpec grid = default_grid(w);
  for (size_t a = 0; a < modes.size(); ++a)
    for (size_t b = a; b < modes.size(); ++b) {
      const complexd ip = grid_inner_product(single(modes[a], w), single(modes[b], w), grid);
      const double expect = a == b ? 1.0 : 0.0;
      CHECK(std::abs(ip - expect) < 1e-9);
    }
}

TEST_CASE("first-order LG expansion has the documented phases") {
  // LG(0,+1) = (HG(1,0) + i HG(0,1)) / sqrt2
  const auto plus = lg_in_hg_basis(0, 1);
  REQUIRE(plus.size() == 2);
  const double r = 1.0 / std::sqrt(2.0);
  for (const auto& [mode, coeff] : plus) {
    if (mode == hg(1, 0)) CHECK(std::abs(coeff - complexd(r, 0)) < 1e-12);
    else if (mode == hg(0, 1)) CHECK(std::abs(coeff - complexd(0, r)) < 1e-12);
    else FAIL("unexpected mode in expansion");
  }
  const auto minus = lg_in_hg_basis(0, -1);
  for (const auto& [mode, coeff] : minus) {
    if (mode == hg(1, 0)) CHECK(std::abs(coeff - complexd(r, 0)) < 1e-12);
    else if (mode == hg(0, 1)) CHECK(std::abs(coeff - complexd(0, -r)) < 1e-12);
    else FAIL("unexpected mode in expansion");
  }
}

TEST_CASE("LG expansion reproduces the sampled LG field up to order 4") {
  const double w = 1.0e-3;
  const GridSpec grid = default_grid(w);
  for (int p = 0; 2 * p <= 4; ++p)
    for (int l = -(4 - 2 * p); 2 * p + std::abs(l) <= 4; ++l) {
      const ModeField direct = single(lg(p, l), w);
      const ModeField expanded{w, lg_in_hg_basis(p, l)};
      const complexd ip = grid_inner_product(direct, expanded, grid);
      CHECK(std::abs(ip - complexd(1, 0)) < 1e-9);
    }
}

TEST_CASE("first-order basis-change matrix matches grid inner products") {
  const double w = 9.0e-4;
  const GridSpec grid = default_grid(w);
  const Eigen::Matrix2cd u = hg_to_lg_first_order();
  CHECK((u * u.adjoint() - Eigen::Matrix2cd::Identity()).norm() < 1e-12);
  const ModeId old_modes[2] = {hg(0, 1), hg(1, 0)};
  const ModeId new_modes[2] = {lg(0, 1), lg(0, -1)};
  for (int a = 0; a < 2; ++a)
    for (int s = 0; s < 2; ++s) {
      const complexd ip =
          grid_inner_product(single(new_modes[a], w), single(old_modes[s], w), grid);
      CHECK(std::abs(ip - u(a, s)) < 1e-9);
    }
}

TEST_CASE("superpose: normalization, duplicate merge, rejects") {
  const double w = 1.0e-3;
  auto result = superpose({{hg(0, 0), complexd(1, 0)}, {hg(0, 0), complexd(1, 0)}}, w);
  REQUIRE(result.field.terms.size() == 1);
  CHECK(std::abs(result.field.terms[0].second - complexd(1, 0)) < 1e-12);
  CHECK(result.normalization == doctest::Approx(2.0).epsilon(1e-12));

  auto mix = superpose({{hg(0, 0), complexd(3, 0)}, {hg(1, 1), complexd(0, 4)}}, w);
  CHECK(std::abs(mix.field.terms[0].second - complexd(0.6, 0)) < 1e-12);
  CHECK(std::abs(mix.field.terms[1].second - complexd(0, 0.8)) < 1e-12);
  const GridSpec grid = default_grid(w);
  CHECK(std::abs(grid_inner_product(mix.field, mix.field, grid) - complexd(1, 0)) < 1e-9);

  CHECK_THROWS_AS(superpose({}, w), std::invalid_argument);
  CHECK_THROWS_AS(
      superpose({{hg(0, 0), complexd(1, 0)}, {hg(0, 0), complexd(-1, 0)}}, w),
      std::invalid_argument);
  CHECK_THROWS_AS(superpose({{hg(0, 0), complexd(1, 0)}}, 0.0), std::domain_error);
  CHECK_THROWS_AS(superpose({{hg(-1, 0), complexd(1, 0)}}, w), std::domain_error);
}

TEST_CASE("evaluate_mode agrees with mode_amplitude") {
  const double w = 7.0e-4;
  const std::vector<std::array<double, 2>> points = {
      {0.0, 0.0}, {0.3 * w, -0.2 * w}, {-1.1 * w, 0.7 * w}};
  for (const ModeId& mode : {hg(2, 1), lg(1, -1)}) {
    const auto values = evaluate_mode(mode, w, points);
    REQUIRE(values.size() == points.size());
    for (size_t k = 0; k < points.size(); ++k)
      CHECK(std::abs(values[k] - mode_amplitude(mode, w, points[k][0], points[k][1])) <
            1e-12 * std::abs(values[k]) + 1e-300);
  }
}

TEST_CASE("mode enumeration order") {
  const auto modes = hg_modes_up_to(2);
  REQUIRE(modes.size() == 6);
  CHECK(modes[0] == hg(0, 0));
  CHECK(modes[1] == hg(0, 1));
  CHECK(modes[2] == hg(1, 0));
  CHECK(modes[3] == hg(0, 2));
  CHECK(modes[4] == hg(1, 1));
  CHECK(modes[5] == hg(2, 0));
}

TEST_CASE("polynomial part times envelope equals the full amplitude") {
  const double w = 1.0e-3;
  const double x = 0.4 * w, y = -0.9 * w;
  for (const ModeId& mode : {hg(3, 2), lg(1, 2)}) {
    const complexd full = mode_amplitude(mode, w, x, y);
    const complexd poly = mode_polynomial_part(mode, w, x, y);
    const double envelope = std::exp(-(x * x + y * y) / (w * w));
    CHECK(std::abs(poly * envelope - full) < 1e-12 * std::abs(full));
  }
  const double hx = hg_polynomial_1d(2, w, x) * hg_polynomial_1d(3, w, y) *
                    std::exp(-(x * x + y * y) / (w * w));
  CHECK(std::abs(mode_amplitude(hg(2, 3), w, x, y) - complexd(hx, 0)) <
        1e-12 * std::abs(hx));
}
