#include <cmath>

#include "brw/numeric.hpp"
#include "doctest.h"

using namespace brw;

TEST_CASE("double-double keeps cancellation under control") {
  dd a(1.0);
  dd b = a + dd(1e-17);
  CHECK(b.value() == 1.0);
  CHECK((b - a).value() == doctest::Approx(1e-17).epsilon(1e-12));
  dd p = dd::two_prod(1e8 + 1, 1e8 - 1);
  CHECK(p.hi == 1e16);
  CHECK(p.lo == -1.0);
}

TEST_CASE("bisect and newton_polish") {
  auto f = [](double x) { return x * x - 2.0; };
  double r = bisect(f, 0.0, 2.0, 1e-14);
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  r = newton_polish(f, [](double x) { return 2.0 * x; }, r, 0.0, 2.0);
  CHECK(std::abs(f(r)) < 1e-14);
  CHECK_THROWS_AS(bisect(f, 2.0, 3.0, 1e-12), BracketError);
}

TEST_CASE("quadrature with breakpoint splitting") {
  // |t - 1/3| integrates exactly once the kink is a cell edge
  auto f = [](double t) { return std::abs(t - 1.0 / 3.0); };
  double exact = (1.0 / 9.0 + 4.0 / 9.0) / 2.0;
  CHECK(integrate_gauss(f, 0.0, 1.0, 16, {1.0 / 3.0}) == doctest::Approx(exact).epsilon(1e-14));
  CHECK(std::abs(integrate_midpoint(f, 0.0, 1.0, 4096, {1.0 / 3.0}) - exact) < 1e-12);
  // smooth integrand, midpoint second order
  auto g = [](double t) { return std::sin(3.0 * t); };
  double ref = (1.0 - std::cos(3.0)) / 3.0;
  CHECK(std::abs(integrate_midpoint(g, 0.0, 1.0, 4096) - ref) < 3e-8);
  CHECK(std::abs(integrate_gauss(g, 0.0, 1.0, 64) - ref) < 1e-14);
}

TEST_CASE("isotonic regression (PAVA)") {
  Eigen::ArrayXd x(6), w = Eigen::ArrayXd::Ones(6), y;
  x << 1.0, 3.0, 2.0, 4.0, 6.0, 5.0;
  isotonic_fit(x, w, y);
  for (int i = 0; i + 1 < 6; ++i) CHECK(y[i] <= y[i + 1]);
  CHECK(y[1] == doctest::Approx(2.5));
  CHECK(y[2] == doctest::Approx(2.5));
  CHECK(y[4] == doctest::Approx(5.5));
  // already monotone input is a fixed point
  Eigen::ArrayXd z(4), yz;
  z << 0.0, 0.5, 0.5, 2.0;
  isotonic_fit(z, Eigen::ArrayXd::Ones(4), yz);
  for (int i = 0; i < 4; ++i) CHECK(yz[i] == z[i]);
}

TEST_CASE("not-a-knot spline reproduces cubics") {
  Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(11, 0.0, 1.0);
  Eigen::ArrayXd y = x.cube() - 2.0 * x.square() + 0.5 * x + 3.0;
  CubicSpline s(x, y);
  for (double t : {0.03, 0.21, 0.5, 0.77, 0.99}) {
    CHECK(s.eval(t) == doctest::Approx(t * t * t - 2 * t * t + 0.5 * t + 3).epsilon(1e-13));
    CHECK(s.deriv(t) == doctest::Approx(3 * t * t - 4 * t + 0.5).epsilon(1e-11));
    CHECK(s.deriv2(t) == doctest::Approx(6 * t - 4).epsilon(1e-10));
  }
}
