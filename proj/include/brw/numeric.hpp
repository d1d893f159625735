#ifndef BRW_NUMERIC_HPP
#define BRW_NUMERIC_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace brw {

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : NumericError {
  using NumericError::NumericError;
};
struct OverflowSignal : NumericError {
  using NumericError::NumericError;
};
struct BracketError : NumericError {
  using NumericError::NumericError;
};
struct ConvergenceError : NumericError {
  using NumericError::NumericError;
};

// Double-double value: hi + lo with |lo| <= ulp(hi)/2. Only the operations the
// Airy series needs; products go through fma so the error term is exact.
struct dd {
  double hi = 0.0;
  double lo = 0.0;

  dd() = default;
  dd(double h) : hi(h), lo(0.0) {}
  dd(double h, double l) : hi(h), lo(l) {}

  static dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
  }
  static dd two_prod(double a, double b) {
    double p = a * b;
    double err = std::fma(a, b, -p);
    return {p, err};
  }

  dd operator+(const dd& o) const {
    dd s = two_sum(hi, o.hi);
    s.lo += lo + o.lo;
    double t = s.hi + s.lo;
    return {t, s.lo - (t - s.hi)};
  }
  dd operator-(const dd& o) const { return *this + dd(-o.hi, -o.lo); }
  dd operator*(const dd& o) const {
    dd p = two_prod(hi, o.hi);
    p.lo += hi * o.lo + lo * o.hi;
    double t = p.hi + p.lo;
    return {t, p.lo - (t - p.hi)};
  }
  dd operator*(double s) const { return *this * dd(s); }
  dd operator/(double s) const {
    double q1 = hi / s;
    dd r = *this - two_prod(q1, s);
    double q2 = (r.hi + r.lo) / s;
    double t = q1 + q2;
    return {t, q2 - (t - q1)};
  }
  double value() const { return hi + lo; }
};

// Bisection on a bracket with a verified sign change.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double xtol, int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw BracketError("bisect: no sign change over bracket");
  for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// One Newton step, kept only if it stays inside [lo, hi] and improves |f|.
inline double newton_polish(const std::function<double(double)>& f,
                            const std::function<double(double)>& df, double x,
                            double lo, double hi) {
  double fx = f(x);
  double d = df(x);
  if (d == 0.0 || !std::isfinite(d)) return x;
  double y = x - fx / d;
  if (y < lo || y > hi) return x;
  return std::abs(f(y)) < std::abs(fx) ? y : x;
}

// Composite midpoint rule over [a,b] with cells split at the given interior
// breakpoints; n is the target cell count for a unit-length interval.
double integrate_midpoint(const std::function<double(double)>& f, double a, double b,
                          int n, const std::vector<double>& breaks = {});

// Composite 5-point Gauss-Legendre, same splitting convention. Near machine
// precision for smooth integrands at modest n.
double integrate_gauss(const std::function<double(double)>& f, double a, double b,
                       int n, const std::vector<double>& breaks = {});

// Weighted isotonic regression (pool adjacent violators): the non-decreasing y
// minimizing sum w_i (y_i - x_i)^2.
void isotonic_fit(const Eigen::ArrayXd& x, const Eigen::ArrayXd& w, Eigen::ArrayXd& y);

// Not-a-knot cubic spline on a strictly increasing grid.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);

  double eval(double t) const;
  double deriv(double t) const;
  double deriv2(double t) const;

 private:
  int cell(double t) const;
  Eigen::ArrayXd x_, a_, b_, c_, d_;  // a + b dt + c dt^2 + d dt^3 per cell
};

}  // namespace brw

#endif
