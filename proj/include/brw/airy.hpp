#ifndef BRW_AIRY_HPP
#define BRW_AIRY_HPP

#include <cstdint>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "brw/numeric.hpp"

namespace brw {

/// Airy functions of first and second kind. Absolute error below 1e-10 for
/// |x| <= 12; relative accuracy holds far beyond that. bi throws
/// OverflowSignal once e^{(2/3)x^{3/2}} leaves the double range.
double ai(double x);
double bi(double x);
double ai_prime(double x);
double bi_prime(double x);

/// n-th zero of Ai (n >= 1), negative, listed decreasingly: alpha_1 > alpha_2 > ...
double airy_zero(int n);

struct AiryZeroTable {
  std::vector<double> zeros;  // alpha_1 > alpha_2 > ... (all negative)
  int count = 0;

  static AiryZeroTable build(int count);
};

/// Largest roots of the cross-Wronskian
///   W_h(l) = Ai(l) Bi(l + (2h)^{1/3}) - Bi(l) Ai(l + (2h)^{1/3}),
/// listed decreasingly: lambda_1^h > lambda_2^h > ...
double cross_wronskian(double h, double lambda);
double lambda_n(double h, int n);

struct CrossWronskianRoot {
  double h = 0.0;
  double lambda1 = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};
CrossWronskianRoot find_lambda1(double h);

/// Exponential rate of the weighted occupation of a Brownian motion confined
/// to [0,1]:  psi(h) = (h^{2/3}/2^{1/3}) lambda_1^h for h > 0, psi(0) = -pi^2/2,
/// and psi(h) = psi(-h) - h for h < 0. Cached per evaluator; safe for
/// concurrent readers, concurrent inserts of identical keys are last-write-wins.
class PsiEvaluator {
 public:
  explicit PsiEvaluator(double tolerance = 1e-9) : tolerance_(tolerance) {}

  double operator()(double h) const;
  double tolerance() const { return tolerance_; }
  std::size_t cache_size() const;

 private:
  double tolerance_;
  mutable std::mutex mu_;
  mutable std::unordered_map<int64_t, double> cache_;
};

/// Shared default evaluator.
double psi(double h);

/// Dirichlet eigenfunctions of (1/2) d^2/dx^2 - h x.
/// Half line: psi_n(x) = Ai(x + alpha_n) normalized to unit L2([0,inf)) norm.
double eigenfunction_halfline(int n, double x);

/// Interval [0,1]: normalized cross-Wronskian combination, unit L2([0,1]) norm.
/// Construction is the expensive part; keep the object when sweeping x.
class IntervalEigenfunction {
 public:
  IntervalEigenfunction(double h, int n);
  double operator()(double x) const;
  double lambda() const { return lambda_; }

 private:
  double h_, c_, lambda_, ai_l_, bi_l_, norm_;
};
double eigenfunction_interval(double h, int n, double x);

}  // namespace brw

#endif
