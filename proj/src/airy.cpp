#include "brw/airy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace brw {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Ai(0) = 3^{-2/3}/Gamma(2/3) and -Ai'(0) = 3^{-1/3}/Gamma(1/3), double-double
// so the huge f,g cancellation in Ai = c1 f - c2 g stays clean.
const dd kAi0{0.3550280538878172, 2.05233632436212e-17};
const dd kmAip0{0.2588194037928068, -2.522243111610832e-17};
const dd kSqrt3dd{1.7320508075688772, 1.0035084221806902e-16};
constexpr double kSeam = 7.5;  // series/asymptotic switch, tuned so both sides agree to ~1e-12

// Maclaurin basis f, g with f'' = x f, f(0)=1, f'(0)=0 and g(0)=0, g'(0)=1.
// Summed in double-double: the terms reach e^{(2/3)|x|^{3/2}} while the value
// can be O(1), so plain doubles lose up to 12 digits at the seam.
struct SeriesValues {
  dd f, g, fp, gp;
};

SeriesValues maclaurin_fg(double x) {
  const dd x3 = dd::two_prod(x, x) * dd(x);
  const dd x2h = dd::two_prod(x, x) * dd(0.5);
  dd f(1.0), g(x), fp = x2h, gp(1.0);
  dd tf(1.0), tg(x), tfp = x2h, tgp(1.0);
  for (int k = 0; k < 400; ++k) {
    double k3 = 3.0 * k;
    tf = tf * x3 / ((k3 + 2.0) * (k3 + 3.0));
    tg = tg * x3 / ((k3 + 3.0) * (k3 + 4.0));
    tfp = (k == 0) ? x2h * x3 / 15.0 : tfp * x3 / ((k3 + 3.0) * (k3 + 5.0));
    tgp = tgp * x3 / ((k3 + 1.0) * (k3 + 3.0));
    f = f + tf;
    g = g + tg;
    fp = fp + tfp;
    gp = gp + tgp;
    double scale = std::abs(x3.hi) < 1.0 ? 1.0 : std::abs(x3.hi);
    if (std::abs(tf.value()) < 1e-24 && std::abs(tg.value()) < 1e-24 &&
        std::abs(tfp.value()) < 1e-24 * scale && std::abs(tgp.value()) < 1e-24)
      break;
  }
  return {f, g, fp, gp};
}

// Poincare coefficients u_k (values) and v_k (derivatives), DLMF 9.7.
struct AsymCoeffs {
  std::array<double, 26> u, v;
  AsymCoeffs() {
    u[0] = 1.0;
    v[0] = 1.0;
    for (int k = 0; k < 25; ++k) {
      double kk = k;
      u[k + 1] = u[k] * (6 * kk + 1) * (6 * kk + 3) * (6 * kk + 5) /
                 (216.0 * (kk + 1) * (2 * kk + 1));
      v[k + 1] = u[k + 1] * (6 * (kk + 1) + 1) / (1.0 - 6 * (kk + 1));
    }
  }
};
const AsymCoeffs kCoef;

// Sum sum_k s^k u_k / zeta^k truncated at the smallest term.
double asym_sum(const std::array<double, 26>& c, double zeta, double sign) {
  double sum = c[0], term = 1.0;
  double best = std::numeric_limits<double>::max();
  for (int k = 1; k < 26; ++k) {
    term *= sign / zeta;
    double t = c[k] * term;
    if (std::abs(t) >= best) break;
    best = std::abs(t);
    sum += t;
  }
  return sum;
}

// Oscillatory sums: P = sum (-1)^k c_{2k} zeta^{-2k}, Q = sum (-1)^k c_{2k+1} zeta^{-2k-1}.
void asym_sum_osc(const std::array<double, 26>& c, double zeta, double& P, double& Q) {
  P = c[0];
  Q = c[1] / zeta;
  double z2 = zeta * zeta;
  double tp = 1.0, tq = 1.0 / zeta;
  double bestp = std::numeric_limits<double>::max(), bestq = bestp;
  for (int k = 1; 2 * k + 1 < 26; ++k) {
    tp *= -1.0 / z2;
    tq *= -1.0 / z2;
    double ap = c[2 * k] * tp, aq = c[2 * k + 1] * tq;
    if (std::abs(ap) < bestp) {
      bestp = std::abs(ap);
      P += ap;
    }
    if (std::abs(aq) < bestq) {
      bestq = std::abs(aq);
      Q += aq;
    }
  }
}

struct AiryPair {
  double value, deriv;
};

AiryPair ai_asym_pos(double x) {
  double sx = std::sqrt(x);
  double zeta = 2.0 / 3.0 * x * sx;
  double pre = std::exp(-zeta) / (2.0 * std::sqrt(kPi) * std::sqrt(sx));
  double val = pre * asym_sum(kCoef.u, zeta, -1.0);
  double der = -std::sqrt(sx) * std::exp(-zeta) / (2.0 * std::sqrt(kPi)) *
               asym_sum(kCoef.v, zeta, -1.0);
  return {val, der};
}

AiryPair bi_asym_pos(double x) {
  double sx = std::sqrt(x);
  double zeta = 2.0 / 3.0 * x * sx;
  if (zeta > 705.0) throw OverflowSignal("bi: argument exceeds floating range");
  double e = std::exp(zeta);
  double val = e / (std::sqrt(kPi) * std::sqrt(sx)) * asym_sum(kCoef.u, zeta, 1.0);
  double der = std::sqrt(sx) * e / std::sqrt(kPi) * asym_sum(kCoef.v, zeta, 1.0);
  return {val, der};
}

void airy_asym_neg(double x, AiryPair& A, AiryPair& B) {
  double z = -x;
  double sz = std::sqrt(z);
  double zeta = 2.0 / 3.0 * z * sz;
  double Pu, Qu, Pv, Qv;
  asym_sum_osc(kCoef.u, zeta, Pu, Qu);
  asym_sum_osc(kCoef.v, zeta, Pv, Qv);
  double c = std::cos(zeta - 0.25 * kPi), s = std::sin(zeta - 0.25 * kPi);
  double pre = 1.0 / (std::sqrt(kPi) * std::sqrt(sz));
  double dpre = std::sqrt(sz) / std::sqrt(kPi);
  A.value = pre * (c * Pu + s * Qu);
  B.value = pre * (-s * Pu + c * Qu);
  A.deriv = dpre * (s * Pv - c * Qv);
  B.deriv = dpre * (c * Pv + s * Qv);
}

}  // namespace

double ai(double x) {
  if (!std::isfinite(x)) throw DomainError("ai: non-finite argument");
  if (std::abs(x) <= kSeam) {
    auto s = maclaurin_fg(x);
    return (kAi0 * s.f - kmAip0 * s.g).value();
  }
  if (x > 0) return ai_asym_pos(x).value;
  AiryPair A, B;
  airy_asym_neg(x, A, B);
  return A.value;
}

double bi(double x) {
  if (!std::isfinite(x)) throw DomainError("bi: non-finite argument");
  if (std::abs(x) <= kSeam) {
    auto s = maclaurin_fg(x);
    return ((kAi0 * s.f + kmAip0 * s.g) * kSqrt3dd).value();
  }
  if (x > 0) return bi_asym_pos(x).value;
  AiryPair A, B;
  airy_asym_neg(x, A, B);
  return B.value;
}

double ai_prime(double x) {
  if (!std::isfinite(x)) throw DomainError("ai_prime: non-finite argument");
  if (std::abs(x) <= kSeam) {
    auto s = maclaurin_fg(x);
    return (kAi0 * s.fp - kmAip0 * s.gp).value();
  }
  if (x > 0) return ai_asym_pos(x).deriv;
  AiryPair A, B;
  airy_asym_neg(x, A, B);
  return A.deriv;
}

double bi_prime(double x) {
  if (!std::isfinite(x)) throw DomainError("bi_prime: non-finite argument");
  if (std::abs(x) <= kSeam) {
    auto s = maclaurin_fg(x);
    return ((kAi0 * s.fp + kmAip0 * s.gp) * kSqrt3dd).value();
  }
  if (x > 0) return bi_asym_pos(x).deriv;
  AiryPair A, B;
  airy_asym_neg(x, A, B);
  return B.deriv;
}

double airy_zero(int n) {
  if (n < 1) throw DomainError("airy_zero: n must be >= 1");
  // 10.4.105-style expansion of the inverse phase at t = 3 pi (4n-1)/8.
  double t = 3.0 * kPi * (4.0 * n - 1.0) / 8.0;
  double t2 = 1.0 / (t * t);
  double guess = -std::cbrt(t * t) *
                 (1.0 + t2 * (5.0 / 48.0 + t2 * (-5.0 / 36.0 + t2 * (77125.0 / 82944.0))));
  double step = 0.5;
  double lo = guess - step, hi = std::min(guess + step, -1e-8);
  while ((ai(lo) > 0) == (ai(hi) > 0)) {
    lo -= step;
    hi = std::min(hi + step, -1e-8);
    if (hi - lo > 64.0) throw BracketError("airy_zero: bracket scan failed");
  }
  double root = bisect([](double x) { return ai(x); }, lo, hi, 1e-13);
  root = newton_polish([](double x) { return ai(x); },
                       [](double x) { return ai_prime(x); }, root, lo, hi);
  return root;
}

AiryZeroTable AiryZeroTable::build(int count) {
  AiryZeroTable t;
  t.count = count;
  t.zeros.reserve(count);
  for (int n = 1; n <= count; ++n) t.zeros.push_back(airy_zero(n));
  return t;
}

double cross_wronskian(double h, double lambda) {
  double c = std::cbrt(2.0 * h);
  return ai(lambda) * bi(lambda + c) - bi(lambda) * ai(lambda + c);
}

namespace {

double cross_wronskian_dl(double h, double lambda) {
  double c = std::cbrt(2.0 * h);
  return ai_prime(lambda) * bi(lambda + c) + ai(lambda) * bi_prime(lambda + c) -
         bi_prime(lambda) * ai(lambda + c) - bi(lambda) * ai_prime(lambda + c);
}

// Local root spacing of W_h near lambda: pi over the oscillation phase rate.
double local_spacing(double h, double lambda) {
  double c = std::cbrt(2.0 * h);
  double z = std::max(-lambda, 1.0);
  double rate = std::sqrt(z);
  if (z - c > 1.0) rate -= std::sqrt(z - c);
  return kPi / rate;
}

struct ScannedRoot {
  double root, lo, hi;
};

// Scan downward from 0 for the n-th sign change of W_h; the step tracks the
// local spacing so no root is skipped. Throws BracketError after max_steps.
ScannedRoot scan_root(double h, int n, int max_steps = 200000) {
  if (h <= 0) throw DomainError("lambda_n: h must be positive");
  if (n < 1) throw DomainError("lambda_n: n must be >= 1");
  double lam = 0.0;
  double prev = cross_wronskian(h, lam);
  int found = 0;
  for (int it = 0; it < max_steps; ++it) {
    double step = 0.4 * std::min(local_spacing(h, lam), local_spacing(h, lam - 1.0));
    double nxt = lam - step;
    double cur = cross_wronskian(h, nxt);
    if ((cur > 0) != (prev > 0)) {
      ++found;
      if (found == n) return {0.0, nxt, lam};
    }
    lam = nxt;
    prev = cur;
  }
  throw BracketError("lambda_n: scan window exhausted");
}

}  // namespace

double lambda_n(double h, int n) {
  ScannedRoot s = scan_root(h, n);
  double root = bisect([&](double l) { return cross_wronskian(h, l); }, s.lo, s.hi,
                       1e-13 * std::max(1.0, -s.lo));
  root = newton_polish([&](double l) { return cross_wronskian(h, l); },
                       [&](double l) { return cross_wronskian_dl(h, l); }, root, s.lo, s.hi);
  return root;
}

CrossWronskianRoot find_lambda1(double h) {
  ScannedRoot s = scan_root(h, 1);
  CrossWronskianRoot r;
  r.h = h;
  r.bracket_lo = s.lo;
  r.bracket_hi = s.hi;
  r.lambda1 = bisect([&](double l) { return cross_wronskian(h, l); }, s.lo, s.hi,
                     1e-13 * std::max(1.0, -s.lo));
  r.lambda1 = newton_polish([&](double l) { return cross_wronskian(h, l); },
                            [&](double l) { return cross_wronskian_dl(h, l); },
                            r.lambda1, s.lo, s.hi);
  return r;
}

double PsiEvaluator::operator()(double h) const {
  if (!std::isfinite(h)) throw DomainError("psi: non-finite argument");
  if (h == 0.0) return -kPi * kPi / 2.0;
  if (h < 0.0) return (*this)(-h) - h;

  int64_t key = 0;
  bool cacheable = std::abs(h) < 9e8;  // keys quantized to 1e-10
  if (cacheable) {
    key = llround(h * 1e10);
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  double value = std::cbrt(h * h) / std::cbrt(2.0) * find_lambda1(h).lambda1;
  if (cacheable) {
    std::lock_guard<std::mutex> lock(mu_);
    cache_[key] = value;
  }
  return value;
}

std::size_t PsiEvaluator::cache_size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.size();
}

double psi(double h) {
  static PsiEvaluator shared;
  return shared(h);
}

double eigenfunction_halfline(int n, double x) {
  if (x < 0) throw DomainError("eigenfunction_halfline: x must be >= 0");
  double alpha = airy_zero(n);
  // int_a^inf Ai^2 = Ai'(a)^2 - a Ai(a)^2; at a zero only the first term survives.
  double norm = std::abs(ai_prime(alpha));
  return ai(x + alpha) / norm;
}

IntervalEigenfunction::IntervalEigenfunction(double h, int n) : h_(h) {
  c_ = std::cbrt(2.0 * h);
  lambda_ = lambda_n(h, n);
  ai_l_ = ai(lambda_);
  bi_l_ = bi(lambda_);
  auto raw = [&](double x) {
    double w = ai_l_ * bi(lambda_ + c_ * x) - ai(lambda_ + c_ * x) * bi_l_;
    return w * w;
  };
  norm_ = std::sqrt(integrate_gauss(raw, 0.0, 1.0, 256));
}

double IntervalEigenfunction::operator()(double x) const {
  if (x < 0.0 || x > 1.0) throw DomainError("eigenfunction_interval: x outside [0,1]");
  return (ai_l_ * bi(lambda_ + c_ * x) - ai(lambda_ + c_ * x) * bi_l_) / norm_;
}

double eigenfunction_interval(double h, int n, double x) {
  return IntervalEigenfunction(h, n)(x);
}

}  // namespace brw
