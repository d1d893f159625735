#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "brw/airy.hpp"
#include "doctest.h"

using namespace brw;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Blind bisection on a bracket; independent of the library's root machinery.
double bisect_oracle(double (*f)(double), double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    double m = 0.5 * (lo + hi);
    ((f(m) > 0) == (f(lo) > 0) ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

// Simpson quadrature oracle on [a,b].
template <class F>
double simpson(F f, double a, double b, int n) {
  double h = (b - a) / n, s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("ai/bi pointwise against high-precision references") {
  struct Ref {
    double x, ai, bi, aip, bip;
  };
  const Ref refs[] = {
      {0.0, 0.35502805388781724, 0.61492662744600074, -0.25881940379280680, 0.44828835735382636},
      {0.5, 0.23169360648083349, 0.85427704310315549, -0.22491053266468389, 0.5445725641405923},
      {-2.5, -0.11232506769296609, -0.43242247184070529, 0.67885273426479436, -0.22042015487462959},
      {5.0, 0.00010834442813607442, 657.79204417117118, -0.00024741389086846248, 1435.8190802179825},
      {-5.0, 0.35076100902411432, -0.13836913490160058, 0.32719281855444314, 0.77841177300189925},
      {7.49, 1.9711085401960596e-7, 295142.38008602846, -5.4584208741206276e-7, 797565.17790862721},
      {-7.49, 0.3248428084853795, -0.10364440631128851, 0.29457598943393021, 0.88590150413720149},
      {7.51, 1.8648416178998959e-7, 311544.28793136857, -5.1708000562892433e-7, 843055.85266608269},
      {-7.51, 0.3184673081028033, -0.12119822003658698, 0.34283610130468359, 0.86903350485206003},
      {12.0, 1.3931846888753608e-13, 329807225829.07418, -4.8547365549853085e-13, 1135507502443.3707},
      {-12.0, -0.066555175054373129, -0.29571991207807306, 1.0231104533679707, -0.23673219783112332},
  };
  for (const auto& r : refs) {
    CAPTURE(r.x);
    CHECK(ai(r.x) == doctest::Approx(r.ai).epsilon(1e-12));
    CHECK(bi(r.x) == doctest::Approx(r.bi).epsilon(1e-12));
    CHECK(ai_prime(r.x) == doctest::Approx(r.aip).epsilon(1e-12));
    CHECK(bi_prime(r.x) == doctest::Approx(r.bip).epsilon(1e-12));
    CHECK(std::abs(ai(r.x) - r.ai) < 1e-10);
    CHECK(std::abs(bi(r.x) - r.bi) < 1e-10 * std::max(1.0, std::abs(r.bi)));
  }
  CHECK(ai(20.0) == doctest::Approx(1.6916728686705403e-27).epsilon(1e-12));
  CHECK(bi(20.0) == doctest::Approx(2.1037650496511038e25).epsilon(1e-12));
}

TEST_CASE("series and asymptotic branches agree at the seam") {
  // derivative-corrected jump across the branch switch; the secant spans the
  // seam so any mismatch between the two branches shows up directly
  const double d = 1e-7;
  for (double s : {7.5, -7.5}) {
    CAPTURE(s);
    double jump_ai = std::abs(ai(s + d) - ai(s - d) - 2 * d * ai_prime(s));
    double jump_bi = std::abs(bi(s + d) - bi(s - d) - 2 * d * bi_prime(s));
    CHECK(jump_ai < 1e-11 * std::max(1.0, std::abs(ai(s))));
    CHECK(jump_bi < 1e-11 * std::max(1.0, std::abs(bi(s))));
  }
}

TEST_CASE("bi overflow signal") {
  CHECK_THROWS_AS(bi(1.0e4), OverflowSignal);
  CHECK_NOTHROW(bi(100.0));
}

TEST_CASE("airy zeros") {
  CHECK(std::abs(airy_zero(1) - (-2.3381)) < 5e-4);
  CHECK(airy_zero(1) == doctest::Approx(-2.33810741045976704).epsilon(1e-12));

  // independent bisection oracle for the second zero
  double a2 = bisect_oracle(&ai, -4.5, -3.6);
  CHECK(std::abs(airy_zero(2) - a2) < 1e-10);
  CHECK(airy_zero(2) == doctest::Approx(-4.0879494441309706).epsilon(1e-12));

  auto table = AiryZeroTable::build(50);
  REQUIRE(table.count == 50);
  for (int n = 0; n < 50; ++n) {
    CHECK(table.zeros[n] < 0.0);
    if (n > 0) CHECK(table.zeros[n] < table.zeros[n - 1]);
    CHECK(std::abs(ai(table.zeros[n])) <= 1e-8);
  }
  // classical asymptotic alpha_n ~ -(3 pi n / 2)^(2/3)
  double ratio = std::abs(table.zeros[49]) / std::pow(50.0, 2.0 / 3.0);
  CHECK(std::abs(ratio / std::pow(1.5 * kPi, 2.0 / 3.0) - 1.0) < 0.05);
}

TEST_CASE("cross-Wronskian roots") {
  CHECK(lambda_n(1.0, 1) == doctest::Approx(-6.84465699267455916).epsilon(1e-10));
  CHECK(lambda_n(1.0, 2) == doctest::Approx(-25.5006294964012081).epsilon(1e-10));
  CHECK(lambda_n(1.0, 3) == doctest::Approx(-56.5876022450993015).epsilon(1e-10));
  CHECK_FALSE(lambda_n(1.0, 1) < lambda_n(1.0, 2));  // ordering lambda_1 > lambda_2

  for (double h : {0.5, 1.0, 2.0, 5.0}) {
    CAPTURE(h);
    double l1 = lambda_n(h, 1);
    CHECK(l1 < 0.0);
    CHECK(std::abs(cross_wronskian(h, l1)) <= 1e-9);
    auto root = find_lambda1(h);
    CHECK(root.lambda1 == doctest::Approx(l1));
    CHECK(root.bracket_lo < root.lambda1);
    CHECK(root.lambda1 < root.bracket_hi);
    CHECK(cross_wronskian(h, root.bracket_lo) * cross_wronskian(h, root.bracket_hi) < 0.0);
  }

  // Sturm-Liouville eigenvalues (h^{2/3}/2^{1/3}) lambda_n^h approach -pi^2 n^2 / 2.
  for (double h : {0.5, 1.0, 3.0}) {
    CAPTURE(h);
    double mu40 = std::cbrt(h * h) / std::cbrt(2.0) * lambda_n(h, 40);
    CHECK(std::abs(mu40 / 1600.0 / (-kPi * kPi / 2.0) - 1.0) < 0.02);
  }
  // at h = sqrt(2) the scaling factor is 1, so the raw roots obey the same law
  double l40 = lambda_n(std::sqrt(2.0), 40);
  CHECK(std::abs(l40 / 1600.0 / (-kPi * kPi / 2.0) - 1.0) < 0.02);
}

TEST_CASE("psi values, reflection, convexity") {
  CHECK(psi(0.0) == doctest::Approx(-kPi * kPi / 2.0).epsilon(1e-15));
  CHECK(psi(0.5) == doctest::Approx(-5.1842535809181686).epsilon(1e-10));
  CHECK(psi(1.0) == doctest::Approx(-5.4326078552665439).epsilon(1e-10));
  CHECK(psi(2.0) == doctest::Approx(-5.9260269495079899).epsilon(1e-10));
  CHECK(psi(5.0) == doctest::Approx(-7.3800496353374499).epsilon(1e-10));

  // h -> 0+ branch stays accurate where lambda_1 ~ h^{-2/3} makes it delicate
  CHECK(std::abs(psi(1e-4) - (-4.93485220052273408)) < 1e-5);
  CHECK(std::abs(psi(1e-4) - psi(0.0)) < 1e-4);

  for (double h : {0.1, 1.0, 10.0, 100.0}) {
    CAPTURE(h);
    CHECK(std::abs(psi(h) - psi(-h) + h) <= 1e-9);
  }

  // discrete midpoint convexity on a grid spanning both signs
  std::vector<double> grid;
  for (double h = -6.0; h <= 6.0; h += 0.75) grid.push_back(h);
  for (size_t i = 0; i + 2 < grid.size(); ++i) {
    double a = grid[i], b = grid[i + 2];
    CHECK(psi(0.5 * (a + b)) <= 0.5 * (psi(a) + psi(b)) + 1e-9);
  }

  // asymptotic regime
  double h = 1e4;
  double asym = airy_zero(1) / std::cbrt(2.0) * std::cbrt(h * h);
  CHECK(std::abs(psi(h) / asym - 1.0) < 0.10);
}

TEST_CASE("psi evaluator cache tolerates concurrent identical inserts") {
  PsiEvaluator eval;
  std::atomic<bool> go{false};
  std::vector<std::thread> workers;
  std::vector<double> results(8);
  for (int i = 0; i < 8; ++i)
    workers.emplace_back([&, i] {
      while (!go.load()) {
      }
      results[i] = eval(1.5);
    });
  go.store(true);
  for (auto& w : workers) w.join();
  for (int i = 1; i < 8; ++i) CHECK(results[i] == results[0]);
  CHECK(eval.cache_size() >= 1);
  CHECK(eval(1.5) == results[0]);
}

TEST_CASE("half-line eigenfunctions") {
  CHECK(std::abs(eigenfunction_halfline(1, 0.0)) < 1e-10);
  auto p1 = [](double x) { return eigenfunction_halfline(1, x); };
  auto p2 = [](double x) { return eigenfunction_halfline(2, x); };
  double n1 = simpson([&](double x) { double v = p1(x); return v * v; }, 0.0, 25.0, 4000);
  double cross = simpson([&](double x) { return p1(x) * p2(x); }, 0.0, 25.0, 4000);
  CHECK(std::abs(n1 - 1.0) < 1e-6);
  CHECK(std::abs(cross) < 1e-6);
}

TEST_CASE("interval eigenfunctions") {
  IntervalEigenfunction phi1(1.0, 1), phi2(1.0, 2);
  CHECK(std::abs(phi1(0.0)) < 1e-9);
  CHECK(std::abs(phi1(1.0)) < 1e-9);
  for (int i = 1; i < 1000; ++i) CHECK(phi1(i / 1000.0) > 0.0);

  double n1 = simpson([&](double x) { return phi1(x) * phi1(x); }, 0.0, 1.0, 2000);
  double cross = simpson([&](double x) { return phi1(x) * phi2(x); }, 0.0, 1.0, 2000);
  CHECK(std::abs(n1 - 1.0) < 1e-6);
  CHECK(std::abs(cross) < 1e-6);

  // eigen-residual (1/2) phi'' - h x phi = mu phi with mu = (h^{2/3}/2^{1/3}) lambda_n
  double h = 1.0;
  double mu = std::cbrt(h * h) / std::cbrt(2.0) * phi1.lambda();
  double worst = 0.0;
  double d = 1e-3;
  for (int i = 5; i <= 995; ++i) {
    double x = i / 1000.0;
    // 5-point central second difference
    double dd2 = (-phi1(x - 2 * d) + 16 * phi1(x - d) - 30 * phi1(x) + 16 * phi1(x + d) -
                  phi1(x + 2 * d)) / (12 * d * d);
    worst = std::max(worst, std::abs(0.5 * dd2 - h * x * phi1(x) - mu * phi1(x)));
  }
  CHECK(worst <= 1e-6);
}
