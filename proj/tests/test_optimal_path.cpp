#include <cmath>

#include "brw/functional.hpp"
#include "brw/optimal_path.hpp"
#include "brw/rng.hpp"
#include "doctest.h"

using namespace brw;

namespace {

constexpr double kLog2 = 0.69314718055994530942;
const double kSqrt2Log2 = std::sqrt(2.0 * kLog2);

EnvironmentModel gaussian_env(double (*sigma)(double), double (*dsigma)(double) = nullptr,
                              std::vector<double> breaks = {}) {
  return EnvironmentModel::gaussian_binary(
      ScalarField::function(sigma, dsigma, std::move(breaks)));
}

double sigma_dec(double t) { return 2.0 - t; }
double sigma_inc(double t) { return 1.0 + t; }
double sigma_vee(double t) { return 1.0 + std::abs(t - 0.5); }

}  // namespace

TEST_CASE("non-decreasing natural parameter: the optimal profile is the natural one") {
  auto env = gaussian_env(&sigma_dec);
  auto p = solve_special_case(env, 1024, SpecialCase::nondecreasing);
  // a = v and theta = theta_bar pointwise
  CHECK((p.a - p.v).abs().maxCoeff() < 1e-10);
  CHECK((p.theta - p.theta_bar).abs().maxCoeff() < 1e-10);
  // K*(a)_t = 0 for all t
  CHECK(p.energy.abs().maxCoeff() < 1e-10);
  // v* = sqrt(2 log 2) * int (2-t) dt = 1.5 sqrt(2 log 2)
  CHECK(p.v_star == doctest::Approx(1.5 * kSqrt2Log2).epsilon(1e-8));
  CHECK(p.kkt.pass(1e-6));
  CHECK(p.contact_set.measure() == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("non-increasing natural parameter: constant optimal parameter") {
  auto env = gaussian_env(&sigma_inc);
  auto p = solve_special_case(env, 1024, SpecialCase::nonincreasing);
  CHECK((p.theta - p.theta[0]).abs().maxCoeff() < 1e-14);
  // frozen: theta_c = sqrt(2 log 2 / int (1+t)^2) and v* = theta_c * 7/3
  CHECK(p.theta[0] == doctest::Approx(0.770795793168117523).epsilon(1e-10));
  CHECK(p.v_star == doctest::Approx(1.79852351739227422).epsilon(1e-8));
  CHECK(std::abs(p.energy[p.energy.size() - 1]) < 1e-7);
  CHECK(p.kkt.pass(1e-6));
  // slack almost everywhere: the contact set carries no measure
  CHECK(p.contact_set.measure() < 1e-2);
  CHECK(p.l_star == 0.0);
}

TEST_CASE("single-switch natural parameter: follow then freeze") {
  auto env = gaussian_env(&sigma_vee, nullptr, {0.5});
  auto p = solve_special_case(env, 2048, SpecialCase::mixed);
  CHECK(p.method == "special:follow-then-constant");
  REQUIRE(p.segment_breaks.size() == 1);
  // frozen from the defining equation int_{t*}^1 sigma^2 = (1-t*) sigma_{t*}^2
  CHECK(p.segment_breaks[0] == doctest::Approx(0.284595230319820029).epsilon(1e-8));
  CHECK(p.v_star == doctest::Approx(1.47871159296120573).epsilon(1e-8));
  CHECK(p.l_star == doctest::Approx(-0.553601430956729568).epsilon(1e-7));
  CHECK(p.kkt.pass(1e-6));
  // theta follows theta_bar up to the switch, stays constant after
  double u = p.segment_breaks[0];
  double tail = p.theta[p.theta.size() - 1];
  CHECK(tail == doctest::Approx(0.968739017558156228).epsilon(1e-8));
  for (int i = 0; i < p.t.size(); ++i) {
    if (p.t[i] <= u)
      CHECK(std::abs(p.theta[i] - p.theta_bar[i]) < 1e-9);
    else
      CHECK(std::abs(p.theta[i] - tail) < 1e-12);
  }
}

TEST_CASE("generic solver agrees with the closed forms on all three regimes") {
  struct Case {
    double (*sigma)(double);
    SpecialCase which;
    std::vector<double> breaks;
  };
  std::vector<Case> cases = {{&sigma_dec, SpecialCase::nondecreasing, {}},
                             {&sigma_inc, SpecialCase::nonincreasing, {}},
                             {&sigma_vee, SpecialCase::mixed, {0.5}}};
  for (auto& c : cases) {
    auto env = EnvironmentModel::gaussian_binary(
        ScalarField::function(c.sigma, nullptr, c.breaks));
    auto special = solve_special_case(env, 1024, c.which);
    SolveOptions opts;
    opts.grid = 1024;
    auto generic = solve_optimal_profile(env, opts);
    CHECK(std::abs(generic.v_star - special.v_star) <= 1e-4);
    CHECK((generic.theta - special.theta).abs().maxCoeff() <= 1e-3);
    CHECK(generic.kkt.pass(1e-6));
    CHECK(special.kkt.pass(1e-6));
  }
}

TEST_CASE("homogeneous environment: constant parameter, zero correction") {
  auto env = gaussian_env(+[](double) { return 1.0; });
  auto p = solve_optimal_profile(env);
  CHECK((p.theta - kSqrt2Log2).abs().maxCoeff() < 1e-8);
  CHECK(p.v_star == doctest::Approx(kSqrt2Log2).epsilon(1e-10));
  CHECK(p.l_star == 0.0);
  CHECK(p.kkt.slackness == 0.0);  // d(theta^{-1}) identically zero
}

TEST_CASE("correction l* closed form for decreasing sigma") {
  auto env = gaussian_env(&sigma_dec, +[](double) { return -1.0; });
  auto p = solve_special_case(env, 2048, SpecialCase::nondecreasing);
  // remark closed form: (alpha1 / (2^{1/3} (2log2)^{1/6})) int (-sigma')^{2/3} sigma^{1/3}
  double remark = takacs_rate_constant() / std::pow(2.0 * kLog2, 1.0 / 6.0) *
                  integrate_gauss([](double s) { return std::cbrt(2.0 - s); }, 0.0, 1.0, 256);
  CHECK(std::abs(p.l_star - remark) <= 1e-6);
  CHECK(p.l_star == doctest::Approx(-2.00326445002944071).epsilon(1e-9));
  // the public grid-level quadrature agrees at its own tolerance
  CHECK(std::abs(correction_l_star(env, p) - remark) <= 1e-6);
}

TEST_CASE("check_optimality flags perturbations") {
  auto env = gaussian_env(&sigma_dec);
  auto p = solve_special_case(env, 1024, SpecialCase::nondecreasing);
  CHECK(check_optimality(env, p).pass(1e-6));
  auto bumped = p;
  for (int i = 0; i < bumped.t.size(); ++i)
    if (bumped.t[i] >= 0.4 && bumped.t[i] <= 0.6) bumped.theta[i] += 0.01;
  auto r = check_optimality(env, bumped);
  CHECK((r.monotonicity > 1e-3 || r.slackness > 1e-3));
}

TEST_CASE("optimality dominance over random feasible profiles") {
  auto env = gaussian_env(&sigma_vee, nullptr, {0.5});
  auto p = solve_special_case(env, 1024, SpecialCase::mixed);
  Philox rng(3, 0);
  for (int rep = 0; rep < 20; ++rep) {
    double d0 = rng.uniform(), d1 = rng.uniform(), d2 = 2.0 * rng.uniform();
    auto b = ScalarField::function([&, d0, d1, d2](double t) {
      return env.natural_speed(t).v - d0 * 0.5 * (1.0 + std::sin(d2 + 6.0 * d1 * t));
    });
    // feasibility re-check: K*(b)_t <= 0 on a grid
    bool feasible = true;
    for (int i = 0; i <= 64; ++i)
      if (energy_K(env, b, i / 64.0, 64) > 1e-12) feasible = false;
    REQUIRE(feasible);
    double ib = integrate_gauss([&](double s) { return b(s); }, 0.0, 1.0, 128, {0.5});
    CHECK(ib <= p.v_star + 1e-6);
  }
}

TEST_CASE("structure: natural on contact, constant off it, Lipschitz") {
  auto env = gaussian_env(&sigma_vee, nullptr, {0.5});
  SolveOptions opts;
  opts.grid = 1024;
  auto p = solve_optimal_profile(env, opts);
  double lips_bar = 0.0, lips = 0.0, lips_a = 0.0;
  for (int i = 0; i + 1 < p.t.size(); ++i) {
    double dt = p.t[i + 1] - p.t[i];
    lips_bar = std::max(lips_bar, std::abs(p.theta_bar[i + 1] - p.theta_bar[i]) / dt);
    lips = std::max(lips, std::abs(p.theta[i + 1] - p.theta[i]) / dt);
    lips_a = std::max(lips_a, std::abs(p.a[i + 1] - p.a[i]) / dt);
  }
  CHECK(lips <= 10.0 * lips_bar);
  CHECK(lips_a <= 10.0 * lips_bar * 5.0);  // a = theta sigma^2, sigma bounded by ~1.5
  // interior of non-degenerate contact components (the snapped edges carry a
  // sqrt(eps_contact) layer where theta has already frozen)
  for (const auto& [a, b] : p.contact_set.intervals()) {
    if (b - a < 0.05) continue;
    for (int i = 0; i < p.t.size(); ++i)
      if (p.t[i] >= a + 0.01 && p.t[i] <= b - 0.01)
        CHECK(std::abs(p.theta[i] - p.theta_bar[i]) <= 1e-3);
  }
  // locally constant off contact: off-contact nodes match a right-neighbour value
  for (int i = 0; i + 1 < p.t.size(); ++i) {
    if (!p.contact_set.contains(p.t[i]) && !p.contact_set.contains(p.t[i + 1]))
      CHECK(std::abs(p.theta[i + 1] - p.theta[i]) <= 1e-6);
  }
}

TEST_CASE("case mismatch raises") {
  auto env = gaussian_env(&sigma_dec);
  CHECK_THROWS_AS(solve_special_case(env, 256, SpecialCase::nonincreasing), DomainError);
  CHECK_THROWS_AS(solve_special_case(env, 256, SpecialCase::mixed), DomainError);
}
