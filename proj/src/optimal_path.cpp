#include "brw/optimal_path.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "brw/functional.hpp"

namespace brw {

namespace {

// Shape of the natural parameter over the grid, up to tolerance.
enum class BarShape { constant, nondecreasing, nonincreasing, vee, wedge, other };

struct Frame {
  const EnvironmentModel* env;
  int N;  // cells, N+1 nodes
  Eigen::ArrayXd t, theta_bar, vnat;
  std::vector<double> env_breaks;

  double density(double s, double th) const {
    return th * env->d_kappa(s, th) - env->kappa(s, th);
  }
  double theta_bar_at(double s) const { return env->natural_speed(s).theta_bar; }
  double theta_bar_deriv(double s) const {
    double h = 1e-6;
    double lo = std::max(0.0, s - h), hi = std::min(1.0, s + h);
    for (double b : env_breaks) {  // one-sided across kinks
      if (b > lo && b < hi) {
        if (s >= b) lo = b;
        else hi = b;
      }
    }
    return (theta_bar_at(hi) - theta_bar_at(lo)) / (hi - lo);
  }
};

Frame make_frame(const EnvironmentModel& env, int N) {
  Frame fr;
  fr.env = &env;
  fr.N = N;
  fr.t = Eigen::ArrayXd::LinSpaced(N + 1, 0.0, 1.0);
  fr.theta_bar.resize(N + 1);
  fr.vnat.resize(N + 1);
  for (int i = 0; i <= N; ++i) {
    auto ns = env.natural_speed(fr.t[i]);
    fr.theta_bar[i] = ns.theta_bar;
    fr.vnat[i] = ns.v;
  }
  fr.env_breaks = env.time_breaks();
  return fr;
}

BarShape classify(const Eigen::ArrayXd& tb, int& switch_index) {
  const int n = (int)tb.size();
  double scale = tb.abs().maxCoeff();
  double tol = 1e-9 * std::max(scale, 1.0);
  bool nondec = true, noninc = true;
  for (int i = 0; i + 1 < n; ++i) {
    if (tb[i + 1] < tb[i] - tol) nondec = false;
    if (tb[i + 1] > tb[i] + tol) noninc = false;
  }
  switch_index = -1;
  if (tb.maxCoeff() - tb.minCoeff() <= 1e-9 * std::max(scale, 1.0)) return BarShape::constant;
  if (nondec) return BarShape::nondecreasing;
  if (noninc) return BarShape::nonincreasing;
  int m;
  tb.minCoeff(&m);
  bool vee = true;
  for (int i = 0; i + 1 < n && vee; ++i) {
    if (i < m && tb[i + 1] > tb[i] + tol) vee = false;
    if (i >= m && tb[i + 1] < tb[i] - tol) vee = false;
  }
  if (vee) {
    switch_index = m;
    return BarShape::vee;
  }
  int M;
  tb.maxCoeff(&M);
  bool wedge = true;
  for (int i = 0; i + 1 < n && wedge; ++i) {
    if (i < M && tb[i + 1] < tb[i] - tol) wedge = false;
    if (i >= M && tb[i + 1] > tb[i] + tol) wedge = false;
  }
  if (wedge) {
    switch_index = M;
    return BarShape::wedge;
  }
  return BarShape::other;
}

// Assemble a full path from theta/theta_dot closures.
OptimalPath assemble(const Frame& fr, const std::function<double(double)>& theta,
                     const std::function<double(double)>& theta_dot,
                     std::vector<double> segment_breaks, const std::string& method,
                     double energy_tol) {
  const int N = fr.N;
  OptimalPath p;
  p.t = fr.t;
  p.theta_bar = fr.theta_bar;
  p.v = fr.vnat;
  p.method = method;
  p.segment_breaks = std::move(segment_breaks);
  p.theta.resize(N + 1);
  p.theta_dot.resize(N + 1);
  p.a.resize(N + 1);
  p.sigma.resize(N + 1);
  p.energy.resize(N + 1);
  Eigen::ArrayXd dens(N + 1);
  for (int i = 0; i <= N; ++i) {
    double s = fr.t[i];
    double th = theta(s);
    p.theta[i] = th;
    p.theta_dot[i] = theta_dot(s);
    p.a[i] = fr.env->d_kappa(s, th);
    p.sigma[i] = std::sqrt(fr.env->d2_kappa(s, th));
    dens[i] = fr.density(s, th);
  }
  const double h = 1.0 / N;
  p.energy[0] = 0.0;
  for (int i = 0; i < N; ++i)
    p.energy[i + 1] = p.energy[i] + 0.5 * h * (dens[i] + dens[i + 1]);
  std::vector<double> vbreaks = p.segment_breaks;
  vbreaks.insert(vbreaks.end(), fr.env_breaks.begin(), fr.env_breaks.end());
  p.v_star = integrate_gauss(
      [&](double s) { return fr.env->d_kappa(s, theta(s)); }, 0.0, 1.0, 256, vbreaks);

  double eps_contact = 10.0 * energy_tol;
  std::vector<bool> mask(N + 1);
  for (int i = 0; i <= N; ++i) mask[i] = p.energy[i] >= -eps_contact;
  p.contact_set = IndicatorSet::from_grid_mask(p.t, mask, std::max(3, N / 256));
  return p;
}

using ThetaRule = std::pair<std::function<double(double)>, std::function<double(double)>>;

// theta == theta_bar everywhere (contact on all of [0,1])
ThetaRule rule_follow(const Frame& fr) {
  return {[&fr](double s) { return fr.theta_bar_at(s); },
          [&fr](double s) { return fr.theta_bar_deriv(s); }};
}

// constant theta solving int_0^1 density(s, c) ds = 0
ThetaRule rule_constant(const Frame& fr, double& c_out) {
  double lo = fr.theta_bar.minCoeff() * (1.0 - 1e-6) - 1e-12;
  double hi = fr.theta_bar.maxCoeff() * (1.0 + 1e-6) + 1e-12;
  auto total = [&](double c) {
    return integrate_gauss([&](double s) { return fr.density(s, c); }, 0.0, 1.0, 256,
                           fr.env_breaks);
  };
  if (total(lo) > 0.0 || total(hi) < 0.0)
    throw ConvergenceError("optimal profile: constant-parameter bracket failed");
  double c = bisect(total, lo, hi, 1e-14);
  c_out = c;
  return {[c](double) { return c; }, [](double) { return 0.0; }};
}

// constant up to u, then follow theta_bar (vee-shaped theta_bar);
// u solves E(u) = int_0^u density(s, theta_bar(u)) ds = 0
bool rule_vee(const Frame& fr, int m, ThetaRule& rule, double& u_out) {
  double tm = fr.t[m];
  auto lead = [&](double u) {
    double c = fr.theta_bar_at(u);
    return integrate_gauss([&](double s) { return fr.density(s, c); }, 0.0, u, 256,
                           fr.env_breaks);
  };
  double lo = tm, hi = 1.0;
  if (lead(hi) < 0.0) return false;  // no root: the constant solution rules
  if (lead(lo) > 0.0) return false;
  double u = bisect(lead, lo, hi, 1e-13);
  u_out = u;
  rule = {[&fr, u](double s) { return fr.theta_bar_at(std::max(s, u)); },
          [&fr, u](double s) { return s < u ? 0.0 : fr.theta_bar_deriv(s); }};
  return true;
}

// follow theta_bar up to u, then constant (wedge-shaped theta_bar);
// u solves int_u^1 density(s, theta_bar(u)) ds = 0
bool rule_wedge(const Frame& fr, int M, ThetaRule& rule, double& u_out) {
  double tM = fr.t[M];
  auto tail = [&](double u) {
    double c = fr.theta_bar_at(u);
    return integrate_gauss([&](double s) { return fr.density(s, c); }, u, 1.0, 256,
                           fr.env_breaks);
  };
  double lo = 0.0, hi = tM;
  if (tail(lo) > 0.0 || tail(hi) < 0.0) return false;
  double u = bisect(tail, lo, hi, 1e-13);
  u_out = u;
  rule = {[&fr, u](double s) { return fr.theta_bar_at(std::min(s, u)); },
          [&fr, u](double s) { return s < u ? fr.theta_bar_deriv(s) : 0.0; }};
  return true;
}

double l_star_from_rule(const Frame& fr, const ThetaRule& rule,
                        const std::vector<double>& breaks) {
  auto integrand = [&](double s) {
    double td = rule.second(s);
    double th = rule.first(s);
    double sg = std::sqrt(fr.env->d2_kappa(s, th));
    double x = td * sg;
    double c = x > 0 ? std::cbrt(x) : 0.0;
    return c * c / th;
  };
  std::vector<double> b = breaks;
  b.insert(b.end(), fr.env_breaks.begin(), fr.env_breaks.end());
  return takacs_rate_constant() * integrate_gauss(integrand, 0.0, 1.0, 512, b);
}

KktReport compute_kkt(const OptimalPath& p) {
  KktReport r;
  const int n = (int)p.theta.size();
  r.positivity = p.theta.minCoeff();
  r.monotonicity = 0.0;
  for (int i = 0; i + 1 < n; ++i)
    r.monotonicity = std::max(r.monotonicity, p.theta[i] - p.theta[i + 1]);
  r.terminal_energy = std::abs(p.energy[n - 1]);
  double slack = 0.0;
  for (int i = 0; i + 1 < n; ++i)
    slack += p.energy[i] * (1.0 / p.theta[i + 1] - 1.0 / p.theta[i]);
  r.slackness = std::abs(slack);
  r.max_energy = p.energy.maxCoeff();
  return r;
}

}  // namespace

ScalarField OptimalPath::theta_field() const {
  auto th = std::make_shared<Eigen::ArrayXd>(theta);
  auto td = std::make_shared<Eigen::ArrayXd>(theta_dot);
  const int n = (int)theta.size() - 1;
  auto eval = [n](const Eigen::ArrayXd& v, double s) {
    double u = std::clamp(s, 0.0, 1.0) * n;
    int i = std::min((int)u, n - 1);
    double w = u - i;
    return v[i] * (1 - w) + v[i + 1] * w;
  };
  return ScalarField::function([th, eval](double s) { return eval(*th, s); },
                               [td, eval](double s) { return eval(*td, s); },
                               segment_breaks);
}

ScalarField OptimalPath::a_field() const {
  auto av = std::make_shared<Eigen::ArrayXd>(a);
  const int n = (int)a.size() - 1;
  return ScalarField::function(
      [av, n](double s) {
        double u = std::clamp(s, 0.0, 1.0) * n;
        int i = std::min((int)u, n - 1);
        double w = u - i;
        return (*av)[i] * (1 - w) + (*av)[i + 1] * w;
      },
      nullptr, segment_breaks);
}

ScalarField OptimalPath::sigma_field() const {
  auto sv = std::make_shared<Eigen::ArrayXd>(sigma);
  const int n = (int)sigma.size() - 1;
  return ScalarField::function(
      [sv, n](double s) {
        double u = std::clamp(s, 0.0, 1.0) * n;
        int i = std::min((int)u, n - 1);
        double w = u - i;
        return (*sv)[i] * (1 - w) + (*sv)[i + 1] * w;
      },
      nullptr, segment_breaks);
}

OptimalPath solve_special_case(const EnvironmentModel& env, int grid, SpecialCase which) {
  Frame fr = make_frame(env, grid);
  int sw;
  BarShape shape = classify(fr.theta_bar, sw);
  const double energy_tol = 1e-6;

  auto finish = [&](const ThetaRule& rule, std::vector<double> breaks,
                    const std::string& method) {
    OptimalPath p = assemble(fr, rule.first, rule.second, breaks, method, energy_tol);
    p.kkt = compute_kkt(p);
    p.l_star = l_star_from_rule(fr, rule, breaks);
    return p;
  };

  switch (which) {
    case SpecialCase::nondecreasing: {
      if (shape == BarShape::constant) {
        double c;
        return finish(rule_constant(fr, c), {}, "special:constant");
      }
      if (shape != BarShape::nondecreasing)
        throw DomainError("solve_special_case: theta_bar is not non-decreasing");
      return finish(rule_follow(fr), {}, "special:follow");
    }
    case SpecialCase::nonincreasing: {
      if (shape != BarShape::nonincreasing && shape != BarShape::constant)
        throw DomainError("solve_special_case: theta_bar is not non-increasing");
      double c;
      auto rule = rule_constant(fr, c);
      return finish(rule, {}, "special:constant");
    }
    case SpecialCase::mixed: {
      if (shape == BarShape::vee) {
        ThetaRule rule;
        double u;
        if (rule_vee(fr, sw, rule, u)) return finish(rule, {u}, "special:constant-then-follow");
        double c;
        return finish(rule_constant(fr, c), {}, "special:constant");
      }
      if (shape == BarShape::wedge) {
        ThetaRule rule;
        double u;
        if (rule_wedge(fr, sw, rule, u)) return finish(rule, {u}, "special:follow-then-constant");
        double c;
        return finish(rule_constant(fr, c), {}, "special:constant");
      }
      throw DomainError("solve_special_case: theta_bar has no single switch");
    }
  }
  throw DomainError("solve_special_case: unknown case");
}

OptimalPath solve_optimal_profile(const EnvironmentModel& env, const SolveOptions& opts) {
  Frame fr = make_frame(env, opts.grid);
  const int N = fr.N;
  const double h = 1.0 / N;

  // trapezoid node weights
  Eigen::ArrayXd w = Eigen::ArrayXd::Constant(N + 1, h);
  w[0] = w[N] = 0.5 * h;

  // stage 1: penalized projected ascent, isotonic projection onto
  // non-decreasing positive sequences
  Eigen::ArrayXd theta = Eigen::ArrayXd::Constant(N + 1, fr.theta_bar.minCoeff());
  Eigen::ArrayXd q(N + 1), dens(N + 1), E(N + 1), grad(N + 1), proj(N + 1);
  double rho = 10.0, mu = 10.0;

  auto eval_penalized = [&](const Eigen::ArrayXd& th, double rho_, double mu_) {
    double J = 0.0;
    for (int i = 0; i <= N; ++i) {
      dens[i] = fr.density(fr.t[i], th[i]);
      J += w[i] * fr.env->d_kappa(fr.t[i], th[i]);
    }
    E[0] = 0.0;
    for (int i = 0; i < N; ++i) E[i + 1] = E[i] + 0.5 * h * (dens[i] + dens[i + 1]);
    double pen = 0.0;
    for (int i = 0; i <= N; ++i) pen += w[i] * std::pow(std::max(E[i], 0.0), 2);
    return J - rho_ * pen - mu_ * E[N] * E[N];
  };

  double step = 0.1;
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    for (int inner = 0; inner < opts.max_inner; ++inner) {
      double J0 = eval_penalized(theta, rho, mu);  // fills dens, E
      // suffix weights of the energy-penalty against node j
      Eigen::ArrayXd suffix(N + 1);
      double acc = 2.0 * mu * E[N];
      suffix[N] = acc;
      for (int i = N; i >= 1; --i) {
        acc += 2.0 * rho * w[i] * std::max(E[i], 0.0);
        suffix[i - 1] = acc;
      }
      for (int j = 0; j <= N; ++j) {
        q[j] = fr.env->d2_kappa(fr.t[j], theta[j]);
        double gamma = (j == 0 || j == N) ? 0.5 : 1.0;  // cumulative-trapezoid weight
        grad[j] = w[j] * q[j] - suffix[j] * h * gamma * theta[j] * q[j];
      }
      bool improved = false;
      for (int bt = 0; bt < 24; ++bt) {
        Eigen::ArrayXd cand = theta + step * grad;
        isotonic_fit(cand, Eigen::ArrayXd::Ones(N + 1), proj);
        proj = proj.max(1e-6);
        if (eval_penalized(proj, rho, mu) > J0 + 1e-15) {
          theta = proj;
          step *= 1.25;
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    rho *= 5.0;
    mu *= 5.0;
  }

  // stage 2: structure refinement against theta_bar
  int sw;
  BarShape shape = classify(fr.theta_bar, sw);
  auto try_finish = [&](const ThetaRule& rule, std::vector<double> breaks,
                        const std::string& method, OptimalPath& out) {
    OptimalPath p = assemble(fr, rule.first, rule.second, breaks, method,
                             opts.energy_tol);
    p.kkt = compute_kkt(p);
    if (!p.kkt.pass(opts.energy_tol)) return false;
    p.l_star = l_star_from_rule(fr, rule, breaks);
    out = p;
    return true;
  };

  OptimalPath refined;
  bool ok = false;
  if (shape == BarShape::constant) {
    double c;
    ok = try_finish(rule_constant(fr, c), {}, "ascent+constant", refined);
  } else if (shape == BarShape::nondecreasing) {
    ok = try_finish(rule_follow(fr), {}, "ascent+follow", refined);
  } else if (shape == BarShape::nonincreasing) {
    double c;
    ok = try_finish(rule_constant(fr, c), {}, "ascent+constant", refined);
  } else if (shape == BarShape::vee) {
    ThetaRule rule;
    double u;
    if (rule_vee(fr, sw, rule, u))
      ok = try_finish(rule, {u}, "ascent+constant-then-follow", refined);
    if (!ok) {
      double c;
      ok = try_finish(rule_constant(fr, c), {}, "ascent+constant", refined);
    }
  } else if (shape == BarShape::wedge) {
    ThetaRule rule;
    double u;
    if (rule_wedge(fr, sw, rule, u))
      ok = try_finish(rule, {u}, "ascent+follow-then-constant", refined);
    if (!ok) {
      double c;
      ok = try_finish(rule_constant(fr, c), {}, "ascent+constant", refined);
    }
  }
  if (ok) return refined;

  // fall back to the raw ascent iterate
  auto th_interp = [&, thv = theta](double s) {
    double u = std::clamp(s, 0.0, 1.0) * N;
    int i = std::min((int)u, N - 1);
    double ww = u - i;
    return thv[i] * (1 - ww) + thv[i + 1] * ww;
  };
  auto td_fd = [&, thv = theta](double s) {
    double d = 2.0 * h;
    double lo = std::clamp(s - d, 0.0, 1.0), hi = std::clamp(s + d, 0.0, 1.0);
    double u0 = std::clamp(lo, 0.0, 1.0) * N, u1 = std::clamp(hi, 0.0, 1.0) * N;
    int i0 = std::min((int)u0, N - 1), i1 = std::min((int)u1, N - 1);
    double v0 = thv[i0] * (1 - (u0 - i0)) + thv[i0 + 1] * (u0 - i0);
    double v1 = thv[i1] * (1 - (u1 - i1)) + thv[i1 + 1] * (u1 - i1);
    return (v1 - v0) / (hi - lo);
  };
  OptimalPath p = assemble(fr, th_interp, td_fd, {}, "ascent", opts.energy_tol);
  p.kkt = compute_kkt(p);
  if (!p.kkt.pass(opts.energy_tol * 100)) {
    std::ostringstream msg;
    msg << "solve_optimal_profile: no convergence; residuals mono=" << p.kkt.monotonicity
        << " terminal=" << p.kkt.terminal_energy << " slack=" << p.kkt.slackness
        << " max_energy=" << p.kkt.max_energy;
    throw ConvergenceError(msg.str());
  }
  p.l_star = correction_l_star(env, p);
  return p;
}

KktReport check_optimality(const EnvironmentModel& env, const OptimalPath& path,
                           double /*tol*/) {
  (void)env;
  return compute_kkt(path);
}

double correction_l_star(const EnvironmentModel& env, const OptimalPath& path) {
  (void)env;
  if (path.theta_dot.size() != path.theta.size())
    throw DomainError("correction_l_star: theta has no attached derivative");
  const int N = (int)path.theta.size() - 1;
  auto integrand = [&](double s) {
    double u = std::clamp(s, 0.0, 1.0) * N;
    int i = std::min((int)u, N - 1);
    double w = u - i;
    double td = path.theta_dot[i] * (1 - w) + path.theta_dot[i + 1] * w;
    double sg = path.sigma[i] * (1 - w) + path.sigma[i + 1] * w;
    double th = path.theta[i] * (1 - w) + path.theta[i + 1] * w;
    double x = td * sg;
    double c = x > 0 ? std::cbrt(x) : 0.0;
    return c * c / th;
  };
  std::vector<double> breaks = path.segment_breaks;
  return takacs_rate_constant() *
         integrate_gauss(integrand, 0.0, 1.0, 512, breaks);
}

}  // namespace brw
