#include "brw/functional.hpp"

#include <algorithm>
#include <cmath>

namespace brw {

namespace {

// x^{2/3} for x >= 0 up to the zero band
double pow23(double x, double zero_band) {
  if (x <= zero_band) return 0.0;
  double c = std::cbrt(x);
  return c * c;
}

// Global cell edges on [0,1]: uniform grid union region endpoints and field
// breaks. Evaluations at different t then share cells exactly, which makes
// H_{t2} - H_{t1} equal the [t1,t2] integral to roundoff.
std::vector<double> global_edges(const BarrierSpec& spec, const ScalarField& sigma,
                                 int grid) {
  std::vector<double> e;
  e.reserve(grid + 16);
  for (int i = 0; i <= grid; ++i) e.push_back((double)i / grid);
  auto add = [&](const std::vector<double>& v) { e.insert(e.end(), v.begin(), v.end()); };
  add(spec.F.endpoints());
  add(spec.G.endpoints());
  for (const ScalarField* f : {&spec.f, &spec.g, &spec.h, &sigma}) add(f->breaks());
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  while (!e.empty() && e.front() < 0.0) e.erase(e.begin());
  while (!e.empty() && e.back() > 1.0) e.pop_back();
  return e;
}

double h_integrand(const BarrierSpec& spec, const ScalarField& sigma,
                   const PsiEvaluator& psi_eval, double s) {
  const double a1c = takacs_rate_constant();
  const double zero_band = 1e-12;
  double hd = spec.h.derivative(s);
  double gs = spec.g(s);
  double value = hd * gs;
  bool inF = spec.F.contains(s), inG = spec.G.contains(s);
  if (inF && inG) {
    double fs = spec.f(s);
    double sg2 = sigma(s) * sigma(s);
    double width = gs - fs;
    value += sg2 / (width * width) * psi_eval(width * width * width * hd / sg2);
  } else if (inG) {
    value += a1c * pow23(hd * sigma(s), zero_band);
  } else if (inF) {
    if (hd < -zero_band) value += hd * (spec.f(s) - gs);
    value += a1c * pow23(-hd * sigma(s), zero_band);
  }
  return value;
}

// Midpoint rule over [a,b] against the global edge set.
double h_integrate(const BarrierSpec& spec, const ScalarField& sigma,
                   const PsiEvaluator& psi_eval, double a, double b,
                   const std::vector<double>& edges) {
  if (b <= a) return 0.0;
  double sum = 0.0, comp = 0.0;
  auto accumulate = [&](double lo, double hi) {
    if (hi <= lo) return;
    double term = (hi - lo) * h_integrand(spec, sigma, psi_eval, 0.5 * (lo + hi));
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  };
  size_t i = std::upper_bound(edges.begin(), edges.end(), a) - edges.begin();
  double cursor = a;
  for (; i < edges.size() && edges[i] < b; ++i) {
    accumulate(cursor, edges[i]);
    cursor = edges[i];
  }
  accumulate(cursor, b);
  return sum;
}

}  // namespace

void BarrierSpec::validate(int grid, double zero_band) const {
  if (!h.has_derivative()) throw DomainError("BarrierSpec: h needs a derivative");
  if (!(f(0.0) < 0.0 && 0.0 < g(0.0)))
    throw DomainError("BarrierSpec: need f(0) < 0 < g(0)");
  for (int i = 0; i <= grid; ++i) {
    double t = (double)i / grid;
    if (!(f(t) < g(t))) throw DomainError("BarrierSpec: need f < g pointwise");
    double hd = h.derivative(t);
    if (hd < -zero_band && !F.contains(t))
      throw DomainError("BarrierSpec: hdot < 0 outside F");
    if (hd > zero_band && !G.contains(t))
      throw DomainError("BarrierSpec: hdot > 0 outside G");
  }
}

double energy_K(const EnvironmentModel& env, const ScalarField& b, double t, int grid) {
  if (t <= 0.0) return 0.0;
  return integrate_gauss([&](double s) { return env.kappa_star(s, b(s)); }, 0.0, t,
                         grid, b.breaks());
}

double spine_energy(const EnvironmentModel& env, const ScalarField& phi, double t,
                    int grid) {
  if (t <= 0.0) return 0.0;
  return integrate_gauss(
      [&](double s) {
        double p = phi(s);
        return p * env.d_kappa(s, p) - env.kappa(s, p);
      },
      0.0, t, grid, phi.breaks());
}

double takacs_rate_constant() {
  static const double c = airy_zero(1) / std::cbrt(2.0);
  return c;
}

HEvaluation eval_H(const BarrierSpec& spec, const ScalarField& sigma, double t,
                   const PsiEvaluator& psi_eval, int grid) {
  if (t <= 0.0) return {0.0, 0.0};
  auto fine_edges = global_edges(spec, sigma, grid);
  auto coarse_edges = global_edges(spec, sigma, grid / 2);
  double fine = h_integrate(spec, sigma, psi_eval, 0.0, t, fine_edges);
  double coarse = h_integrate(spec, sigma, psi_eval, 0.0, t, coarse_edges);
  return {fine, std::abs(fine - coarse) / 3.0};
}

double eval_H(const BarrierSpec& spec, const ScalarField& sigma, double t, int grid) {
  static PsiEvaluator shared;
  return eval_H(spec, sigma, t, shared, grid).value;
}

double eval_H_range(const BarrierSpec& spec, const ScalarField& sigma, double t1,
                    double t2, const PsiEvaluator& psi_eval, int grid) {
  auto edges = global_edges(spec, sigma, grid);
  return h_integrate(spec, sigma, psi_eval, t1, t2, edges);
}

}  // namespace brw
