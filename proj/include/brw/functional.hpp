#ifndef BRW_FUNCTIONAL_HPP
#define BRW_FUNCTIONAL_HPP

#include "brw/airy.hpp"
#include "brw/environment.hpp"
#include "brw/field.hpp"

namespace brw {

/// Barrier data for the weighted path functional: lower barrier f active on F,
/// upper barrier g active on G, tilt h with derivative hdot. Requires f < g,
/// f(0) < 0 < g(0), {hdot < 0} inside F and {hdot > 0} inside G.
struct BarrierSpec {
  ScalarField f;
  ScalarField g;
  IndicatorSet F;
  IndicatorSet G;
  ScalarField h;

  /// Throws DomainError if the sign condition on hdot fails on the grid.
  /// |hdot| <= zero_band counts as zero (sampled derivatives are never exact).
  void validate(int grid = 2048, double zero_band = 1e-12) const;
};

/// Energy of a speed profile: K*(b)_t = int_0^t kappa*_s(b_s) ds.
double energy_K(const EnvironmentModel& env, const ScalarField& b, double t,
                int grid = 512);

/// Spine energy E(phi)_t = int_0^t [phi_s d_kappa_s(phi_s) - kappa_s(phi_s)] ds;
/// equals energy_K at b_s = d_kappa_s(phi_s) by Legendre duality.
double spine_energy(const EnvironmentModel& env, const ScalarField& phi, double t,
                    int grid = 512);

struct HEvaluation {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Weighted barrier functional up to time t:
///   H_t = int_0^t hdot g
///       + int_{F cap G} sigma^2/(g-f)^2 Psi((g-f)^3 hdot / sigma^2)
///       + int_{F^c cap G} (alpha_1/2^{1/3}) (hdot sigma)^{2/3}
///       + int_{F cap G^c} [hdot (f-g) + (alpha_1/2^{1/3}) (-hdot sigma)^{2/3}].
/// Composite midpoint with cells split at F, G endpoints and field breaks.
HEvaluation eval_H(const BarrierSpec& spec, const ScalarField& sigma, double t,
                   const PsiEvaluator& psi_eval, int grid = 4096);
double eval_H(const BarrierSpec& spec, const ScalarField& sigma, double t,
              int grid = 4096);

/// Integral of the H integrand over [t1, t2] with the same cell layout, so
/// eval_H(t2) - eval_H(t1) == eval_H_range(t1, t2) up to roundoff.
double eval_H_range(const BarrierSpec& spec, const ScalarField& sigma, double t1,
                    double t2, const PsiEvaluator& psi_eval, int grid = 4096);

/// Shared constant alpha_1 / 2^{1/3} (one-sided barrier rate).
double takacs_rate_constant();

}  // namespace brw

#endif
