#ifndef BRW_OPTIMAL_PATH_HPP
#define BRW_OPTIMAL_PATH_HPP

#include <string>

#include <Eigen/Core>

#include "brw/environment.hpp"
#include "brw/field.hpp"

namespace brw {

/// Residuals of the three optimality conditions for the constrained speed
/// profile problem, evaluated on the path's own grid.
struct KktReport {
  double monotonicity = 0.0;    // max decrease of theta between nodes
  double positivity = 0.0;      // min theta over the grid
  double terminal_energy = 0.0; // |K*(a)_1|
  double slackness = 0.0;       // |sum_i K*(a)_{t_i} (1/theta_{i+1} - 1/theta_i)|
  double max_energy = 0.0;      // max_t K*(a)_t (feasibility, should be <= tol)

  bool pass(double tol) const {
    return monotonicity <= tol && positivity > 0.0 && terminal_energy <= tol &&
           slackness <= tol && max_energy <= tol;
  }
};

struct OptimalPath {
  Eigen::ArrayXd t;          // uniform grid nodes on [0,1]
  Eigen::ArrayXd theta;      // optimal parameter
  Eigen::ArrayXd theta_dot;  // derivative of theta (analytic per segment)
  Eigen::ArrayXd a;          // optimal speed profile a = d_kappa(t, theta)
  Eigen::ArrayXd theta_bar;  // natural parameter
  Eigen::ArrayXd v;          // natural speed
  Eigen::ArrayXd sigma;      // sqrt(d2_kappa(t, theta))
  Eigen::ArrayXd energy;     // K*(a) cumulative at nodes
  double v_star = 0.0;
  double l_star = 0.0;
  IndicatorSet contact_set;  // approximation of {K*(a) = 0}
  KktReport kkt;
  std::string method;        // construction used

  ScalarField theta_field() const;  // carries theta_dot and segment breaks
  ScalarField a_field() const;
  ScalarField sigma_field() const;
  std::vector<double> segment_breaks;
};

enum class SpecialCase { nondecreasing, nonincreasing, mixed };

struct SolveOptions {
  int grid = 2048;
  double energy_tol = 1e-6;
  double profile_tol = 1e-4;
  int max_outer = 14;
  int max_inner = 240;
};

/// Closed-form construction for monotone or single-switch natural parameters.
/// Throws DomainError when the verified shape does not match `which`.
OptimalPath solve_special_case(const EnvironmentModel& env, int grid, SpecialCase which);

/// Generic solver: penalized projected ascent (isotonic projection) followed
/// by structure refinement against the natural parameter.
OptimalPath solve_optimal_profile(const EnvironmentModel& env,
                                  const SolveOptions& opts = {});

/// Residuals of the optimality conditions for an arbitrary populated path.
KktReport check_optimality(const EnvironmentModel& env, const OptimalPath& path,
                           double tol = 1e-6);

/// n^{1/3} correction: (alpha_1/2^{1/3}) int_0^1 (theta_dot sigma)^{2/3} / theta.
double correction_l_star(const EnvironmentModel& env, const OptimalPath& path);

}  // namespace brw

#endif
