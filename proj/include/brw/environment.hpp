#ifndef BRW_ENVIRONMENT_HPP
#define BRW_ENVIRONMENT_HPP

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "brw/field.hpp"
#include "brw/numeric.hpp"

namespace brw {

struct NaturalSpeed {
  double v = 0.0;          // root of kappa*_t(v) = 0 with positive slope
  double theta_bar = 0.0;  // d_a kappa*_t(v) > 0
};

/// Offspring point process sample: child displacements relative to the parent.
using Offspring = std::vector<double>;

/// Family of point-process log-Laplace transforms kappa_t(theta) over t in
/// [0,1], theta in [0, theta_max(t)), with theta-derivatives and the Legendre
/// conjugate kappa*_t(a) = sup_{theta>0} [theta a - kappa_t(theta)].
/// Immutable after construction; safe for concurrent reads.
class EnvironmentModel {
 public:
  /// Two children, each displaced by an independent centred Gaussian with
  /// standard deviation sigma_t: kappa_t(theta) = log 2 + theta^2 sigma_t^2 / 2.
  static EnvironmentModel gaussian_binary(ScalarField sigma);

  /// kappa_t(theta) = kappa0 + theta^2 sigma_t^2 / 2 with kappa0 in (0, log 2];
  /// realized by 1-or-2 Gaussian children so the process never dies.
  static EnvironmentModel quadratic(double kappa0, ScalarField sigma);

  /// Two children at +-delta_t with equal probability:
  /// kappa_t(theta) = log 2 + log cosh(theta delta_t).
  static EnvironmentModel two_point(ScalarField delta);

  /// Interpolating table over a uniform (t, theta) grid: cubic in theta,
  /// linear in t. `values(i,j) = kappa(t_i, theta_j)`.
  static EnvironmentModel tabulated(const Eigen::MatrixXd& values, double theta_max);

  /// Tabulate another environment (round-trip construction used in tests and
  /// config files referencing a generating law).
  static EnvironmentModel tabulate(const EnvironmentModel& src, int nt, int ntheta,
                                   double theta_max);

  double kappa(double t, double theta) const;
  double d_kappa(double t, double theta) const;
  double d2_kappa(double t, double theta) const;
  double theta_max(double t) const;

  double kappa_star(double t, double a) const;
  double d_kappa_star(double t, double a) const;

  NaturalSpeed natural_speed(double t) const;

  const std::string& variant() const;
  bool supports_simulation() const;

  /// Interior kinks of the driving field(s) in t, for quadrature splitting.
  std::vector<double> time_breaks() const;

  /// Offspring point process draw; u points into a uniform stream and is
  /// advanced by a fixed per-family count (deterministic replay).
  Offspring sample_offspring(double t, const std::function<double()>& uniform) const;

  /// One step of the spine-tilted walk at parameter phi: law with mean
  /// d_kappa(t,phi) and variance d2_kappa(t,phi). Consumes exactly two uniforms.
  double sample_tilted_step(double t, double phi, double u1, double u2) const;

  struct Impl;

 private:
  explicit EnvironmentModel(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

}  // namespace brw

#endif
