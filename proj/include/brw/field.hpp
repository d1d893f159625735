#ifndef BRW_FIELD_HPP
#define BRW_FIELD_HPP

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "brw/numeric.hpp"

namespace brw {

/// A function of t in [0,1], either closed form or piecewise-linear samples on
/// a uniform grid, with an optional derivative of the same shape. `breaks`
/// lists interior kinks so quadrature and ODE steps can split there.
class ScalarField {
 public:
  ScalarField() = default;

  static ScalarField constant(double c);
  static ScalarField function(std::function<double(double)> f,
                              std::function<double(double)> df = nullptr,
                              std::vector<double> breaks = {});
  static ScalarField sampled(const Eigen::ArrayXd& values);
  static ScalarField sampled(const Eigen::ArrayXd& values, const Eigen::ArrayXd& deriv);

  double operator()(double t) const;
  bool has_derivative() const;
  double derivative(double t) const;
  const std::vector<double>& breaks() const { return breaks_; }

  /// max_t |f(t) - f(0) - int_0^t f'| over a uniform grid; requires a derivative.
  double fundamental_theorem_residual(int grid = 512) const;

 private:
  std::function<double(double)> f_;
  std::function<double(double)> df_;
  std::vector<double> breaks_;
};

/// Finite union of disjoint closed subintervals of [0,1]; degenerate
/// single-point intervals are allowed and carry no measure.
class IndicatorSet {
 public:
  IndicatorSet() = default;
  explicit IndicatorSet(std::vector<std::pair<double, double>> intervals);

  static IndicatorSet empty() { return IndicatorSet(); }
  static IndicatorSet full() { return IndicatorSet({{0.0, 1.0}}); }

  bool contains(double t) const;
  double measure() const;
  const std::vector<std::pair<double, double>>& intervals() const { return intervals_; }
  std::vector<double> endpoints() const;

  /// Snap a grid mask to intervals; runs shorter than min_run grid cells
  /// collapse to degenerate points.
  static IndicatorSet from_grid_mask(const Eigen::ArrayXd& t,
                                     const std::vector<bool>& mask, int min_run = 3);

 private:
  std::vector<std::pair<double, double>> intervals_;
};

}  // namespace brw

#endif
