#include "brw/field.hpp"

#include <algorithm>
#include <cmath>

namespace brw {

ScalarField ScalarField::constant(double c) {
  ScalarField s;
  s.f_ = [c](double) { return c; };
  s.df_ = [](double) { return 0.0; };
  return s;
}

ScalarField ScalarField::function(std::function<double(double)> f,
                                  std::function<double(double)> df,
                                  std::vector<double> breaks) {
  ScalarField s;
  s.f_ = std::move(f);
  s.df_ = std::move(df);
  s.breaks_ = std::move(breaks);
  std::sort(s.breaks_.begin(), s.breaks_.end());
  return s;
}

namespace {

double lerp_eval(const Eigen::ArrayXd& v, double t) {
  const int n = (int)v.size() - 1;
  double u = std::clamp(t, 0.0, 1.0) * n;
  int i = std::min((int)u, n - 1);
  double w = u - i;
  return v[i] * (1.0 - w) + v[i + 1] * w;
}

}  // namespace

ScalarField ScalarField::sampled(const Eigen::ArrayXd& values) {
  if (values.size() < 2) throw NumericError("ScalarField::sampled: need >= 2 samples");
  ScalarField s;
  auto v = std::make_shared<Eigen::ArrayXd>(values);
  s.f_ = [v](double t) { return lerp_eval(*v, t); };
  const int n = (int)values.size() - 1;
  s.breaks_.reserve(n - 1);
  for (int i = 1; i < n; ++i) s.breaks_.push_back((double)i / n);
  return s;
}

ScalarField ScalarField::sampled(const Eigen::ArrayXd& values, const Eigen::ArrayXd& deriv) {
  ScalarField s = sampled(values);
  if (deriv.size() != values.size())
    throw NumericError("ScalarField::sampled: derivative shape mismatch");
  auto d = std::make_shared<Eigen::ArrayXd>(deriv);
  s.df_ = [d](double t) { return lerp_eval(*d, t); };
  return s;
}

double ScalarField::operator()(double t) const {
  if (!f_) throw NumericError("ScalarField: empty");
  return f_(t);
}

bool ScalarField::has_derivative() const { return (bool)df_; }

double ScalarField::derivative(double t) const {
  if (!df_) throw NumericError("ScalarField: no derivative attached");
  return df_(t);
}

double ScalarField::fundamental_theorem_residual(int grid) const {
  if (!df_) throw NumericError("ScalarField: no derivative attached");
  double worst = 0.0;
  for (int i = 1; i <= grid; ++i) {
    double t = (double)i / grid;
    double integral = integrate_gauss(df_, 0.0, t, 256, breaks_);
    worst = std::max(worst, std::abs(f_(t) - f_(0.0) - integral));
  }
  return worst;
}

IndicatorSet::IndicatorSet(std::vector<std::pair<double, double>> intervals)
    : intervals_(std::move(intervals)) {
  std::sort(intervals_.begin(), intervals_.end());
  for (size_t i = 0; i < intervals_.size(); ++i) {
    auto& [a, b] = intervals_[i];
    if (a > b || a < 0.0 || b > 1.0)
      throw NumericError("IndicatorSet: intervals must be ordered subsets of [0,1]");
    if (i > 0 && a < intervals_[i - 1].second)
      throw NumericError("IndicatorSet: intervals must be disjoint");
  }
}

bool IndicatorSet::contains(double t) const {
  for (const auto& [a, b] : intervals_)
    if (t >= a && t <= b) return true;
  return false;
}

double IndicatorSet::measure() const {
  double m = 0.0;
  for (const auto& [a, b] : intervals_) m += b - a;
  return m;
}

std::vector<double> IndicatorSet::endpoints() const {
  std::vector<double> e;
  for (const auto& [a, b] : intervals_) {
    e.push_back(a);
    e.push_back(b);
  }
  return e;
}

IndicatorSet IndicatorSet::from_grid_mask(const Eigen::ArrayXd& t,
                                          const std::vector<bool>& mask, int min_run) {
  std::vector<std::pair<double, double>> out;
  const int n = (int)mask.size();
  int i = 0;
  while (i < n) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && mask[j + 1]) ++j;
    if (j - i + 1 >= min_run)
      out.emplace_back(t[i], t[j]);
    else
      out.emplace_back(t[(i + j) / 2], t[(i + j) / 2]);
    i = j + 1;
  }
  return IndicatorSet(out);
}

}  // namespace brw
