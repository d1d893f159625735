#include "brw/numeric.hpp"

#include <algorithm>

#include <Eigen/Dense>

namespace brw {

namespace {

// Collect cell edges: [a,b] split at interior breakpoints, then each piece cut
// into ceil(n * len) uniform cells.
std::vector<double> cell_edges(double a, double b, int n, const std::vector<double>& breaks) {
  std::vector<double> pts{a, b};
  for (double s : breaks)
    if (s > a && s < b) pts.push_back(s);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<double> edges;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    double lo = pts[i], hi = pts[i + 1];
    int m = std::max(1, (int)std::ceil(n * (hi - lo)));
    for (int j = 0; j < m; ++j) edges.push_back(lo + (hi - lo) * j / m);
  }
  edges.push_back(b);
  return edges;
}

}  // namespace

double integrate_midpoint(const std::function<double(double)>& f, double a, double b,
                          int n, const std::vector<double>& breaks) {
  if (b <= a) return 0.0;
  auto edges = cell_edges(a, b, n, breaks);
  double sum = 0.0, comp = 0.0;
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    double w = edges[i + 1] - edges[i];
    double term = w * f(0.5 * (edges[i] + edges[i + 1]));
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double integrate_gauss(const std::function<double(double)>& f, double a, double b,
                       int n, const std::vector<double>& breaks) {
  if (b <= a) return 0.0;
  static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
  static const double gw[5] = {0.2369268850561891, 0.4786286704993665,
                               0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  auto edges = cell_edges(a, b, n, breaks);
  double sum = 0.0;
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    double c = 0.5 * (edges[i] + edges[i + 1]);
    double h = 0.5 * (edges[i + 1] - edges[i]);
    double cell = 0.0;
    for (int j = 0; j < 5; ++j) cell += gw[j] * f(c + h * gx[j]);
    sum += cell * h;
  }
  return sum;
}

void isotonic_fit(const Eigen::ArrayXd& x, const Eigen::ArrayXd& w, Eigen::ArrayXd& y) {
  const int n = (int)x.size();
  y.resize(n);
  std::vector<double> mean(n), weight(n);
  std::vector<int> len(n);
  int blocks = 0;
  for (int i = 0; i < n; ++i) {
    mean[blocks] = x[i];
    weight[blocks] = w[i];
    len[blocks] = 1;
    ++blocks;
    while (blocks > 1 && mean[blocks - 2] > mean[blocks - 1]) {
      double tw = weight[blocks - 2] + weight[blocks - 1];
      mean[blocks - 2] = (weight[blocks - 2] * mean[blocks - 2] +
                          weight[blocks - 1] * mean[blocks - 1]) / tw;
      weight[blocks - 2] = tw;
      len[blocks - 2] += len[blocks - 1];
      --blocks;
    }
  }
  int k = 0;
  for (int b = 0; b < blocks; ++b)
    for (int j = 0; j < len[b]; ++j) y[k++] = mean[b];
}

CubicSpline::CubicSpline(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) : x_(x) {
  const int n = (int)x.size();
  if (n < 4) throw NumericError("CubicSpline: need at least 4 points");
  Eigen::ArrayXd h(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    h[i] = x[i + 1] - x[i];
    if (h[i] <= 0) throw NumericError("CubicSpline: grid not increasing");
  }
  // Solve for second derivatives m with not-a-knot end conditions.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int i = 1; i < n - 1; ++i) {
    A(i, i - 1) = h[i - 1];
    A(i, i) = 2.0 * (h[i - 1] + h[i]);
    A(i, i + 1) = h[i];
    rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
  }
  A(0, 0) = h[1];
  A(0, 1) = -(h[0] + h[1]);
  A(0, 2) = h[0];
  A(n - 1, n - 3) = h[n - 2];
  A(n - 1, n - 2) = -(h[n - 3] + h[n - 2]);
  A(n - 1, n - 1) = h[n - 3];
  Eigen::VectorXd m = A.partialPivLu().solve(rhs);

  a_.resize(n - 1);
  b_.resize(n - 1);
  c_.resize(n - 1);
  d_.resize(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    a_[i] = y[i];
    b_[i] = (y[i + 1] - y[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
    c_[i] = m[i] / 2.0;
    d_[i] = (m[i + 1] - m[i]) / (6.0 * h[i]);
  }
}

int CubicSpline::cell(double t) const {
  const int n = (int)x_.size();
  if (t <= x_[0]) return 0;
  if (t >= x_[n - 1]) return n - 2;
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    (x_[mid] <= t ? lo : hi) = mid;
  }
  return lo;
}

double CubicSpline::eval(double t) const {
  int i = cell(t);
  double dt = t - x_[i];
  return a_[i] + dt * (b_[i] + dt * (c_[i] + dt * d_[i]));
}

double CubicSpline::deriv(double t) const {
  int i = cell(t);
  double dt = t - x_[i];
  return b_[i] + dt * (2.0 * c_[i] + dt * 3.0 * d_[i]);
}

double CubicSpline::deriv2(double t) const {
  int i = cell(t);
  double dt = t - x_[i];
  return 2.0 * c_[i] + dt * 6.0 * d_[i];
}

}  // namespace brw
