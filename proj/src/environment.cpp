#include "brw/environment.hpp"

#include <cmath>
#include <limits>

namespace brw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2 = 0.69314718055994530942;

double box_muller(double u1, double u2) {
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace

struct EnvironmentModel::Impl {
  std::string name;

  virtual ~Impl() = default;
  virtual double kappa(double t, double theta) const = 0;
  virtual double d_kappa(double t, double theta) const = 0;
  virtual double d2_kappa(double t, double theta) const = 0;
  virtual double theta_max(double) const { return kInf; }
  virtual std::vector<double> time_breaks() const { return {}; }

  // Closed-form conjugates where available; <0,false> means use the generic path.
  virtual bool kappa_star_closed(double, double, double&, double&) const { return false; }

  virtual bool simulatable() const { return false; }
  virtual Offspring sample_offspring(double, const std::function<double()>&) const {
    throw DomainError("environment: variant does not support direct simulation");
  }
  virtual double sample_tilted_step(double, double, double, double) const {
    throw DomainError("environment: variant does not support spine sampling");
  }

  void check_domain(double t, double theta) const {
    if (t < 0.0 || t > 1.0) throw DomainError("environment: t outside [0,1]");
    if (theta < 0.0 || theta >= theta_max(t))
      throw DomainError("environment: theta outside domain D");
  }
};

namespace {

// kappa = kappa0 + theta^2 sigma_t^2 / 2, offspring 1-or-2 Gaussian children.
struct QuadraticImpl : EnvironmentModel::Impl {
  double kappa0;
  ScalarField sigma;

  double kappa(double t, double th) const override {
    check_domain(t, th);
    double s = sigma(t);
    return kappa0 + 0.5 * th * th * s * s;
  }
  double d_kappa(double t, double th) const override {
    check_domain(t, th);
    double s = sigma(t);
    return th * s * s;
  }
  double d2_kappa(double t, double th) const override {
    check_domain(t, th);
    double s = sigma(t);
    return s * s;
  }
  std::vector<double> time_breaks() const override { return sigma.breaks(); }
  bool kappa_star_closed(double t, double a, double& value, double& slope) const override {
    double s2 = sigma(t) * sigma(t);
    if (a <= 0.0) {  // sup over theta > 0 is attained in the limit theta -> 0
      value = -kappa0;
      slope = 0.0;
    } else {
      value = 0.5 * a * a / s2 - kappa0;
      slope = a / s2;
    }
    return true;
  }
  bool simulatable() const override { return true; }
  Offspring sample_offspring(double t, const std::function<double()>& uniform) const override {
    double s = sigma(t);
    double u0 = uniform();
    double g1 = box_muller(uniform(), uniform());
    double g2 = box_muller(uniform(), uniform());
    // mean count 2 - p = e^{kappa0}
    double p_one = 2.0 - std::exp(kappa0);
    if (u0 < p_one) return {s * g1};
    return {s * g1, s * g2};
  }
  double sample_tilted_step(double t, double phi, double u1, double u2) const override {
    double s = sigma(t);
    return phi * s * s + s * box_muller(u1, u2);
  }
};

// kappa = log 2 + log cosh(theta delta_t), two children at +-delta_t.
struct TwoPointImpl : EnvironmentModel::Impl {
  ScalarField delta;

  double kappa(double t, double th) const override {
    check_domain(t, th);
    double d = delta(t);
    double x = th * d;
    // log cosh without overflow
    double lc = std::abs(x) + std::log1p(std::exp(-2.0 * std::abs(x))) - kLog2;
    return kLog2 + lc;
  }
  double d_kappa(double t, double th) const override {
    check_domain(t, th);
    double d = delta(t);
    return d * std::tanh(th * d);
  }
  double d2_kappa(double t, double th) const override {
    check_domain(t, th);
    double d = delta(t);
    double c = std::cosh(th * d);
    return d * d / (c * c);
  }
  std::vector<double> time_breaks() const override { return delta.breaks(); }
  bool simulatable() const override { return true; }
  Offspring sample_offspring(double t, const std::function<double()>& uniform) const override {
    double d = delta(t);
    double u1 = uniform(), u2 = uniform();
    return {u1 < 0.5 ? -d : d, u2 < 0.5 ? -d : d};
  }
  double sample_tilted_step(double t, double phi, double u1, double /*u2*/) const override {
    // two-atom tilted law: P(+d) = e^{phi d} / (2 cosh(phi d))
    double d = delta(t);
    double pp = 1.0 / (1.0 + std::exp(-2.0 * phi * d));
    return u1 < pp ? d : -d;
  }
};

struct TabulatedImpl : EnvironmentModel::Impl {
  double th_max = 0.0;
  std::vector<CubicSpline> rows;  // one spline in theta per t-node
  int nt = 0;
  std::shared_ptr<const EnvironmentModel::Impl> generator;  // for spine sampling

  void locate(double t, int& i, double& w) const {
    double u = std::clamp(t, 0.0, 1.0) * (nt - 1);
    i = std::min((int)u, nt - 2);
    w = u - i;
  }
  double theta_max(double) const override { return th_max; }
  double kappa(double t, double th) const override {
    check_domain(t, th);
    int i;
    double w;
    locate(t, i, w);
    return (1.0 - w) * rows[i].eval(th) + w * rows[i + 1].eval(th);
  }
  double d_kappa(double t, double th) const override {
    check_domain(t, th);
    int i;
    double w;
    locate(t, i, w);
    return (1.0 - w) * rows[i].deriv(th) + w * rows[i + 1].deriv(th);
  }
  double d2_kappa(double t, double th) const override {
    check_domain(t, th);
    int i;
    double w;
    locate(t, i, w);
    return (1.0 - w) * rows[i].deriv2(th) + w * rows[i + 1].deriv2(th);
  }
  std::vector<double> time_breaks() const override {
    std::vector<double> b;
    for (int i = 1; i + 1 < nt; ++i) b.push_back((double)i / (nt - 1));
    return b;
  }
  bool simulatable() const override { return generator && generator->simulatable(); }
  Offspring sample_offspring(double t, const std::function<double()>& u) const override {
    if (!generator) throw DomainError("environment: table has no generating law");
    return generator->sample_offspring(t, u);
  }
  double sample_tilted_step(double t, double phi, double u1, double u2) const override {
    if (!generator) throw DomainError("environment: table has no generating law");
    return generator->sample_tilted_step(t, phi, u1, u2);
  }
};

void validate_supercritical(const EnvironmentModel::Impl& impl) {
  for (int i = 0; i <= 1000; ++i) {
    double t = i / 1000.0;
    if (!(impl.kappa(t, 0.0) > 0.0))
      throw DomainError("environment: kappa_t(0) <= 0, process not supercritical");
  }
}

}  // namespace

EnvironmentModel::EnvironmentModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

EnvironmentModel EnvironmentModel::gaussian_binary(ScalarField sigma) {
  return quadratic(kLog2, std::move(sigma));
}

EnvironmentModel EnvironmentModel::quadratic(double kappa0, ScalarField sigma) {
  if (kappa0 <= 0.0 || kappa0 > kLog2)
    throw DomainError("environment: quadratic kappa0 must lie in (0, log 2]");
  auto impl = std::make_shared<QuadraticImpl>();
  impl->name = kappa0 == kLog2 ? "gaussian_binary" : "quadratic";
  impl->kappa0 = kappa0;
  impl->sigma = std::move(sigma);
  validate_supercritical(*impl);
  return EnvironmentModel(impl);
}

EnvironmentModel EnvironmentModel::two_point(ScalarField delta) {
  auto impl = std::make_shared<TwoPointImpl>();
  impl->name = "two_point";
  impl->delta = std::move(delta);
  validate_supercritical(*impl);
  return EnvironmentModel(impl);
}

EnvironmentModel EnvironmentModel::tabulated(const Eigen::MatrixXd& values, double theta_max) {
  auto impl = std::make_shared<TabulatedImpl>();
  impl->name = "tabulated";
  impl->th_max = theta_max;
  impl->nt = (int)values.rows();
  if (impl->nt < 2 || values.cols() < 4)
    throw DomainError("environment: table needs >= 2 t-rows and >= 4 theta-columns");
  Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(values.cols(), 0.0, theta_max);
  for (int i = 0; i < impl->nt; ++i)
    impl->rows.emplace_back(grid, values.row(i).transpose().array());
  validate_supercritical(*impl);
  return EnvironmentModel(impl);
}

EnvironmentModel EnvironmentModel::tabulate(const EnvironmentModel& src, int nt, int ntheta,
                                            double theta_max) {
  Eigen::MatrixXd values(nt, ntheta);
  for (int i = 0; i < nt; ++i) {
    double t = (double)i / (nt - 1);
    for (int j = 0; j < ntheta; ++j)
      values(i, j) = src.kappa(t, theta_max * j / (ntheta - 1));
  }
  EnvironmentModel env = tabulated(values, theta_max);
  const_cast<TabulatedImpl*>(static_cast<const TabulatedImpl*>(env.impl_.get()))->generator =
      src.impl_;
  return env;
}

double EnvironmentModel::kappa(double t, double theta) const { return impl_->kappa(t, theta); }
double EnvironmentModel::d_kappa(double t, double theta) const {
  return impl_->d_kappa(t, theta);
}
double EnvironmentModel::d2_kappa(double t, double theta) const {
  return impl_->d2_kappa(t, theta);
}
double EnvironmentModel::theta_max(double t) const { return impl_->theta_max(t); }

double EnvironmentModel::kappa_star(double t, double a) const {
  double value, slope;
  if (impl_->kappa_star_closed(t, a, value, slope)) return value;

  if (a <= impl_->d_kappa(t, 0.0) + 1e-300) return -impl_->kappa(t, 0.0);
  // Newton on d_kappa(theta) = a over an expanding bracket.
  double hi = 1.0;
  double cap = impl_->theta_max(t);
  while (impl_->d_kappa(t, std::min(hi, cap * (1 - 1e-12))) < a) {
    hi *= 2.0;
    if (hi >= cap) {
      if (std::isinf(cap)) {
        if (hi > 1e12)
          throw DomainError("environment: kappa_star(a) = +inf (unbounded maximization)");
      } else {
        // slope saturates below a inside the table domain
        if (impl_->d_kappa(t, cap * (1 - 1e-9)) < a)
          throw DomainError("environment: kappa_star(a) = +inf (unbounded maximization)");
        hi = cap * (1 - 1e-9);
        break;
      }
    }
  }
  double th = bisect([&](double x) { return impl_->d_kappa(t, x) - a; }, 0.0,
                     std::min(hi, cap * (1 - 1e-12)), 1e-14);
  for (int i = 0; i < 4; ++i) {
    double g = impl_->d_kappa(t, th) - a;
    double dg = impl_->d2_kappa(t, th);
    if (dg <= 0) break;  // golden-section territory; bisect result stands
    double nxt = th - g / dg;
    if (nxt <= 0 || nxt >= cap) break;
    th = nxt;
  }
  return th * a - impl_->kappa(t, th);
}

double EnvironmentModel::d_kappa_star(double t, double a) const {
  double value, slope;
  if (impl_->kappa_star_closed(t, a, value, slope)) return slope;
  if (a <= impl_->d_kappa(t, 0.0) + 1e-300) return 0.0;
  double hi = 1.0;
  double cap = impl_->theta_max(t);
  while (impl_->d_kappa(t, std::min(hi, cap * (1 - 1e-12))) < a && hi < cap) hi *= 2.0;
  return bisect([&](double x) { return impl_->d_kappa(t, x) - a; }, 0.0,
                std::min(hi, cap * (1 - 1e-12)), 1e-14);
}

NaturalSpeed EnvironmentModel::natural_speed(double t) const {
  if (!(impl_->kappa(t, 0.0) > 0.0))
    throw DomainError("environment: not supercritical at t");
  auto energy = [&](double th) { return th * impl_->d_kappa(t, th) - impl_->kappa(t, th); };
  double cap = impl_->theta_max(t);
  double hi = 1.0;
  while (energy(std::min(hi, cap * (1 - 1e-12))) < 0.0) {
    hi *= 2.0;
    if (hi >= cap && energy(cap * (1 - 1e-9)) < 0.0)
      throw BracketError("natural_speed: domain truncates before the zero crossing");
    if (hi > 1e12) throw BracketError("natural_speed: no zero crossing found");
  }
  double theta_bar = bisect(energy, 0.0, std::min(hi, cap * (1 - 1e-12)), 1e-14);
  theta_bar = newton_polish(
      energy, [&](double th) { return th * impl_->d2_kappa(t, th); }, theta_bar, 0.0,
      std::min(hi, cap));
  return {impl_->d_kappa(t, theta_bar), theta_bar};
}

const std::string& EnvironmentModel::variant() const { return impl_->name; }
std::vector<double> EnvironmentModel::time_breaks() const { return impl_->time_breaks(); }
bool EnvironmentModel::supports_simulation() const { return impl_->simulatable(); }

Offspring EnvironmentModel::sample_offspring(double t,
                                             const std::function<double()>& uniform) const {
  return impl_->sample_offspring(t, uniform);
}

double EnvironmentModel::sample_tilted_step(double t, double phi, double u1, double u2) const {
  return impl_->sample_tilted_step(t, phi, u1, u2);
}

}  // namespace brw
