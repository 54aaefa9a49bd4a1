#include "core/instances.hpp"

#include <algorithm>

namespace ob {

const char* family_name(Family f) {
  switch (f) {
    case Family::norm_distance: return "norm_distance";
    case Family::quadratic: return "quadratic";
    case Family::even_power: return "even_power";
    case Family::linear: return "linear";
    case Family::threshold: return "threshold";
  }
  return "?";
}

namespace {

void check_theta(const Domain& d, const Vec& theta, const char* who) {
  require(theta.size() == size_t(d.dim()), Err::invalid_argument,
          std::string(who) + ": theta size == domain dim");
  require(d.contains(theta), Err::precondition, std::string(who) + ": theta inside the domain");
}

}  // namespace

Instance Instance::norm_distance(Domain d, Vec theta, double scale) {
  check_theta(d, theta, "norm_distance");
  require(scale > 0.0 && std::isfinite(scale), Err::invalid_argument, "norm_distance: scale > 0");
  Instance f(Family::norm_distance, std::move(d));
  f.theta_ = std::move(theta);
  f.scale_ = scale;
  return f;
}

Instance Instance::quadratic(Domain d, Vec theta) {
  check_theta(d, theta, "quadratic");
  Instance f(Family::quadratic, std::move(d));
  f.theta_ = std::move(theta);
  return f;
}

Instance Instance::even_power(Domain d, double theta, int power) {
  require(d.dim() == 1, Err::invalid_argument, "even_power: dim-1 domains only");
  require(power == 2 || power == 4 || power == 6 || power == 8, Err::invalid_argument,
          "even_power: power in {2, 4, 6, 8}");
  check_theta(d, Vec{theta}, "even_power");
  Instance f(Family::even_power, std::move(d));
  f.theta_ = Vec{theta};
  f.power_ = power;
  return f;
}

Instance Instance::linear(Domain d, Vec slope, int sign) {
  require(slope.size() == size_t(d.dim()), Err::invalid_argument, "linear: slope size == domain dim");
  require(sign == 1 || sign == -1, Err::invalid_argument, "linear: sign in {-1, +1}");
  Instance f(Family::linear, std::move(d));
  f.slope_ = std::move(slope);
  f.sign_ = sign;
  return f;
}

Instance Instance::threshold(Domain d, double theta) {
  require(d.dim() == 1, Err::invalid_argument, "threshold: dim-1 domains only");
  check_theta(d, Vec{theta}, "threshold");
  Instance f(Family::threshold, std::move(d));
  f.theta_ = Vec{theta};
  return f;
}

double Instance::value(ConstSpan x) const {
  require(domain_.contains(x), Err::domain_violation, "Instance::value: x outside the domain");
  switch (family_) {
    case Family::norm_distance: return scale_ * dist2(x, theta_);
    case Family::quadratic: return 0.5 * dist_sq(x, theta_);
    case Family::even_power: return ipow(x[0] - theta_[0], power_);
    case Family::linear: return double(sign_) * dot(slope_, x);
    case Family::threshold: return std::fabs(x[0] - theta_[0]);
  }
  fail(Err::internal, "Instance::value: bad family");
}

Vec Instance::subgradient(ConstSpan x) const {
  Vec g;
  subgradient_into(x, g);
  return g;
}

void Instance::subgradient_into(ConstSpan x, Vec& g) const {
  require(domain_.contains(x), Err::domain_violation, "Instance::subgradient: x outside the domain");
  const int n = domain_.dim();
  g.assign(size_t(n), 0.0);
  switch (family_) {
    case Family::norm_distance: {
      double d = dist2(x, theta_);
      if (d == 0.0) return;  // kink: 0 is a valid subgradient
      for (int i = 0; i < n; ++i) g[size_t(i)] = scale_ * (x[i] - theta_[size_t(i)]) / d;
      return;
    }
    case Family::quadratic: {
      for (int i = 0; i < n; ++i) g[size_t(i)] = x[i] - theta_[size_t(i)];
      return;
    }
    case Family::even_power: {
      g[0] = double(power_) * ipow(x[0] - theta_[0], power_ - 1);
      return;
    }
    case Family::linear: {
      for (int i = 0; i < n; ++i) g[size_t(i)] = double(sign_) * slope_[size_t(i)];
      return;
    }
    case Family::threshold: {
      double d = x[0] - theta_[0];
      g[0] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
      return;
    }
  }
  fail(Err::internal, "Instance::subgradient: bad family");
}

Vec Instance::minimizer() const {
  switch (family_) {
    case Family::norm_distance:
    case Family::quadratic:
    case Family::even_power:
    case Family::threshold:
      return theta_;
    case Family::linear: {
      const int n = domain_.dim();
      const Vec& c = domain_.center();
      Vec x(c);
      if (domain_.kind() == DomainKind::box) {
        for (int i = 0; i < n; ++i) {
          double v = double(sign_) * slope_[size_t(i)];
          if (v > 0.0)
            x[size_t(i)] = c[size_t(i)] - domain_.radius();
          else if (v < 0.0)
            x[size_t(i)] = c[size_t(i)] + domain_.radius();
        }
        return x;
      }
      double nn = norm2(slope_);
      if (nn == 0.0) return x;
      for (int i = 0; i < n; ++i)
        x[size_t(i)] = c[size_t(i)] - domain_.radius() * double(sign_) * slope_[size_t(i)] / nn;
      return x;
    }
  }
  fail(Err::internal, "Instance::minimizer: bad family");
}

double Instance::min_value() const {
  switch (family_) {
    case Family::norm_distance:
    case Family::quadratic:
    case Family::even_power:
    case Family::threshold:
      return 0.0;
    case Family::linear: {
      Vec x = minimizer();
      return double(sign_) * dot(slope_, x);
    }
  }
  fail(Err::internal, "Instance::min_value: bad family");
}

double Instance::lipschitz_bound() const {
  const int n = domain_.dim();
  switch (family_) {
    case Family::norm_distance: return scale_;
    case Family::threshold: return 1.0;
    case Family::linear: return norm2(slope_);
    case Family::quadratic: {
      if (domain_.kind() == DomainKind::box) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
          double d = std::fabs(domain_.center()[size_t(i)] - theta_[size_t(i)]) + domain_.radius();
          s += d * d;
        }
        return std::sqrt(s);
      }
      return dist2(domain_.center(), theta_) + domain_.radius();
    }
    case Family::even_power: {
      double reach = std::max(std::fabs(domain_.lower(0) - theta_[0]), std::fabs(domain_.upper(0) - theta_[0]));
      return double(power_) * ipow(reach, power_ - 1);
    }
  }
  fail(Err::internal, "Instance::lipschitz_bound: bad family");
}

double separation(const Instance& a, const Instance& b) {
  require(a.family() == b.family(), Err::incompatible, "separation: same family required");
  require(a.domain().same_as(b.domain()), Err::incompatible, "separation: same domain required");
  switch (a.family()) {
    case Family::norm_distance:
      return std::min(a.scale(), b.scale()) * dist2(a.theta(), b.theta());
    case Family::quadratic:
      return 0.25 * dist_sq(a.theta(), b.theta());
    case Family::even_power: {
      require(a.power() == b.power(), Err::incompatible, "separation: same power required");
      double d = std::fabs(a.theta()[0] - b.theta()[0]);
      return 2.0 * ipow(d / 2.0, a.power());
    }
    case Family::threshold:
      return std::fabs(a.theta()[0] - b.theta()[0]);
    case Family::linear: {
      const Domain& dom = a.domain();
      const int n = dom.dim();
      Vec v(size_t(n), 0.0);
      for (int i = 0; i < n; ++i)
        v[size_t(i)] = double(a.sign()) * a.slope()[size_t(i)] + double(b.sign()) * b.slope()[size_t(i)];
      double inf_sum = dot(v, dom.center()) -
                       dom.radius() * (dom.kind() == DomainKind::box ? norm1(v) : norm2(v));
      return inf_sum - a.min_value() - b.min_value();
    }
  }
  fail(Err::internal, "separation: bad family");
}

double separation_by_grid(const Instance& a, const Instance& b, int points) {
  require(a.domain().dim() == 1, Err::unsupported, "separation_by_grid: dim-1 only");
  require(a.domain().same_as(b.domain()), Err::incompatible, "separation_by_grid: same domain required");
  require(points >= 2, Err::invalid_argument, "separation_by_grid: points >= 2");
  double lo = a.domain().lower(0), hi = a.domain().upper(0);
  double best = kInf;
  for (int i = 0; i < points; ++i) {
    double x = lo + (hi - lo) * double(i) / double(points - 1);
    Vec xs{x};
    best = std::min(best, a.value(xs) + b.value(xs));
  }
  return best - a.min_value() - b.min_value();
}

namespace {

double min_pairwise_separation(const std::vector<Instance>& fs) {
  double m = kInf;
  for (size_t i = 0; i < fs.size(); ++i)
    for (size_t j = i + 1; j < fs.size(); ++j) m = std::min(m, separation(fs[i], fs[j]));
  return m;
}

}  // namespace

Ensemble make_sec41_pair(double eps) {
  require(eps > 0.0 && eps < 0.125, Err::precondition, "sec41 pair: epsilon in (0, 1/8)");
  Domain dom = Domain::interval(0.0, 1.0);
  double off = std::sqrt(2.0 * eps);
  std::vector<Instance> fs;
  fs.push_back(Instance::quadratic(dom, Vec{0.5 - off}));
  fs.push_back(Instance::quadratic(dom, Vec{0.5 + off}));
  Ensemble e{std::move(fs), dom, Family::quadratic, 0.0, 0.0, "sec41"};
  e.separation = min_pairwise_separation(e.instances);
  return e;
}

Ensemble make_thm2_ensemble(int dim, double rho, double r, double eps, uint64_t packing_seed) {
  require(dim >= 16, Err::precondition, "thm2 ensemble: dim >= 16");
  require(rho > 0.0, Err::invalid_argument, "thm2 ensemble: rho > 0");
  require(r >= 1.0, Err::precondition, "thm2 ensemble: r >= 1");
  double cap = std::pow(rho * std::sqrt(double(dim) / 8.0), r);
  require(eps > 0.0 && eps <= cap, Err::precondition,
          "thm2 ensemble: epsilon in (0, (rho*sqrt(dim/8))^r], got " + num_str(eps));
  Domain dom = Domain::box(dim, rho);
  PackingSet pk = vg_packing(dim, packing_seed);
  double e1r = std::pow(eps, 1.0 / r);
  double scale = (e1r / rho) * std::sqrt(8.0 / double(dim));
  std::vector<Instance> fs;
  fs.reserve(pk.points.size());
  for (const Vec& xi : pk.points) {
    Vec th(xi);
    for (double& v : th) v *= rho;
    fs.push_back(Instance::norm_distance(dom, std::move(th), scale));
  }
  Ensemble e{std::move(fs), dom, Family::norm_distance, 0.0, 0.0, "thm2"};
  e.separation = min_pairwise_separation(e.instances);
  return e;
}

Ensemble make_thm3_ensemble(int dim, double rho, double r, double eps, uint64_t packing_seed) {
  require(dim >= 16, Err::precondition, "thm3 ensemble: dim >= 16");
  require(rho > 0.0, Err::invalid_argument, "thm3 ensemble: rho > 0");
  require(r >= 1.0, Err::precondition, "thm3 ensemble: r >= 1");
  double cap = std::pow(double(dim) * rho * rho / 16.0, r);
  require(eps > 0.0 && eps <= cap, Err::precondition,
          "thm3 ensemble: epsilon in (0, (dim*rho^2/16)^r], got " + num_str(eps));
  Domain dom = Domain::box(dim, rho);
  PackingSet pk = vg_packing(dim, packing_seed);
  double e1r = std::pow(eps, 1.0 / r);
  double coord = std::sqrt(16.0 * e1r / double(dim));
  std::vector<Instance> fs;
  fs.reserve(pk.points.size());
  for (const Vec& xi : pk.points) {
    Vec th(xi);
    for (double& v : th) v *= coord;
    fs.push_back(Instance::quadratic(dom, std::move(th)));
  }
  Ensemble e{std::move(fs), dom, Family::quadratic, 0.0, 0.0, "thm3"};
  e.separation = min_pairwise_separation(e.instances);
  return e;
}

Ensemble make_thm4_pair(int dim, double eps) {
  require(dim >= 1, Err::invalid_argument, "thm4 pair: dim >= 1");
  require(eps > 0.0, Err::precondition, "thm4 pair: epsilon > 0");
  Domain dom = Domain::box(dim, 1.0);
  Vec xi(size_t(dim), eps / double(dim));
  std::vector<Instance> fs;
  fs.push_back(Instance::linear(dom, xi, 1));
  fs.push_back(Instance::linear(dom, xi, -1));
  Ensemble e{std::move(fs), dom, Family::linear, 0.0, std::nullopt, "thm4"};
  e.separation = min_pairwise_separation(e.instances);
  if (e.instances[0].min_value() == e.instances[1].min_value())
    e.common_min = e.instances[0].min_value();
  return e;
}

Ensemble make_thm5_ensemble(const Domain& dom, double sep) {
  PackingSet pk = lattice_packing(dom, sep);
  require(pk.points.size() <= 10000, Err::invalid_argument,
          "thm5 ensemble: lattice exceeds 1e4 instances");
  std::vector<Instance> fs;
  fs.reserve(pk.points.size());
  for (const Vec& p : pk.points) fs.push_back(Instance::quadratic(dom, p));
  Ensemble e{std::move(fs), dom, Family::quadratic, 0.0, 0.0, "thm5"};
  e.separation = 0.25 * pk.min_sq_dist;
  return e;
}

Ensemble make_thm6_pair(int power, double eps) {
  require(eps > 0.0 && eps < 1.0, Err::precondition, "thm6 pair: epsilon in (0, 1)");
  Domain dom = Domain::interval(-1.0, 1.0);
  double off = std::pow(eps, 1.0 / double(2 * power));
  std::vector<Instance> fs;
  fs.push_back(Instance::even_power(dom, -off, power));
  fs.push_back(Instance::even_power(dom, +off, power));
  Ensemble e{std::move(fs), dom, Family::even_power, 0.0, 0.0, "thm6"};
  e.separation = min_pairwise_separation(e.instances);
  return e;
}

Ensemble make_quad_pair(const Domain& dom, double theta0, double theta1) {
  require(theta0 != theta1, Err::invalid_argument, "quad pair: distinct centers");
  require(dom.dim() == 1, Err::invalid_argument, "quad pair: interval domain");
  require(dom.contains(Vec{theta0}) && dom.contains(Vec{theta1}), Err::domain_violation,
          "quad pair: centers inside the domain");
  std::vector<Instance> fs;
  fs.push_back(Instance::quadratic(dom, Vec{theta0}));
  fs.push_back(Instance::quadratic(dom, Vec{theta1}));
  Ensemble e{std::move(fs), dom, Family::quadratic, 0.0, 0.0, "quad_pair"};
  e.separation = min_pairwise_separation(e.instances);
  return e;
}

Ensemble make_norm_pair(const Domain& dom, double theta0, double theta1, double scale) {
  require(theta0 != theta1, Err::invalid_argument, "norm pair: distinct centers");
  require(dom.dim() == 1, Err::invalid_argument, "norm pair: interval domain");
  require(dom.contains(Vec{theta0}) && dom.contains(Vec{theta1}), Err::domain_violation,
          "norm pair: centers inside the domain");
  std::vector<Instance> fs;
  fs.push_back(Instance::norm_distance(dom, Vec{theta0}, scale));
  fs.push_back(Instance::norm_distance(dom, Vec{theta1}, scale));
  Ensemble e{std::move(fs), dom, Family::norm_distance, 0.0, 0.0, "norm_pair"};
  e.separation = min_pairwise_separation(e.instances);
  return e;
}

Ensemble make_threshold_grid(double sep) {
  Domain dom = Domain::interval(0.0, 1.0);
  PackingSet pk = lattice_packing(dom, sep);
  std::vector<Instance> fs;
  fs.reserve(pk.points.size());
  for (const Vec& p : pk.points) fs.push_back(Instance::threshold(dom, p[0]));
  Ensemble e{std::move(fs), dom, Family::threshold, 0.0, 0.0, "threshold_grid"};
  e.separation = min_pairwise_separation(e.instances);
  return e;
}

}  // namespace ob
