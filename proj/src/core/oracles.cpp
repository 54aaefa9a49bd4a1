#include "core/oracles.hpp"

#include <algorithm>

namespace ob {

const char* oracle_kind_name(OracleKind k) {
  switch (k) {
    case OracleKind::noiseless_first_order: return "noiseless_first_order";
    case OracleKind::first_order_gaussian: return "first_order_gaussian";
    case OracleKind::grad_gaussian: return "grad_gaussian";
    case OracleKind::moment_bounded: return "moment_bounded";
    case OracleKind::bernoulli_label: return "bernoulli_label";
    case OracleKind::stat_estimation: return "stat_estimation";
  }
  return "?";
}

Oracle Oracle::noiseless() { return Oracle(OracleKind::noiseless_first_order); }

Oracle Oracle::first_order_gaussian(double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), Err::invalid_argument,
          "first_order_gaussian: sigma > 0");
  Oracle o(OracleKind::first_order_gaussian);
  o.sigma_ = sigma;
  return o;
}

Oracle Oracle::grad_gaussian(double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), Err::invalid_argument, "grad_gaussian: sigma > 0");
  Oracle o(OracleKind::grad_gaussian);
  o.sigma_ = sigma;
  return o;
}

Oracle Oracle::moment_bounded(double alpha, double c, double eps) {
  require(alpha > 1.0, Err::precondition, "moment_bounded: alpha > 1");
  require(c > 0.0, Err::invalid_argument, "moment_bounded: c > 0");
  // Unit Lipschitz budget: c^(1-alpha) < min{L^alpha/2, 1} with L = 1.
  require(std::pow(c, 1.0 - alpha) < 0.5, Err::precondition,
          "moment_bounded: c^(1-alpha) < min{L^alpha/2, 1} with L = 1");
  require(eps > 0.0, Err::invalid_argument, "moment_bounded: eps > 0");
  double p = c * std::pow(eps, alpha / (alpha - 1.0));
  require(p > 0.0 && p <= 1.0, Err::precondition,
          "moment_bounded: mixture probability c*eps^(alpha/(alpha-1)) in (0, 1], got " + num_str(p));
  Oracle o(OracleKind::moment_bounded);
  o.alpha_ = alpha;
  o.c_ = c;
  o.p_ = p;
  return o;
}

Oracle Oracle::bernoulli_label(double kappa, double c_lo, double c_hi) {
  require(kappa >= 1.0, Err::precondition, "bernoulli_label: kappa >= 1");
  require(0.0 < c_lo && c_lo < c_hi && c_hi < 0.5, Err::precondition,
          "bernoulli_label: 0 < c < C < 1/2");
  Oracle o(OracleKind::bernoulli_label);
  o.kappa_ = kappa;
  o.c_lo_ = c_lo;
  o.c_hi_ = c_hi;
  return o;
}

Oracle Oracle::stat_estimation(double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), Err::invalid_argument, "stat_estimation: sigma > 0");
  Oracle o(OracleKind::stat_estimation);
  o.sigma_ = sigma;
  return o;
}

double Oracle::label_mean(const Instance& f, double x) const {
  require(kind_ == OracleKind::bernoulli_label, Err::unsupported,
          "label_mean: bernoulli_label oracles only");
  require(f.domain().dim() == 1, Err::unsupported, "label_mean: dim-1 instances only");
  double theta = f.minimizer()[0];
  double d = x - theta;
  if (d == 0.0) return 0.5;
  double sgn = d > 0.0 ? 1.0 : -1.0;
  double env = c_hi_ * std::pow(std::fabs(d), kappa_ - 1.0);
  return std::clamp(0.5 + sgn * env, 0.0, 1.0);
}

Response Oracle::sample(const Instance& f, ConstSpan x, CounterRng& rng) const {
  Response r;
  sample_into(f, x, rng, r);
  return r;
}

namespace {
// Returns a reference to the T alternative, reusing its buffers if already held.
template <class T>
T& as_alt(Response& r) {
  if (T* p = std::get_if<T>(&r)) return *p;
  r.emplace<T>();
  return std::get<T>(r);
}
}  // namespace

void Oracle::sample_into(const Instance& f, ConstSpan x, CounterRng& rng, Response& out) const {
  switch (kind_) {
    case OracleKind::noiseless_first_order: {
      FirstOrder& fo = as_alt<FirstOrder>(out);
      fo.value = f.value(x);
      f.subgradient_into(x, fo.grad);
      return;
    }
    case OracleKind::first_order_gaussian: {
      FirstOrder& fo = as_alt<FirstOrder>(out);
      fo.value = f.value(x) + sigma_ * rng.next_gaussian();
      f.subgradient_into(x, fo.grad);
      for (double& gi : fo.grad) gi += sigma_ * rng.next_gaussian();
      return;
    }
    case OracleKind::grad_gaussian: {
      GradOnly& go = as_alt<GradOnly>(out);
      f.subgradient_into(x, go.grad);
      for (double& gi : go.grad) gi += sigma_ * rng.next_gaussian();
      return;
    }
    case OracleKind::moment_bounded: {
      require(f.family() == Family::linear, Err::unsupported,
              "moment_bounded: restricted to the linear pair construction");
      FirstOrder& fo = as_alt<FirstOrder>(out);
      if (rng.next_unit() < p_) {
        fo.value = f.value(x) / p_;
        f.subgradient_into(x, fo.grad);
        for (double& gi : fo.grad) gi /= p_;
      } else {
        fo.value = 0.0;
        fo.grad.assign(x.size(), 0.0);
      }
      return;
    }
    case OracleKind::bernoulli_label: {
      double eta = label_mean(f, x[0]);
      as_alt<Label>(out).y = rng.next_unit() < eta ? +1 : -1;
      return;
    }
    case OracleKind::stat_estimation: {
      RawSample& rs = as_alt<RawSample>(out);
      const Vec m = f.minimizer();
      rs.y.assign(m.begin(), m.end());
      for (double& yi : rs.y) yi += sigma_ * rng.next_gaussian();
      return;
    }
  }
  fail(Err::internal, "Oracle::sample: bad kind");
}

double Oracle::response_kl(const Instance& a, const Instance& b, ConstSpan x) const {
  require(a.domain().same_as(b.domain()), Err::incompatible, "response_kl: same domain required");
  switch (kind_) {
    case OracleKind::noiseless_first_order: {
      double dv = a.value(x) - b.value(x);
      Vec ga = a.subgradient(x), gb = b.subgradient(x);
      return (dv == 0.0 && dist_sq(ga, gb) == 0.0) ? 0.0 : kInf;
    }
    case OracleKind::first_order_gaussian: {
      double dv = a.value(x) - b.value(x);
      Vec ga = a.subgradient(x), gb = b.subgradient(x);
      return (dv * dv + dist_sq(ga, gb)) / (2.0 * sigma_ * sigma_);
    }
    case OracleKind::grad_gaussian: {
      Vec ga = a.subgradient(x), gb = b.subgradient(x);
      return dist_sq(ga, gb) / (2.0 * sigma_ * sigma_);
    }
    case OracleKind::moment_bounded:
      fail(Err::unsupported, "response_kl: undefined for the moment_bounded oracle");
    case OracleKind::bernoulli_label:
      return kl_bernoulli(label_mean(a, x[0]), label_mean(b, x[0]));
    case OracleKind::stat_estimation:
      return dist_sq(a.minimizer(), b.minimizer()) / (2.0 * sigma_ * sigma_);
  }
  fail(Err::internal, "Oracle::response_kl: bad kind");
}

bool Oracle::supports_lf() const {
  return kind_ == OracleKind::first_order_gaussian || kind_ == OracleKind::grad_gaussian ||
         kind_ == OracleKind::bernoulli_label;
}

double Oracle::lf_term(const Instance& f, ConstSpan x, double common_min) const {
  switch (kind_) {
    case OracleKind::first_order_gaussian: {
      double dv = f.value(x) - common_min;
      return (dv * dv + norm_sq(f.subgradient(x))) / (2.0 * sigma_ * sigma_);
    }
    case OracleKind::grad_gaussian:
      return norm_sq(f.subgradient(x)) / (2.0 * sigma_ * sigma_);
    case OracleKind::bernoulli_label:
      return kl_bernoulli(label_mean(f, x[0]), 0.5);
    default:
      fail(Err::unsupported, std::string("lf_term: unsupported oracle kind ") + oracle_kind_name(kind_));
  }
}

}  // namespace ob
