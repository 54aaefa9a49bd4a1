#pragma once

#include <variant>

#include "core/instances.hpp"
#include "core/rng.hpp"

namespace ob {

enum class OracleKind {
  noiseless_first_order,
  first_order_gaussian,
  grad_gaussian,
  moment_bounded,
  bernoulli_label,
  stat_estimation,
};

const char* oracle_kind_name(OracleKind k);

struct FirstOrder {
  double value;
  Vec grad;
};
struct GradOnly {
  Vec grad;
};
struct Label {
  int y;  // +1 or -1
};
struct RawSample {
  Vec y;
};
using Response = std::variant<FirstOrder, GradOnly, Label, RawSample>;

// Stochastic oracle: a response law P(.|f, x) per instance and query point,
// with closed-form response KL divergences where they exist.
class Oracle {
 public:
  static Oracle noiseless();
  // Value and every gradient coordinate perturbed by iid N(0, sigma^2);
  // draw order is value first, then gradient coordinates.
  static Oracle first_order_gaussian(double sigma);
  static Oracle grad_gaussian(double sigma);
  // Mixture response: (0,0) w.p. 1-p, else (f, grad)/p with
  // p = c * eps^(alpha/(alpha-1)). Restricted to the linear pair construction.
  static Oracle moment_bounded(double alpha, double c, double eps);
  // Label +-1 with mean 2*eta(x)-1, eta(x) = clamp(1/2 + sgn(x-theta)*
  // c_hi*|x-theta|^(kappa-1), 0, 1); theta is the instance minimizer.
  static Oracle bernoulli_label(double kappa, double c_lo, double c_hi);
  // Draws minimizer + N(0, sigma^2 I), ignoring the query point.
  static Oracle stat_estimation(double sigma);

  OracleKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  double alpha() const { return alpha_; }
  double cconst() const { return c_; }
  double mix_prob() const { return p_; }
  double kappa() const { return kappa_; }
  double c_lo() const { return c_lo_; }
  double c_hi() const { return c_hi_; }

  Response sample(const Instance& f, ConstSpan x, CounterRng& rng) const;
  // Draws into out, reusing its buffers; same law and rng consumption as sample.
  void sample_into(const Instance& f, ConstSpan x, CounterRng& rng, Response& out) const;

  // KL(P(.|a, x) || P(.|b, x)) in nats; may be +inf. Errors for the
  // moment-bounded oracle, whose response KL is not exposed.
  double response_kl(const Instance& a, const Instance& b, ConstSpan x) const;

  // Bernoulli label mean eta(x); bernoulli_label oracles on dim-1 instances.
  double label_mean(const Instance& f, double x) const;

  // Per-step likelihood-free divergence D(P(.|f, x) || Q*) against the
  // response law at an exact minimizer with value common_min.
  double lf_term(const Instance& f, ConstSpan x, double common_min) const;
  bool supports_lf() const;

 private:
  explicit Oracle(OracleKind k) : kind_(k) {}

  OracleKind kind_;
  double sigma_ = 0.0;
  double alpha_ = 0.0, c_ = 0.0, p_ = 0.0;
  double kappa_ = 1.0, c_lo_ = 0.0, c_hi_ = 0.0;
};

}  // namespace ob
