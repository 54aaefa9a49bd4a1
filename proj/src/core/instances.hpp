#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/geometry.hpp"

namespace ob {

enum class Family { norm_distance, quadratic, even_power, linear, threshold };

const char* family_name(Family f);

// Convex objective from one of five closed-form families on a fixed domain:
//   norm_distance  scale * |x - theta|_2
//   quadratic      0.5 * |x - theta|_2^2
//   even_power     (x - theta)^m, dim 1, m in {2,4,6,8}
//   linear         sign * <slope, x>
//   threshold      |x - theta|, dim 1
class Instance {
 public:
  static Instance norm_distance(Domain d, Vec theta, double scale);
  static Instance quadratic(Domain d, Vec theta);
  static Instance even_power(Domain d, double theta, int power);
  static Instance linear(Domain d, Vec slope, int sign);
  static Instance threshold(Domain d, double theta);

  Family family() const { return family_; }
  const Domain& domain() const { return domain_; }
  const Vec& theta() const { return theta_; }
  double scale() const { return scale_; }
  int power() const { return power_; }
  int sign() const { return sign_; }
  const Vec& slope() const { return slope_; }

  double value(ConstSpan x) const;     // domain-checked
  Vec subgradient(ConstSpan x) const;  // domain-checked; kinks resolve to 0
  void subgradient_into(ConstSpan x, Vec& g) const;
  double min_value() const;
  Vec minimizer() const;
  // Supremum of the subgradient norm over the domain.
  double lipschitz_bound() const;

 private:
  Instance(Family f, Domain d) : family_(f), domain_(std::move(d)) {}

  Family family_;
  Domain domain_;
  Vec theta_;
  double scale_ = 1.0;
  int power_ = 2;
  int sign_ = 1;
  Vec slope_;
};

// Certified pairwise separation: the closed form of
// inf_x [f(x) + g(x)] - f* - g* within one family. Any two instances with
// separation >= 2*eps exclude each other's eps-minimizers.
double separation(const Instance& a, const Instance& b);

// Grid minimization of the same infimum; dim-1 test oracle.
double separation_by_grid(const Instance& a, const Instance& b, int points);

// Hypothesis set with certified minimum pairwise separation.
struct Ensemble {
  std::vector<Instance> instances;
  Domain domain;
  Family family;
  double separation = 0.0;
  std::optional<double> common_min;  // set when all instances share a min value
  std::string tag;

  int size() const { return int(instances.size()); }
  const Instance& at(int i) const { return instances.at(size_t(i)); }
};

// Two quadratics on [0,1] with minimizers 1/2 -+ sqrt(2*eps); requires
// 0 < eps < 1/8 so both minimizers are interior. Separation is exactly 2*eps.
Ensemble make_sec41_pair(double eps);

// Norm-distance cone ensemble on box(dim, rho) with centers on a sign-vector
// packing, scaled so pairwise separation >= 2*eps^(1/r).
// Requires dim >= 16 and eps <= (rho*sqrt(dim/8))^r.
Ensemble make_thm2_ensemble(int dim, double rho, double r, double eps, uint64_t packing_seed);

// Quadratic ensemble on box(dim, rho) with centers sqrt(16*eps^(1/r)/dim)*xi_i;
// pairwise separation >= 2*eps^(1/r). Requires dim >= 16 and
// eps <= (dim*rho^2/16)^r.
Ensemble make_thm3_ensemble(int dim, double rho, double r, double eps, uint64_t packing_seed);

// Linear pair +-<xi, x> on box(dim, 1) with xi = (eps/dim, ..., eps/dim).
Ensemble make_thm4_pair(int dim, double eps);

// Quadratics centered on a lattice packing of the domain.
Ensemble make_thm5_ensemble(const Domain& dom, double sep);

// Even-power pair (x -+ eps^(1/2m))^m on [-1,1]; separation 2*sqrt(eps).
Ensemble make_thm6_pair(int power, double eps);

// Convenience pairs on a caller-supplied interval and grids on [0,1].
Ensemble make_quad_pair(const Domain& dom, double theta0, double theta1);
Ensemble make_norm_pair(const Domain& dom, double theta0, double theta1, double scale);
Ensemble make_threshold_grid(double sep);

}  // namespace ob
