#pragma once

#include <string>
#include <vector>

#include "core/common.hpp"

namespace ob {

enum class DomainKind { box, ball };

// Feasible set: an l-inf box or an l2 ball, with an optional center offset.
// Dim-1 intervals are boxes with an offset center.
class Domain {
 public:
  static Domain box(int dim, double radius);
  static Domain box(int dim, double radius, Vec center);
  static Domain ball(int dim, double radius);
  static Domain ball(int dim, double radius, Vec center);
  static Domain interval(double lo, double hi);

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double radius() const { return radius_; }
  const Vec& center() const { return center_; }

  // l2 diameter: box 2*radius*sqrt(dim), ball 2*radius.
  double diameter() const;
  // Half-side of the largest axis-aligned cube the set contains (up to
  // translation): box radius, ball radius/sqrt(dim).
  double inscribed_scale() const;
  bool contains(ConstSpan x, double tol = kContainTol) const;
  Vec project(ConstSpan x) const;
  void project_inplace(Vec& x) const;
  double lower(int axis) const;  // box only
  double upper(int axis) const;  // box only
  bool same_as(const Domain& other) const;

  static constexpr double kContainTol = 1e-9;

 private:
  Domain(DomainKind k, int dim, double radius, Vec center);

  DomainKind kind_;
  int dim_;
  double radius_;
  Vec center_;
};

// Finite point set with a certified minimum pairwise squared l2 distance.
struct PackingSet {
  std::vector<Vec> points;
  double min_sq_dist = 0.0;
  std::string meta;
};

// Sign-vector packing: ceil(2^(dim/8)) + 1 points of {-1,+1}^dim with pairwise
// Hamming distance >= ceil(dim/8), built by randomized greedy search
// (up to 1e6 draws per restart, 10 restarts). Requires dim >= 16.
PackingSet vg_packing(int dim, uint64_t seed);

// Axis-aligned grid with spacing sep, anchored at the box lower corner and
// clipped to the domain. Falls back to one antipodal pair through the center
// when the grid keeps fewer than two points and the pair fits.
PackingSet lattice_packing(const Domain& dom, double sep);

// Volume of the unit l2 ball: pi^(n/2) / Gamma(n/2 + 1).
double unit_ball_volume(int dim);

// Exhaustive minimum pairwise squared distance; test helper.
double min_pairwise_sq_dist(const std::vector<Vec>& pts);

}  // namespace ob
