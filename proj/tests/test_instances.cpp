#include <cmath>

#include "core/instances.hpp"
#include "core/rng.hpp"
#include "doctest.h"

using namespace ob;

namespace {

std::vector<Instance> sample_instances() {
  std::vector<Instance> out;
  out.push_back(Instance::quadratic(Domain::interval(0.0, 1.0), {0.3}));
  out.push_back(Instance::quadratic(Domain::ball(3, 2.0), {0.1, -0.2, 0.4}));
  out.push_back(Instance::norm_distance(Domain::ball(2, 1.0), {0.0, 0.0}, 1.0));
  out.push_back(Instance::even_power(Domain::interval(-1.0, 1.0), -0.5, 4));
  out.push_back(Instance::linear(Domain::box(2, 1.0), {0.3, 0.7}, 1));
  out.push_back(Instance::threshold(Domain::interval(0.0, 1.0), 0.5));
  return out;
}

Vec random_member(const Domain& dom, CounterRng& rng) {
  Vec x(size_t(dom.dim()));
  for (double& v : x) v = dom.radius() * (2.0 * rng.next_unit() - 1.0);
  for (size_t i = 0; i < x.size(); ++i) x[i] += dom.center()[i];
  return dom.project(x);
}

}  // namespace

TEST_CASE("values at handpicked points") {
  CHECK(Instance::quadratic(Domain::interval(0.0, 1.0), {0.3}).value(Vec{0.3}) == 0.0);
  CHECK(Instance::threshold(Domain::interval(0.0, 1.0), 0.5).value(Vec{0.2}) ==
        doctest::Approx(0.3).epsilon(1e-15));
  CHECK(Instance::even_power(Domain::interval(-1.0, 1.0), -0.5, 4).value(Vec{0.5}) ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("subgradients at handpicked points") {
  Instance q = Instance::quadratic(Domain::interval(0.0, 1.0), {0.3});
  CHECK(q.subgradient(Vec{0.7})[0] == doctest::Approx(0.4).epsilon(1e-15));

  Instance cone = Instance::norm_distance(Domain::ball(2, 1.0), {0.0, 0.0}, 1.0);
  Vec g = cone.subgradient(Vec{0.6, 0.8});
  CHECK(g[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(0.8).epsilon(1e-12));

  // Kinks resolve to the zero subgradient.
  CHECK(Instance::threshold(Domain::interval(0.0, 1.0), 0.5).subgradient(Vec{0.5})[0] == 0.0);
  CHECK(cone.subgradient(Vec{0.0, 0.0})[0] == 0.0);
}

TEST_CASE("evaluation outside the domain is rejected") {
  Instance q = Instance::quadratic(Domain::interval(0.0, 1.0), {0.3});
  CHECK_THROWS_AS(q.value(Vec{1.5}), Error);
  CHECK_THROWS_AS(q.subgradient(Vec{-0.1}), Error);
  CHECK_THROWS_AS(Instance::quadratic(Domain::interval(0.0, 1.0), {1.4}), Error);  // theta outside
}

TEST_CASE("minimum and minimizer per family") {
  CounterRng rng(5);
  for (const Instance& f : sample_instances()) {
    Vec xs = f.minimizer();
    CHECK(f.value(xs) == doctest::Approx(f.min_value()).epsilon(1e-12));
    for (int k = 0; k < 50; ++k)
      CHECK(f.value(random_member(f.domain(), rng)) >= f.min_value() - 1e-12);
  }
  // Linear objective attains -|slope|_1 * rho at a corner.
  Instance lin = Instance::linear(Domain::box(2, 1.0), {0.3, 0.7}, 1);
  CHECK(lin.min_value() == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("convexity and subgradient inequalities hold on random pairs") {
  CounterRng rng(17);
  for (const Instance& f : sample_instances()) {
    for (int k = 0; k < 100; ++k) {
      Vec x = random_member(f.domain(), rng);
      Vec y = random_member(f.domain(), rng);
      double lam = rng.next_unit();
      Vec mid(x.size());
      for (size_t i = 0; i < x.size(); ++i) mid[i] = lam * x[i] + (1.0 - lam) * y[i];
      mid = f.domain().project(mid);
      CHECK(f.value(mid) <= lam * f.value(x) + (1.0 - lam) * f.value(y) + 1e-12);

      Vec g = f.subgradient(x);
      double lin = f.value(x);
      for (size_t i = 0; i < x.size(); ++i) lin += g[i] * (y[i] - x[i]);
      CHECK(f.value(y) >= lin - 1e-12);
    }
  }
}

TEST_CASE("quadratics are exactly 1-strongly convex") {
  CounterRng rng(23);
  Instance f = Instance::quadratic(Domain::ball(3, 2.0), {0.1, -0.2, 0.4});
  for (int k = 0; k < 100; ++k) {
    Vec x = random_member(f.domain(), rng), y = random_member(f.domain(), rng);
    Vec g = f.subgradient(y);
    double rhs = f.value(y) + 0.5 * dist_sq(x, y);
    for (size_t i = 0; i < x.size(); ++i) rhs += g[i] * (x[i] - y[i]);
    CHECK(f.value(x) == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("subgradient matches central differences where smooth") {
  CounterRng rng(29);
  for (const Instance& f : sample_instances()) {
    const double h = 1e-6;
    int checked = 0;
    for (int k = 0; k < 60 && checked < 25; ++k) {
      Vec x = random_member(f.domain(), rng);
      // Stay h inside the domain and away from kinks.
      bool interior = true;
      for (size_t i = 0; i < x.size(); ++i) {
        Vec lo = x, hi = x;
        lo[i] -= h;
        hi[i] += h;
        interior = interior && f.domain().contains(lo) && f.domain().contains(hi);
      }
      if (!interior || (f.family() != Family::linear && dist2(x, f.minimizer()) < 1e-3)) continue;
      ++checked;
      Vec g = f.subgradient(x);
      for (size_t i = 0; i < x.size(); ++i) {
        Vec lo = x, hi = x;
        lo[i] -= h;
        hi[i] += h;
        double fd = (f.value(hi) - f.value(lo)) / (2.0 * h);
        CHECK(g[i] == doctest::Approx(fd).epsilon(5e-6).scale(1.0));
      }
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("pairwise separation closed forms") {
  Domain iv = Domain::interval(0.0, 1.0);
  Instance qa = Instance::quadratic(iv, {0.3}), qb = Instance::quadratic(iv, {0.7});
  CHECK(separation(qa, qb) == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(separation(qa, qa) == 0.0);

  Domain sym = Domain::interval(-1.0, 1.0);
  Instance ea = Instance::even_power(sym, -0.5, 2), eb = Instance::even_power(sym, 0.5, 2);
  CHECK(separation(ea, eb) == doctest::Approx(0.5).epsilon(1e-12));

  Instance ta = Instance::threshold(iv, 0.2), tb = Instance::threshold(iv, 0.9);
  CHECK(separation(ta, tb) == doctest::Approx(0.7).epsilon(1e-12));

  Instance na = Instance::norm_distance(iv, {0.1}, 2.0), nb = Instance::norm_distance(iv, {0.6}, 2.0);
  CHECK(separation(na, nb) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(separation(qa, ta), Error);  // family mismatch
}

TEST_CASE("separation closed forms agree with grid minimization") {
  Domain iv = Domain::interval(0.0, 1.0);
  Domain sym = Domain::interval(-1.0, 1.0);
  std::pair<Instance, Instance> pairs[] = {
      {Instance::quadratic(iv, {0.3}), Instance::quadratic(iv, {0.7})},
      {Instance::even_power(sym, -0.5, 4), Instance::even_power(sym, 0.3, 4)},
      {Instance::threshold(iv, 0.25), Instance::threshold(iv, 0.75)},
      {Instance::norm_distance(iv, {0.2}, 1.5), Instance::norm_distance(iv, {0.8}, 1.5)},
  };
  for (const auto& [a, b] : pairs) {
    double closed = separation(a, b);
    double grid = separation_by_grid(a, b, 10001);
    CHECK(closed == doctest::Approx(grid).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("two-hypothesis quadratic ensemble separates its eps-minimizers") {
  const double eps = 0.02;
  Ensemble ens = make_sec41_pair(eps);
  REQUIRE(ens.size() == 2);
  CHECK(ens.at(0).theta()[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(ens.at(1).theta()[0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(ens.separation == doctest::Approx(2.0 * eps).epsilon(1e-12));
  REQUIRE(ens.common_min.has_value());
  CHECK(*ens.common_min == 0.0);

  // Exclusion on a dense grid: a strict eps-minimizer of one never
  // eps-minimizes the other (boundary points carry no claim).
  for (int k = 0; k <= 10000; ++k) {
    double x = double(k) / 10000.0;
    double e0 = ens.at(0).value(Vec{x});
    double e1 = ens.at(1).value(Vec{x});
    if (e0 < eps - 1e-9) CHECK(e1 > eps);
    if (e1 < eps - 1e-9) CHECK(e0 > eps);
  }

  CHECK_THROWS_AS(make_sec41_pair(0.125), Error);
  CHECK_THROWS_AS(make_sec41_pair(0.0), Error);
}

TEST_CASE("cone ensemble on the sign packing is unit-Lipschitz and separated") {
  const double eps = 0.5, rho = 1.0, r = 1.0;
  Ensemble ens = make_thm2_ensemble(16, rho, r, eps, 99);
  CHECK(ens.size() >= 5);
  REQUIRE(ens.common_min.has_value());
  CHECK(*ens.common_min == 0.0);
  for (int i = 0; i < ens.size(); ++i) {
    CHECK(ens.at(i).lipschitz_bound() <= 1.0 + 1e-12);
    for (double c : ens.at(i).theta()) CHECK(std::fabs(c) == doctest::Approx(rho));
  }
  for (int i = 0; i < ens.size(); ++i)
    for (int j = i + 1; j < ens.size(); ++j)
      CHECK(separation(ens.at(i), ens.at(j)) >= 2.0 * std::pow(eps, 1.0 / r) - 1e-12);

  // The epsilon precondition names its admissible bound.
  try {
    make_thm2_ensemble(16, 1.0, 1.0, 1.5, 99);
    FAIL("epsilon above the admissible bound must be rejected");
  } catch (const Error& e) {
    CHECK(e.code() == Err::precondition);
    CHECK(std::string(e.what()).find("epsilon in (0,") != std::string::npos);
  }
  CHECK_THROWS_AS(make_thm2_ensemble(8, 1.0, 1.0, 0.1, 99), Error);
}

TEST_CASE("quadratic ensemble on the sign packing stays in its box") {
  const double eps = 1.0;  // boundary of the admissible range at dim 16, rho 1
  Ensemble ens = make_thm3_ensemble(16, 1.0, 1.0, eps, 7);
  CHECK(ens.size() >= 5);
  for (int i = 0; i < ens.size(); ++i) CHECK(ens.domain.contains(ens.at(i).theta()));
  for (int i = 0; i < ens.size(); ++i)
    for (int j = i + 1; j < ens.size(); ++j)
      CHECK(separation(ens.at(i), ens.at(j)) >= 2.0 * eps - 1e-12);
  CHECK_THROWS_AS(make_thm3_ensemble(16, 1.0, 1.0, 1.01, 7), Error);
}

TEST_CASE("linear pair shares its boundary minimum") {
  Ensemble ens = make_thm4_pair(2, 0.05);
  REQUIRE(ens.size() == 2);
  CHECK(ens.at(0).slope()[0] == doctest::Approx(0.025));
  CHECK(ens.at(0).sign() == 1);
  CHECK(ens.at(1).sign() == -1);
  REQUIRE(ens.common_min.has_value());
  CHECK(*ens.common_min == doctest::Approx(-0.05).epsilon(1e-12));
}

TEST_CASE("lattice quadratic ensemble certifies quarter-squared-distance separation") {
  Ensemble ens = make_thm5_ensemble(Domain::interval(0.0, 1.0), 0.25);
  REQUIRE(ens.size() == 5);
  CHECK(ens.separation == doctest::Approx(0.25 * 0.0625).epsilon(1e-12));
  double worst = kInf;
  for (int i = 0; i < ens.size(); ++i)
    for (int j = i + 1; j < ens.size(); ++j) worst = std::min(worst, separation(ens.at(i), ens.at(j)));
  CHECK(worst == doctest::Approx(ens.separation).epsilon(1e-12));
}

TEST_CASE("even-power pair matches its separation formula") {
  const double eps = 0.01;
  const int m = 4;
  Ensemble ens = make_thm6_pair(m, eps);
  REQUIRE(ens.size() == 2);
  double off = std::pow(eps, 1.0 / (2.0 * m));
  CHECK(ens.at(0).theta()[0] == doctest::Approx(-off).epsilon(1e-12));
  CHECK(ens.at(1).theta()[0] == doctest::Approx(off).epsilon(1e-12));
  CHECK(ens.separation == doctest::Approx(2.0 * std::sqrt(eps)).epsilon(1e-12));
  CHECK(separation(ens.at(0), ens.at(1)) == doctest::Approx(2.0 * std::sqrt(eps)).epsilon(1e-12));

  // Exclusion at threshold eps^(1/2): sqrt-separation 2*sqrt(eps) covers 2*eta.
  double eta = std::sqrt(eps);
  for (int k = 0; k <= 4000; ++k) {
    double x = -1.0 + 2.0 * double(k) / 4000.0;
    double e0 = ens.at(0).value(Vec{x});
    double e1 = ens.at(1).value(Vec{x});
    if (e0 < eta - 1e-9) CHECK(e1 > eta);
    if (e1 < eta - 1e-9) CHECK(e0 > eta);
  }
}

TEST_CASE("convenience pairs honor the caller's interval") {
  Domain wide = Domain::interval(0.0, 4.0);
  Ensemble q = make_quad_pair(wide, 1.5, 2.5);
  CHECK(q.domain.same_as(wide));
  CHECK(q.separation == doctest::Approx(0.25 * 1.0).epsilon(1e-12));

  Ensemble n = make_norm_pair(Domain::interval(0.0, 1.0), 0.3, 0.7, 1.0);
  CHECK(n.separation == doctest::Approx(0.4).epsilon(1e-12));
  REQUIRE(n.common_min.has_value());

  CHECK_THROWS_AS(make_quad_pair(wide, 1.5, 5.0), Error);   // center outside
  CHECK_THROWS_AS(make_quad_pair(wide, 1.5, 1.5), Error);   // identical centers
  CHECK_THROWS_AS(make_quad_pair(Domain::box(2, 1.0), 0.1, 0.2), Error);  // not an interval

  Ensemble grid = make_threshold_grid(0.25);
  CHECK(grid.size() == 5);
  CHECK(grid.family == Family::threshold);
  CHECK(grid.separation == doctest::Approx(0.25).epsilon(1e-12));
}
