#include <cmath>

#include "core/algorithms.hpp"
#include "doctest.h"

using namespace ob;

namespace {

Instance quad(double theta, double lo = 0.0, double hi = 1.0) {
  return Instance::quadratic(Domain::interval(lo, hi), {theta});
}

}  // namespace

TEST_CASE("interval halving pins the threshold") {
  Oracle nl = Oracle::noiseless();
  for (double theta : {0.3, 0.5, 0.8125}) {
    Instance f = Instance::threshold(Domain::interval(0.0, 1.0), theta);
    Transcript tr = run(BisectionSpec{}, nl, f, 20, 1);
    CHECK(std::fabs(tr.final_point[0] - theta) <= std::pow(2.0, -20.0));
  }
}

TEST_CASE("gradient descent with exact gradients is the hand recursion") {
  Oracle nl = Oracle::noiseless();
  SgdSpec sgd;  // 1/t rule, default scale 1
  sgd.x1 = {1.0};
  Transcript tr = run(sgd, nl, quad(0.3), 3, 9);
  REQUIRE(tr.queries.size() == 3);
  CHECK(tr.queries[0][0] == 1.0);
  CHECK(tr.queries[1][0] == doctest::Approx(0.3).epsilon(1e-15));  // x - 1*(x - theta)
  CHECK(tr.queries[2][0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(tr.final_point[0] == doctest::Approx(0.3).epsilon(1e-15));
  REQUIRE(tr.err_trace.size() == 4);
  CHECK(tr.err_trace[0] == doctest::Approx(0.5 * 0.49).epsilon(1e-12));
  CHECK(tr.err_trace[3] == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));

  // One exact unit step reaches the quadratic's minimizer from anywhere.
  for (double x1 : {0.05, 0.4, 0.97}) {
    SgdSpec s2;
    s2.x1 = {x1};
    CHECK(run(s2, nl, quad(0.62), 1, 2).final_point[0] == doctest::Approx(0.62).epsilon(1e-15));
  }
}

TEST_CASE("iterates never leave the domain") {
  Oracle noisy = Oracle::first_order_gaussian(50.0);
  SgdSpec sgd;
  Transcript tr = run(sgd, noisy, quad(0.3), 200, 3);
  for (const Vec& q : tr.queries) CHECK(quad(0.3).domain().contains(q));
  CHECK(quad(0.3).domain().contains(tr.final_point));
}

TEST_CASE("recorded responses replay to the recorded queries bit-exactly") {
  Instance f = quad(0.3);
  Oracle fog = Oracle::first_order_gaussian(1.0);

  SgdSpec sgd;
  sgd.rule = StepRule::inv_sqrt_t;
  Transcript tr = run(sgd, fog, f, 64, 77);
  std::vector<Vec> qs = replay_queries(sgd, f.domain(), 64, tr.responses);
  REQUIRE(qs.size() == 65);
  for (size_t t = 0; t < 64; ++t) CHECK(qs[t][0] == tr.queries[t][0]);
  CHECK(qs[64][0] == tr.final_point[0]);

  GridSearchSpec gs;
  Transcript tg = run(gs, fog, f, 30, 78);
  std::vector<Vec> qg = replay_queries(gs, f.domain(), 30, tg.responses);
  for (size_t t = 0; t < 30; ++t) CHECK(qg[t][0] == tg.queries[t][0]);
  CHECK(qg[30][0] == tg.final_point[0]);

  Oracle lab = Oracle::bernoulli_label(1.0, 0.1, 0.4);
  Instance thr = Instance::threshold(Domain::interval(0.0, 1.0), 0.45);
  ActiveBisectionSpec ab;
  Transcript ta = run(ab, lab, thr, 300, 79);
  std::vector<Vec> qa = replay_queries(ab, thr.domain(), 300, ta.responses);
  for (size_t t = 0; t < 300; ++t) CHECK(qa[t][0] == ta.queries[t][0]);

  // Same seed, same run - bit-identical transcript.
  Transcript tr2 = run(sgd, fog, f, 64, 77);
  for (size_t t = 0; t < 64; ++t) CHECK(tr2.queries[t][0] == tr.queries[t][0]);
}

TEST_CASE("grid probing lands on the best grid point") {
  Oracle nl = Oracle::noiseless();
  Transcript tr = run(GridSearchSpec{}, nl, quad(0.3), 100, 5);
  // 10 grid points over [0, 1]: the winner is the closest one to 0.3 = 3/9... 0.333.
  CHECK(tr.final_point[0] == doctest::Approx(3.0 / 9.0).epsilon(1e-12));
  CHECK(tr.err_trace.back() <= 0.001);
}

TEST_CASE("majority-vote halving homes in under clean labels") {
  // Labels are nearly deterministic away from the threshold.
  Oracle lab = Oracle::bernoulli_label(1.0, 0.1, 0.499);
  Instance thr = Instance::threshold(Domain::interval(0.0, 1.0), 0.45);
  ActiveBisectionSpec ab;  // epoch length ceil(8 * ln 1e4) = 74
  Transcript tr = run(ab, lab, thr, 74 * 8, 123);
  CHECK(std::fabs(tr.final_point[0] - 0.45) <= 1.0 / 256.0 + 1e-12);
}

TEST_CASE("hypothesis choice is the smallest excess, lowest index on ties") {
  Ensemble pair = make_sec41_pair(0.02);
  CHECK(canonical_estimate(pair, Vec{0.4}) == 0);
  CHECK(canonical_estimate(pair, Vec{0.3}) == 0);
  CHECK(canonical_estimate(pair, Vec{0.7}) == 1);
  Ensemble tie = make_quad_pair(Domain::interval(0.0, 1.0), 0.25, 0.75);
  CHECK(canonical_estimate(tie, Vec{0.5}) == 0);  // exact tie: lowest index
  Ensemble grid = make_threshold_grid(0.25);
  CHECK(canonical_estimate(grid, Vec{0.74}) == 3);
  CHECK(canonical_estimate(grid, Vec{0.375}) == 1);  // tie between 0.25 and 0.5
}

TEST_CASE("query stream is the absorbed-response state machine") {
  Instance f = quad(0.3);
  Oracle fog = Oracle::first_order_gaussian(1.0);
  SgdSpec sgd;
  Transcript tr = run(sgd, fog, f, 16, 55);
  std::vector<double> seen;
  run_stream(sgd, fog, f, 16, 55, [&](int64_t, ConstSpan x) { seen.push_back(x[0]); });
  REQUIRE(seen.size() == 17);
  for (size_t t = 0; t < 16; ++t) CHECK(seen[t] == tr.queries[t][0]);
  CHECK(seen[16] == tr.final_point[0]);
}

TEST_CASE("engine rejects invalid setups") {
  Domain iv = Domain::interval(0.0, 1.0);
  SgdSpec bad_x1;
  bad_x1.x1 = {1.5};
  CHECK_THROWS_AS(Engine(bad_x1, iv, 10), Error);
  CHECK_THROWS_AS(Engine(SgdSpec{}, iv, 0), Error);
  CHECK_THROWS_AS(Engine(BisectionSpec{}, Domain::box(2, 1.0), 10), Error);
  ActiveBisectionSpec ab;
  ab.vote_factor = 0.0;
  CHECK_THROWS_AS(Engine(ab, iv, 10), Error);

  // Absorbing past the horizon is a contract breach.
  Engine eng(SgdSpec{}, iv, 1);
  eng.absorb(FirstOrder{0.0, {0.1}});
  CHECK_THROWS_AS(eng.absorb(FirstOrder{0.0, {0.1}}), Error);

  // A label algorithm cannot digest first-order responses and vice versa.
  Engine ab_eng(ActiveBisectionSpec{}, iv, 10);
  CHECK_THROWS_AS(ab_eng.absorb(FirstOrder{0.0, {0.1}}), Error);
  Engine sgd_eng(SgdSpec{}, iv, 10);
  CHECK_THROWS_AS(sgd_eng.absorb(Label{1}), Error);
}

TEST_CASE("mean error along gradient descent is eventually nonincreasing") {
  Instance f = quad(0.3);
  Oracle fog = Oracle::first_order_gaussian(0.1);
  const int seeds = 200, horizon = 150;
  std::vector<double> mean(horizon + 1, 0.0);
  std::vector<std::vector<double>> traces;
  traces.resize(size_t(seeds));
  for (int s = 0; s < seeds; ++s) {
    Transcript tr = run(SgdSpec{}, fog, f, horizon, uint64_t(1000 + s));
    traces[size_t(s)] = tr.err_trace;
    for (int t = 0; t <= horizon; ++t) mean[size_t(t)] += tr.err_trace[size_t(t)] / seeds;
  }
  // Paired one-step drops: after a short burn-in the mean difference must not
  // be significantly positive, up to the multiple-testing tail over 140 steps.
  int sig_up = 0;
  for (int t = 10; t < horizon; ++t) {
    double md = 0.0, sq = 0.0;
    for (int s = 0; s < seeds; ++s) {
      double d = traces[size_t(s)][size_t(t + 1)] - traces[size_t(s)][size_t(t)];
      md += d / seeds;
      sq += d * d;
    }
    double se = std::sqrt((sq / seeds - md * md) / seeds);
    if (md > 3.0 * se) ++sig_up;
  }
  CHECK(sig_up <= 2);
  // And the trace collapses overall.
  CHECK(mean[size_t(horizon)] < 0.1 * mean[0]);
}
