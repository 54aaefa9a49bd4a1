#pragma once

#include <variant>

#include "core/oracles.hpp"

namespace ob {

enum class StepRule { inv_t, inv_sqrt_t };

// Projected subgradient descent X_{t+1} = proj(X_t - a_t * G_t) with
// a_t = scale/t or scale/sqrt(t). scale <= 0 selects the default:
// 1 for inv_t, diameter/sqrt(horizon) for inv_sqrt_t.
struct SgdSpec {
  StepRule rule = StepRule::inv_t;
  double scale = 0.0;
  Vec x1;  // empty: domain center
};

// Deterministic interval halving on the sign of the reported gradient;
// dim-1, intended for the noiseless oracle.
struct BisectionSpec {};

// Round-robin value probes over a uniform dim-1 grid of ~sqrt(T) points;
// outputs the point with the best running mean value.
struct GridSearchSpec {};

// Epoch-based midpoint voting against a label oracle: repeat queries at the
// interval midpoint, halve toward the majority. Epoch length is
// ceil(vote_factor * ln(1/eps_target)) when exponent == 1 and grows as
// ceil(vote_factor * 2^(2*(exponent-1)*e)) for exponent > 1, matching the
// shrinking label margin near the threshold.
struct ActiveBisectionSpec {
  double vote_factor = 8.0;
  double eps_target = 1e-4;
  double exponent = 1.0;  // margin exponent kappa the schedule is tuned for
};

using Algo = std::variant<SgdSpec, BisectionSpec, GridSearchSpec, ActiveBisectionSpec>;

const char* algo_name(const Algo& a);

// Sequential query/absorb state machine. query() is both the next query
// point and the running candidate: after t responses it returns the point
// the algorithm would query at step t+1.
class Engine {
 public:
  Engine(const Algo& alg, const Domain& dom, int64_t horizon);

  ConstSpan query() const { return x_; }
  void absorb(const Response& r);
  int64_t steps_absorbed() const { return t_; }

 private:
  enum class Kind { sgd, bisection, grid_search, active_bisection };
  ConstSpan grad_of(const Response& r) const;
  int64_t epoch_len(int64_t epoch) const;

  Kind kind_;
  Domain dom_;
  int64_t horizon_;
  int64_t t_ = 0;
  Vec x_;
  // sgd
  StepRule rule_ = StepRule::inv_t;
  double scale_ = 1.0;
  // bisection / active_bisection
  double lo_ = 0.0, hi_ = 0.0;
  // grid_search
  Vec grid_pts_, grid_sums_;
  std::vector<int64_t> grid_counts_;
  // active_bisection
  double vote_factor_ = 8.0, eps_target_ = 1e-4, exponent_ = 1.0;
  int64_t epoch_ = 0, votes_ = 0, vote_sum_ = 0, cur_epoch_len_ = 1;
};

struct Transcript {
  std::vector<Vec> queries;          // X_1..X_T
  std::vector<Response> responses;   // Y_1..Y_T
  Vec final_point;                   // X_{T+1}
  std::vector<double> err_trace;     // f(X_t) - f* for t = 1..T+1
};

Transcript run(const Algo& alg, const Oracle& o, const Instance& f, int64_t horizon, uint64_t seed);

// Re-derives the query sequence from recorded responses; bit-identical to
// the recorded queries for a deterministic algorithm.
std::vector<Vec> replay_queries(const Algo& alg, const Domain& dom, int64_t horizon,
                                const std::vector<Response>& responses);

// argmin_i f_i(x) - f_i*; ties resolve to the lowest index.
int canonical_estimate(const Ensemble& ens, ConstSpan x);

// Streams (t, X_t) for t = 1..T and finally (T+1, X_{T+1}) without storing
// the transcript; on_point(t, x) runs before the oracle draw at step t.
template <class F>
void run_stream(const Algo& alg, const Oracle& o, const Instance& f, int64_t horizon,
                uint64_t seed, F&& on_point) {
  Engine eng(alg, f.domain(), horizon);
  CounterRng rng(seed);
  Response r;
  for (int64_t t = 1; t <= horizon; ++t) {
    on_point(t, eng.query());
    o.sample_into(f, eng.query(), rng, r);
    eng.absorb(r);
  }
  on_point(horizon + 1, eng.query());
}

}  // namespace ob
