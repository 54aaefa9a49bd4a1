#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "core/algorithms.hpp"

namespace ob {

// Identification lower bound in nats. N >= 5: (1-delta)*ln(N) - ln(2);
// N == 2: ln(2) - h2(delta). N in {3, 4} is unsupported. delta in [0, 1/2]
// closed: the endpoints are the continuous limits of the open-interval forms.
double fano_lower(int num_hypotheses, double delta);

// Evaluation grid for divergence suprema: uniform with endpoints in dim 1,
// random domain points plus all ensemble centers otherwise.
struct GridSpec {
  int points_1d = 10000;
  int random_points = 100000;
  uint64_t seed = 0x67726964ull;
};

// max over instance pairs of sup_x response KL. Exact closed form when the
// value gap is affine and the gradient gap constant in x (quadratic and
// linear families under Gaussian oracles; any family under stat_estimation);
// otherwise a grid estimate, which lower-bounds the true sup.
double max_response_kl(const Ensemble& ens, const Oracle& o, const GridSpec& grid = {});

// Pure grid evaluation of the same supremum, independent of the closed forms;
// cross-check oracle for max_response_kl.
double max_response_kl_grid(const Ensemble& ens, const Oracle& o, const GridSpec& grid = {});

// Information-radius upper bound: horizon * max_response_kl.
double ir_upper(const Ensemble& ens, const Oracle& o, int64_t horizon, const GridSpec& grid = {});

// Per-step divergences D(P(.|f_chosen, X_t) || Q*) along a query path, where
// Q* is the response law at an exact minimizer with the ensemble's shared
// minimum value. Requires ens.common_min.
std::vector<double> lf_terms(const std::vector<Vec>& queries, const Ensemble& ens,
                             const Oracle& o, int chosen);

struct BoundReport {
  std::string name;
  double value_nats = 0.0;
  std::map<std::string, double> inputs;                 // echo of all parameters
  std::vector<std::pair<std::string, bool>> validity;   // precondition -> satisfied
  bool all_valid() const {
    for (const auto& [pre, ok] : validity)
      if (!ok) return false;
    return true;
  }
};

enum class ThmBound { thm1, thm2_fog, thm2_sog, thm3_fog, thm3_sog, thm4, thm8_k1 };

const char* thm_bound_name(ThmBound which);
std::optional<ThmBound> thm_bound_from_name(const std::string& name);

// Closed-form evaluation of one named complexity lower bound. Formula values
// are exact; precondition failures are recorded in validity, never thrown.
// Parameter keys by bound:
//   thm1:    cstar, n_hypotheses, delta
//   thm2_*:  n, s_x, delta, sigma, eps, r
//   thm3_*:  n, d_x, delta, sigma, eps, r
//   thm4:    alpha, c, delta, eps
//   thm8_k1: cap_c, t   (value is a risk probability, not nats)
BoundReport thm_lower(ThmBound which, const std::map<std::string, double>& params);

struct RecurrenceReport {
  bool holds_all = true;
  int64_t holds_up_to = 0;                 // largest prefix length verified
  std::optional<int64_t> first_violation;  // 1-based index
  std::vector<int64_t> witnesses;          // times with eps_t >= candidate_c * t^(-1/alpha)
};

// Checks K*ln(1/eps_T) - L <= sum_{t<=T} eps_t^alpha for every prefix. A zero
// eps_T with K > 0 makes the left side infinite and counts as a violation.
// When candidate_c > 0, also records the times where eps_t >= candidate_c *
// t^(-1/alpha) (capped at the first 64 witnesses).
RecurrenceReport recurrence_check(double K, double L, double alpha, ConstSpan eps_seq,
                                  double candidate_c = 0.0);

struct MiEstimate {
  double mi_nats = 0.0;
  double miller_madow = 0.0;  // additive correction, reported separately
};

// Plug-in mutual information of an N x N count matrix (row-major), with the
// Miller-Madow correction (nonzero_cells - 1) / (2 * total).
MiEstimate plugin_mi(const std::vector<int64_t>& counts, int n);

struct MiInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Row-wise multinomial bootstrap of the plug-in MI: `resamples` redraws of
// each row at its observed total, interval = mi +- 2*sd, floored at 0.
MiInterval bootstrap_mi(const std::vector<int64_t>& counts, int n, int resamples, uint64_t seed);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_half = 0.0;  // ~95%: 2 * standard error of the slope
  double r2 = 0.0;
};

// Ordinary least squares of ys on xs.
FitResult linfit(ConstSpan xs, ConstSpan ys);

// OLS on (ln scale, ln value); requires >= 4 points, all positive.
FitResult fit_exponent(const std::vector<std::pair<double, double>>& points);

}  // namespace ob
