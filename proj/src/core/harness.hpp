#pragma once

#include "core/infobounds.hpp"

namespace ob {

enum class EnsembleKind {
  sec41_pair,
  thm2,
  thm3,
  thm4_pair,
  lattice_quadratic,
  even_power_pair,
  quad_pair,
  norm_pair,
  threshold_grid,
};

enum class SweepMode { hypothesis_test, complexity, traces, active, moment_check, bound_eval };

const char* ensemble_kind_name(EnsembleKind k);
const char* sweep_mode_name(SweepMode m);
std::optional<EnsembleKind> ensemble_kind_from_name(const std::string& s);
std::optional<SweepMode> sweep_mode_from_name(const std::string& s);

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::sec41_pair;
  double eps = 0.02;      // sec41_pair, thm2, thm3, thm4_pair, even_power_pair
  int dim = 16;           // thm2, thm3, thm4_pair
  double rho = 1.0;       // thm2, thm3 box half-side; lattice/pair intervals are [0, 2*rho]
  double r = 1.0;         // thm2, thm3 error exponent in the eps scaling
  int power = 4;          // even_power_pair
  double sep = 0.25;      // lattice_quadratic, threshold_grid
  double theta0 = 0.3, theta1 = 0.7;  // quad_pair, norm_pair
  double scale = 1.0;                 // norm_pair
  uint64_t packing_seed = 0x7061636bull;  // thm2, thm3
};

Ensemble build_ensemble(const EnsembleSpec& spec);

struct OracleSpec {
  OracleKind kind = OracleKind::first_order_gaussian;
  double sigma = 1.0;
  double alpha = 1.5, c = 4.0, eps = 0.05;     // moment_bounded
  double kappa = 1.0, c_lo = 0.1, c_hi = 0.4;  // bernoulli_label
};

Oracle build_oracle(const OracleSpec& spec);

struct AlgorithmSpec {
  enum class Kind { sgd, bisection, grid_search, active_bisection };
  Kind kind = Kind::sgd;
  StepRule step_rule = StepRule::inv_t;
  double step_scale = 0.0;  // <= 0: rule default
  Vec x1;                   // empty: domain center
  double vote_factor = 8.0, eps_target = 1e-4, exponent = 1.0;  // active_bisection
};

const char* algorithm_kind_name(AlgorithmSpec::Kind k);
std::optional<AlgorithmSpec::Kind> algorithm_kind_from_name(const std::string& s);
Algo build_algo(const AlgorithmSpec& spec);

struct SweepConfig {
  SweepMode mode = SweepMode::hypothesis_test;
  std::vector<int64_t> horizons;
  int trials = 100;       // per hypothesis per horizon
  uint64_t base_seed = 1;
  double eps = 0.02;      // success threshold for p_err = P(err^r >= eps)
  double delta = 0.25;    // probability criterion level
  double r = 1.0;         // error exponent
  std::vector<double> eps_grid;  // complexity targets
  bool criterion_mean = true;    // complexity: mean err^r < eps, else p_err <= delta
  int64_t fit_lo = 0, fit_hi = 0;  // fit window in t (0: full range)
  int samples = 200000;  // moment_check draws per probe
  int probes = 10;       // moment_check query points
  int jobs = 0;          // 0: hardware concurrency
};

struct BoundEvalConfig {
  std::vector<ThmBound> which;
  std::map<std::string, double> params;  // superset; each bound takes its own keys
};

struct ExperimentConfig {
  EnsembleSpec ensemble;
  OracleSpec oracle;
  AlgorithmSpec algorithm;
  SweepConfig sweep;
  BoundEvalConfig bound;
  std::string stem = "run";
};

// All violated invariants, each quoting the invariant; empty means valid.
std::vector<std::string> validate(const ExperimentConfig& cfg);

struct HorizonRow {
  int64_t horizon = 0;
  double mean_err = kNaN, max_err = kNaN, p_err = kNaN, p_mismatch = kNaN;
  double mi_nats = kNaN, mi_lo = kNaN, mi_hi = kNaN;
  double ir_upper_nats = kNaN, fano_lower_nats = kNaN;
  std::vector<int64_t> confusion;        // N x N row-major (hypothesis-test modes)
  std::vector<double> per_hyp_mean_err;  // mean err by hypothesis
  std::vector<double> per_hyp_mean_pow;  // mean err^r by hypothesis
};

struct ComplexityCell {
  double eps = 0.0;
  bool resolved = false;
  int64_t t_pass = 0;       // smallest horizon meeting the criterion
  int64_t t_last_fail = 0;  // largest failing horizon before t_pass (0: none)
};

struct TracesReport {
  std::vector<double> err_mean, err_se, lf_mean, lf_se;  // index t-1
  double ratio_const = 0.0;  // (D^2+1)/sigma^2 for the quadratic family
  bool pointwise_checked = false;
  bool pointwise_ok = true;
  int64_t first_pointwise_fail = 0;
  FitResult err_fit, lf_fit;
  int64_t fit_lo = 1, fit_hi = 0;
};

struct ActiveReport {
  std::vector<int64_t> horizons;
  std::vector<double> risk_mean, risk_se, risk_med;
  FitResult fit;  // fitted on the median trace; robust to stuck trials
  bool exponential_fit = false;  // kappa == 1: ln(risk) vs t, else ln-ln
};

struct MomentProbe {
  Vec x;
  int hypothesis = 0;
  double f_true = 0.0, mean_v0 = 0.0, se_v0 = 0.0, moment_alpha = 0.0;
  Vec grad_true, mean_v1, se_v1;
  bool unbiased_ok = false, moment_ok = false;
};

struct ExperimentResult {
  SweepMode mode = SweepMode::hypothesis_test;
  int n_hypotheses = 0;
  std::vector<HorizonRow> rows;
  std::vector<ComplexityCell> complexity;
  TracesReport traces;
  ActiveReport active;
  std::vector<MomentProbe> moment;
  std::vector<BoundReport> reports;
  bool completed = false;
};

// Dispatches on cfg.sweep.mode; bit-identical output for a given config
// regardless of the job count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Single-mode entry points (cfg.sweep.mode is ignored).
ExperimentResult hypothesis_test(const ExperimentConfig& cfg);
ExperimentResult estimate_complexity(const ExperimentConfig& cfg);
ExperimentResult diminishing_returns(const ExperimentConfig& cfg);
ExperimentResult active_learning_run(const ExperimentConfig& cfg);
ExperimentResult moment_check(const ExperimentConfig& cfg);
ExperimentResult bound_eval(const ExperimentConfig& cfg);

// Closed-form excess classification risk of threshold x against truth theta
// under the label profile eta(u) = clamp(1/2 + sgn(u-theta)*C|u-theta|^(kappa-1)):
// integral of |2*eta - 1| over the interval between x and theta.
double excess_risk(double x, double theta, double kappa, double c_hi);

}  // namespace ob
