// Acceptance gate: ten end-to-end checks, one PASS/FAIL line each, exit code
// equal to the number of failures. Each check carries its own time budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "core/emit.hpp"
#include "core/harness.hpp"
#include "core/presets.hpp"
#include "oraclebound.h"

using namespace ob;

namespace {

int failures = 0;

template <typename F>
void criterion(int n, const char* name, double limit_s, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = body();
  } catch (const std::exception&) {
    ok = false;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0.0 && secs >= limit_s) ok = false;
  if (!ok) ++failures;
  std::printf("%s criterion %d: %s (%.2fs)\n", ok ? "PASS" : "FAIL", n, name, secs);
  std::fflush(stdout);
}

bool near(double x, double v) { return std::fabs(x - v) <= 1e-6 * std::max(1.0, std::fabs(v)); }

double thm_value(ThmBound w, const std::map<std::string, double>& params) {
  return thm_lower(w, params).value_nats;
}

}  // namespace

int main() {
  criterion(1, "two-instance closed-form divergence", 1.0, [] {
    const Ensemble pair = make_sec41_pair(0.02);
    const Oracle fog = Oracle::first_order_gaussian(1.0);
    const double closed = max_response_kl(pair, fog);
    const double grid = max_response_kl_grid(pair, fog);
    return std::fabs(closed - 0.1) <= 1e-9 && std::fabs(closed - grid) <= 1e-9;
  });

  criterion(2, "sec41 information sandwich", 120.0, [] {
    const ExperimentResult res = run_experiment(preset_config("sec41"));
    if (!res.completed || res.rows.empty()) return false;
    bool ok = true;
    int checked = 0;
    for (const HorizonRow& row : res.rows) {
      if (!(row.p_mismatch < 0.5)) continue;  // estimator worse than chance: no claim
      ++checked;
      ok = ok && row.fano_lower_nats <= row.mi_hi + 1e-12;
      ok = ok && row.mi_lo <= 0.1 * double(row.horizon) + 1e-12;
    }
    return ok && checked >= 1;
  });

  criterion(3, "thm3 complexity exponent", 600.0, [] {
    const ExperimentResult res = run_experiment(preset_config("thm3"));
    if (!res.completed) return false;
    std::vector<std::pair<double, double>> pts;
    for (const ComplexityCell& cell : res.complexity) {
      if (!cell.resolved) return false;
      pts.emplace_back(1.0 / cell.eps, double(cell.t_pass));
    }
    const FitResult fit = fit_exponent(pts);
    return std::fabs(fit.slope - 1.0) <= 0.2;
  });

  criterion(4, "thm2 complexity exponent", 600.0, [] {
    const ExperimentResult res = run_experiment(preset_config("thm2"));
    if (!res.completed) return false;
    std::vector<std::pair<double, double>> pts;
    for (const ComplexityCell& cell : res.complexity) {
      if (!cell.resolved) return false;
      pts.emplace_back(1.0 / cell.eps, double(cell.t_pass));
    }
    const FitResult fit = fit_exponent(pts);
    return std::fabs(fit.slope - 2.0) <= 0.3;
  });

  criterion(5, "thm5 divergence-error coupling", 300.0, [] {
    const ExperimentResult res = run_experiment(preset_config("thm5"));
    const TracesReport& tr = res.traces;
    if (!res.completed || !tr.pointwise_checked) return false;
    bool ok = true;
    for (size_t t = 0; t < tr.err_mean.size(); ++t) {
      const double slack =
          2.0 * std::sqrt(tr.lf_se[t] * tr.lf_se[t] + 4.0 * tr.err_se[t] * tr.err_se[t]);
      ok = ok && tr.lf_mean[t] <= 2.0 * tr.err_mean[t] + slack;
    }
    return ok && std::fabs(tr.err_fit.slope - tr.lf_fit.slope) <= 0.3;
  });

  criterion(6, "thm6 trace-slope ratio", 300.0, [] {
    const ExperimentResult res = run_experiment(preset_config("thm6"));
    const TracesReport& tr = res.traces;
    if (!res.completed || !(tr.err_fit.slope < 0.0)) return false;
    const double ratio = tr.lf_fit.slope / tr.err_fit.slope;
    return std::fabs(ratio - 0.75) <= 0.15;
  });

  criterion(7, "thm8 active learning rates", 300.0, [] {
    const ExperimentResult sharp = run_experiment(preset_config("thm8"));
    if (!sharp.completed) return false;
    bool ok = std::fabs(sharp.active.fit.slope + 1.0) <= 0.2;

    ExperimentConfig flat;  // constant-margin labels: risk halves per epoch
    flat.ensemble.kind = EnsembleKind::threshold_grid;
    flat.oracle.kind = OracleKind::bernoulli_label;
    flat.oracle.kappa = 1.0;
    flat.oracle.c_lo = 0.1;
    flat.oracle.c_hi = 0.4;
    flat.algorithm.kind = AlgorithmSpec::Kind::active_bisection;
    flat.algorithm.vote_factor = 8.0;
    flat.algorithm.eps_target = 1e-4;
    flat.algorithm.exponent = 1.0;
    flat.sweep.mode = SweepMode::active;
    for (int64_t t = 50; t <= 800; t += 50) flat.sweep.horizons.push_back(t);
    flat.sweep.trials = 1000;
    flat.sweep.base_seed = 1;
    const ExperimentResult res = run_experiment(flat);
    ok = ok && res.completed && res.active.exponential_fit;
    ok = ok && res.active.fit.slope < 0.0 && res.active.fit.r2 > 0.9;
    return ok;
  });

  criterion(8, "thm4 moment-channel probes", 60.0, [] {
    const ExperimentResult res = run_experiment(preset_config("thm4"));
    if (!res.completed || res.moment.size() != 20) return false;
    for (const MomentProbe& mp : res.moment)
      if (!mp.unbiased_ok || !mp.moment_ok) return false;
    return true;
  });

  criterion(9, "closed-form evaluators and recurrence", 1.0, [] {
    bool ok = near(fano_lower(32, 0.1), 2.4260151319598086);
    ok = ok && near(fano_lower(2, 0.25), 0.13081203594113696);
    ok = ok && near(fano_lower(2, 0.5), 0.0);
    ok = ok && near(kl_bernoulli(0.75, 0.5), 0.13081203594113696);
    ok = ok && near(kl_bernoulli(0.9, 0.5), 0.36806420716849707);

    ok = ok && near(thm_value(ThmBound::thm1,
                              {{"cstar", 0.1}, {"n_hypotheses", 32}, {"delta", 0.1}}),
                    24.260151319598086);
    const std::map<std::string, double> p2{{"n", 16},    {"s_x", 1.0}, {"delta", 0.1},
                                           {"sigma", 1}, {"eps", 0.5}, {"r", 1.0}};
    ok = ok && near(thm_value(ThmBound::thm2_fog, p2), 0.13047476339951912);
    ok = ok && near(thm_value(ThmBound::thm2_sog, p2), 2.218070977791825);
    std::map<std::string, double> p2h = p2;
    p2h["delta"] = 0.5;
    ok = ok && near(thm_value(ThmBound::thm2_sog, p2h), 0.0);
    const std::map<std::string, double> p3{{"n", 16},    {"d_x", 8.0},  {"delta", 1.0 / 3.0},
                                           {"sigma", 1}, {"eps", 0.01}, {"r", 1.0}};
    ok = ok && near(thm_value(ThmBound::thm3_fog, p3), 0.011108127893588867);
    ok = ok && near(thm_value(ThmBound::thm3_sog, p3), 0.72202831308327636);
    ok = ok && near(thm_value(ThmBound::thm4,
                              {{"alpha", 2.0}, {"c", 1.0}, {"delta", 0.25}, {"eps", 0.1}}),
                    18.872187554086714);
    ok = ok && near(thm_value(ThmBound::thm4,
                              {{"alpha", 1.5}, {"c", 4.0}, {"delta", 0.1}, {"eps", 0.05}}),
                    1062.0088128214376);
    ok = ok && near(thm_value(ThmBound::thm8_k1, {{"cap_c", 0.4}, {"t", 10}}),
                    0.0012885819441141546);

    Vec eps(1000000);
    for (size_t t = 1; t <= eps.size(); ++t) eps[t - 1] = 0.5 / double(t);
    const RecurrenceReport rec = recurrence_check(1.0, 0.0, 1.0, eps);
    ok = ok && rec.first_violation.has_value() && *rec.first_violation < 1000000;
    return ok;
  });

  criterion(10, "bit-identical reruns across thread counts", 0.0, [] {
    ExperimentConfig cfg = preset_config("sec41");
    cfg.sweep.jobs = 1;
    const ExperimentResult one = run_experiment(cfg);
    cfg.sweep.jobs = 4;
    const ExperimentResult four = run_experiment(cfg);
    const ExperimentResult again = run_experiment(cfg);
    const std::string csv = result_csv(one);
    const std::string js = result_json(one);
    bool ok = csv == result_csv(four) && csv == result_csv(again);
    ok = ok && js == result_json(four) && js == result_json(again);

    // The shared-library surface must reproduce the same bytes.
    ob_config* c = nullptr;
    if (ob_config_preset("sec41", &c) != OB_OK) return false;
    ob_result* r = nullptr;
    if (ob_run(c, 3, &r) != OB_OK) {
      ob_config_free(c);
      return false;
    }
    char* ccsv = nullptr;
    char* cjs = nullptr;
    ok = ok && ob_result_csv(r, &ccsv) == OB_OK && csv == ccsv;
    ok = ok && ob_result_json(r, &cjs) == OB_OK && js == cjs;
    ok = ok && ob_result_all_valid(r) == 1;
    ob_string_free(ccsv);
    ob_string_free(cjs);
    ob_result_free(r);
    ob_config_free(c);
    return ok;
  });

  return failures;
}
