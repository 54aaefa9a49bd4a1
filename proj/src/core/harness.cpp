#include "core/harness.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

namespace ob {

namespace {

constexpr int kBootstrapResamples = 200;
constexpr int64_t kMaxBatches = 64;

int resolve_jobs(int jobs, int64_t n) {
  int64_t j = jobs;
  if (j <= 0) j = int64_t(std::thread::hardware_concurrency());
  if (j < 1) j = 1;
  return int(std::min(j, n));
}

// Static contiguous split over [0, n). The body must write only to slots it
// owns, so the result is independent of the job count.
template <class Body>
void parallel_cells(int64_t n, int jobs, const Body& body) {
  if (n <= 0) return;
  int j = resolve_jobs(jobs, n);
  if (j <= 1) {
    for (int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> ts;
  ts.reserve(size_t(j));
  std::mutex mu;
  std::exception_ptr first;
  for (int w = 0; w < j; ++w) {
    const int64_t lo = n * w / j, hi = n * (w + 1) / j;
    ts.emplace_back([&, lo, hi] {
      try {
        for (int64_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> g(mu);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& t : ts) t.join();
  if (first) std::rethrow_exception(first);
}

double pow_err(double err, double r) {
  const double e = std::max(0.0, err);  // clip float dust below the true min
  return r == 1.0 ? e : std::pow(e, r);
}

// Per-step divergence cap, NaN when the oracle has no closed or grid form.
double try_max_kl(const Ensemble& ens, const Oracle& o) {
  try {
    return max_response_kl(ens, o);
  } catch (const Error& e) {
    if (e.code() == Err::unsupported) return kNaN;
    throw;
  }
}

double fano_col(int n, double delta_hat) {
  try {
    return fano_lower(n, std::min(delta_hat, 0.5));
  } catch (const Error& e) {
    if (e.code() == Err::unsupported) return kNaN;
    throw;
  }
}

struct HypoSweep {
  std::vector<HorizonRow> rows;
  std::vector<std::vector<double>> raw_pows;  // per row, cell order (hyp-major)
  double max_kl = kNaN;
};

HypoSweep run_hypo_sweep(const ExperimentConfig& cfg, bool keep_pows) {
  const Ensemble ens = build_ensemble(cfg.ensemble);
  const Oracle o = build_oracle(cfg.oracle);
  const Algo alg = build_algo(cfg.algorithm);
  const SweepConfig& sw = cfg.sweep;
  const int n = ens.size();
  const int64_t trials = sw.trials;
  const int64_t cells = int64_t(n) * trials;

  HypoSweep out;
  out.max_kl = try_max_kl(ens, o);
  out.rows.reserve(sw.horizons.size());

  struct Cell {
    double err = 0.0, pow = 0.0;
    int mhat = 0;
  };
  std::vector<Cell> slot(size_t(cells), Cell{});

  for (size_t hz = 0; hz < sw.horizons.size(); ++hz) {
    const int64_t horizon = sw.horizons[hz];
    parallel_cells(cells, sw.jobs, [&](int64_t c) {
      const int64_t hyp = c / trials, trial = c % trials;
      const Instance& f = ens.at(int(hyp));
      const uint64_t seed =
          CounterRng::derive({sw.base_seed, uint64_t(hyp), uint64_t(trial)});
      Cell& cl = slot[size_t(c)];
      run_stream(alg, o, f, horizon, seed, [&](int64_t t, ConstSpan x) {
        if (t != horizon + 1) return;
        cl.err = std::max(0.0, f.value(x) - f.min_value());
        cl.pow = pow_err(cl.err, sw.r);
        cl.mhat = canonical_estimate(ens, x);
      });
    });

    // Fixed-order reduction over cells.
    HorizonRow row;
    row.horizon = horizon;
    row.confusion.assign(size_t(n) * size_t(n), 0);
    row.per_hyp_mean_err.assign(size_t(n), 0.0);
    row.per_hyp_mean_pow.assign(size_t(n), 0.0);
    double err_sum = 0.0;
    int64_t exceed = 0, mismatch = 0;
    for (int64_t c = 0; c < cells; ++c) {
      const Cell& cl = slot[size_t(c)];
      const int64_t hyp = c / trials;
      err_sum += cl.err;
      row.per_hyp_mean_err[size_t(hyp)] += cl.err;
      row.per_hyp_mean_pow[size_t(hyp)] += cl.pow;
      row.confusion[size_t(hyp) * size_t(n) + size_t(cl.mhat)] += 1;
      if (cl.pow >= sw.eps) ++exceed;
      if (cl.mhat != hyp) ++mismatch;
    }
    for (int i = 0; i < n; ++i) {
      row.per_hyp_mean_err[size_t(i)] /= double(trials);
      row.per_hyp_mean_pow[size_t(i)] /= double(trials);
    }
    row.mean_err = err_sum / double(cells);
    row.max_err = *std::max_element(row.per_hyp_mean_err.begin(), row.per_hyp_mean_err.end());
    row.p_err = double(exceed) / double(cells);
    row.p_mismatch = double(mismatch) / double(cells);
    row.mi_nats = plugin_mi(row.confusion, n).mi_nats;
    const MiInterval mi = bootstrap_mi(row.confusion, n, kBootstrapResamples,
                                       CounterRng::derive({sw.base_seed, 0xb007ull, uint64_t(hz)}));
    row.mi_lo = mi.lo;
    row.mi_hi = mi.hi;
    row.ir_upper_nats = std::isnan(out.max_kl) ? kNaN : double(horizon) * out.max_kl;
    row.fano_lower_nats = fano_col(n, row.p_mismatch);
    out.rows.push_back(std::move(row));

    if (keep_pows) {
      std::vector<double> pows(size_t(cells), 0.0);
      for (int64_t c = 0; c < cells; ++c) pows[size_t(c)] = slot[size_t(c)].pow;
      out.raw_pows.push_back(std::move(pows));
    }
  }
  return out;
}

std::vector<std::string> bound_keys(ThmBound w) {
  switch (w) {
    case ThmBound::thm1:
      return {"cstar", "n_hypotheses", "delta"};
    case ThmBound::thm2_fog:
    case ThmBound::thm2_sog:
      return {"n", "s_x", "delta", "sigma", "eps", "r"};
    case ThmBound::thm3_fog:
    case ThmBound::thm3_sog:
      return {"n", "d_x", "delta", "sigma", "eps", "r"};
    case ThmBound::thm4:
      return {"alpha", "c", "delta", "eps"};
    case ThmBound::thm8_k1:
      return {"cap_c", "t"};
  }
  fail(Err::internal, "bound_keys: unknown bound");
}

void welford(double v, int64_t k, double& mean, double& m2) {
  const double d = v - mean;
  mean += d / double(k + 1);
  m2 += d * (v - mean);
}

}  // namespace

const char* ensemble_kind_name(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::sec41_pair: return "sec41_pair";
    case EnsembleKind::thm2: return "thm2";
    case EnsembleKind::thm3: return "thm3";
    case EnsembleKind::thm4_pair: return "thm4_pair";
    case EnsembleKind::lattice_quadratic: return "lattice_quadratic";
    case EnsembleKind::even_power_pair: return "even_power_pair";
    case EnsembleKind::quad_pair: return "quad_pair";
    case EnsembleKind::norm_pair: return "norm_pair";
    case EnsembleKind::threshold_grid: return "threshold_grid";
  }
  return "?";
}

const char* sweep_mode_name(SweepMode m) {
  switch (m) {
    case SweepMode::hypothesis_test: return "hypothesis_test";
    case SweepMode::complexity: return "complexity";
    case SweepMode::traces: return "traces";
    case SweepMode::active: return "active";
    case SweepMode::moment_check: return "moment_check";
    case SweepMode::bound_eval: return "bound_eval";
  }
  return "?";
}

const char* algorithm_kind_name(AlgorithmSpec::Kind k) {
  switch (k) {
    case AlgorithmSpec::Kind::sgd: return "sgd";
    case AlgorithmSpec::Kind::bisection: return "bisection";
    case AlgorithmSpec::Kind::grid_search: return "grid_search";
    case AlgorithmSpec::Kind::active_bisection: return "active_bisection";
  }
  return "?";
}

std::optional<EnsembleKind> ensemble_kind_from_name(const std::string& s) {
  for (EnsembleKind k :
       {EnsembleKind::sec41_pair, EnsembleKind::thm2, EnsembleKind::thm3, EnsembleKind::thm4_pair,
        EnsembleKind::lattice_quadratic, EnsembleKind::even_power_pair, EnsembleKind::quad_pair,
        EnsembleKind::norm_pair, EnsembleKind::threshold_grid})
    if (s == ensemble_kind_name(k)) return k;
  return std::nullopt;
}

std::optional<SweepMode> sweep_mode_from_name(const std::string& s) {
  for (SweepMode m : {SweepMode::hypothesis_test, SweepMode::complexity, SweepMode::traces,
                      SweepMode::active, SweepMode::moment_check, SweepMode::bound_eval})
    if (s == sweep_mode_name(m)) return m;
  return std::nullopt;
}

std::optional<AlgorithmSpec::Kind> algorithm_kind_from_name(const std::string& s) {
  for (AlgorithmSpec::Kind k :
       {AlgorithmSpec::Kind::sgd, AlgorithmSpec::Kind::bisection, AlgorithmSpec::Kind::grid_search,
        AlgorithmSpec::Kind::active_bisection})
    if (s == algorithm_kind_name(k)) return k;
  return std::nullopt;
}

Ensemble build_ensemble(const EnsembleSpec& spec) {
  switch (spec.kind) {
    case EnsembleKind::sec41_pair:
      return make_sec41_pair(spec.eps);
    case EnsembleKind::thm2:
      return make_thm2_ensemble(spec.dim, spec.rho, spec.r, spec.eps, spec.packing_seed);
    case EnsembleKind::thm3:
      return make_thm3_ensemble(spec.dim, spec.rho, spec.r, spec.eps, spec.packing_seed);
    case EnsembleKind::thm4_pair:
      return make_thm4_pair(spec.dim, spec.eps);
    case EnsembleKind::lattice_quadratic: {
      const double side = 2.0 * spec.rho;
      require(spec.rho > 0.0, Err::invalid_argument, "lattice ensemble: rho > 0");
      Domain dom = spec.dim == 1 ? Domain::interval(0.0, side)
                                 : Domain::box(spec.dim, spec.rho);
      return make_thm5_ensemble(dom, spec.sep);
    }
    case EnsembleKind::even_power_pair:
      return make_thm6_pair(spec.power, spec.eps);
    case EnsembleKind::quad_pair:
      return make_quad_pair(Domain::interval(0.0, 2.0 * spec.rho), spec.theta0, spec.theta1);
    case EnsembleKind::norm_pair:
      return make_norm_pair(Domain::interval(0.0, 2.0 * spec.rho), spec.theta0, spec.theta1,
                            spec.scale);
    case EnsembleKind::threshold_grid:
      return make_threshold_grid(spec.sep);
  }
  fail(Err::internal, "build_ensemble: unknown kind");
}

Oracle build_oracle(const OracleSpec& spec) {
  switch (spec.kind) {
    case OracleKind::noiseless_first_order: return Oracle::noiseless();
    case OracleKind::first_order_gaussian: return Oracle::first_order_gaussian(spec.sigma);
    case OracleKind::grad_gaussian: return Oracle::grad_gaussian(spec.sigma);
    case OracleKind::moment_bounded: return Oracle::moment_bounded(spec.alpha, spec.c, spec.eps);
    case OracleKind::bernoulli_label: return Oracle::bernoulli_label(spec.kappa, spec.c_lo, spec.c_hi);
    case OracleKind::stat_estimation: return Oracle::stat_estimation(spec.sigma);
  }
  fail(Err::internal, "build_oracle: unknown kind");
}

Algo build_algo(const AlgorithmSpec& spec) {
  switch (spec.kind) {
    case AlgorithmSpec::Kind::sgd:
      return SgdSpec{spec.step_rule, spec.step_scale, spec.x1};
    case AlgorithmSpec::Kind::bisection:
      return BisectionSpec{};
    case AlgorithmSpec::Kind::grid_search:
      return GridSearchSpec{};
    case AlgorithmSpec::Kind::active_bisection:
      return ActiveBisectionSpec{spec.vote_factor, spec.eps_target, spec.exponent};
  }
  fail(Err::internal, "build_algo: unknown kind");
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
  std::vector<std::string> bad;
  const SweepConfig& s = cfg.sweep;
  const SweepMode m = s.mode;
  const bool runs = m == SweepMode::hypothesis_test || m == SweepMode::complexity ||
                    m == SweepMode::traces || m == SweepMode::active;

  if (runs) {
    if (s.trials < 30) bad.push_back("trials >= 30");
    if (s.horizons.empty()) {
      bad.push_back("horizons nonempty");
    } else {
      bool inc = s.horizons.front() >= 1;
      for (size_t i = 1; inc && i < s.horizons.size(); ++i)
        inc = s.horizons[i] > s.horizons[i - 1];
      if (!inc) bad.push_back("horizons strictly increasing from 1");
    }
  }
  if (!(s.eps > 0.0)) bad.push_back("eps > 0");
  if (!(s.delta > 0.0 && s.delta < 0.5)) bad.push_back("delta in (0, 1/2)");
  if (!(s.r >= 1.0)) bad.push_back("r >= 1");
  if (s.jobs < 0) bad.push_back("jobs >= 0");
  if (s.fit_lo != 0 || s.fit_hi != 0) {
    if (!(s.fit_lo >= 1 && s.fit_hi > s.fit_lo)) bad.push_back("fit window 1 <= fit_lo < fit_hi");
  }
  if (m == SweepMode::complexity) {
    bool ok = !s.eps_grid.empty();
    for (double e : s.eps_grid) ok = ok && e > 0.0;
    if (!ok) bad.push_back("eps_grid nonempty with positive entries");
  }
  if (m == SweepMode::moment_check) {
    if (s.samples < 1000) bad.push_back("samples >= 1000");
    if (s.probes < 1) bad.push_back("probes >= 1");
  }
  if (m == SweepMode::bound_eval && cfg.bound.which.empty())
    bad.push_back("bound list nonempty");

  const EnsembleSpec& e = cfg.ensemble;
  if (e.dim < 1) bad.push_back("dim >= 1");
  if (!(e.rho > 0.0)) bad.push_back("rho > 0");
  if (!(e.sep > 0.0)) bad.push_back("sep > 0");
  if (e.power < 2 || e.power % 2 != 0) bad.push_back("power even and >= 2");
  if (!(e.eps > 0.0)) bad.push_back("ensemble eps > 0");
  if (!(e.r >= 1.0)) bad.push_back("ensemble r >= 1");

  const OracleSpec& o = cfg.oracle;
  if (o.kind == OracleKind::first_order_gaussian || o.kind == OracleKind::grad_gaussian ||
      o.kind == OracleKind::stat_estimation) {
    if (!(o.sigma > 0.0)) bad.push_back("sigma > 0");
  }
  if (o.kind == OracleKind::moment_bounded) {
    if (!(o.alpha > 1.0)) bad.push_back("alpha > 1");
    if (!(o.c > 0.0)) bad.push_back("c > 0");
    if (!(o.eps > 0.0 && o.eps < 1.0)) bad.push_back("oracle eps in (0, 1)");
  }
  if (o.kind == OracleKind::bernoulli_label) {
    if (!(o.kappa >= 1.0)) bad.push_back("kappa >= 1");
    if (!(o.c_lo > 0.0 && o.c_lo <= o.c_hi && o.c_hi < 0.5))
      bad.push_back("0 < c_lo <= c_hi < 1/2");
  }

  const AlgorithmSpec& a = cfg.algorithm;
  if (a.kind == AlgorithmSpec::Kind::active_bisection) {
    if (!(a.vote_factor > 0.0)) bad.push_back("vote_factor > 0");
    if (!(a.eps_target > 0.0 && a.eps_target < 1.0)) bad.push_back("eps_target in (0, 1)");
    if (!(a.exponent >= 1.0)) bad.push_back("exponent >= 1");
  }
  return bad;
}

ExperimentResult hypothesis_test(const ExperimentConfig& cfg) {
  HypoSweep sweep = run_hypo_sweep(cfg, false);
  ExperimentResult res;
  res.mode = SweepMode::hypothesis_test;
  res.n_hypotheses = sweep.rows.empty() ? 0 : int(sweep.rows.front().per_hyp_mean_err.size());
  res.rows = std::move(sweep.rows);

  BoundReport rep;
  rep.name = "ir_per_step_kl";
  rep.value_nats = sweep.max_kl;
  rep.inputs["n_hypotheses"] = double(res.n_hypotheses);
  rep.validity.emplace_back("oracle admits a response divergence",
                            !std::isnan(sweep.max_kl));
  res.reports.push_back(std::move(rep));
  res.completed = true;
  return res;
}

ExperimentResult estimate_complexity(const ExperimentConfig& cfg) {
  HypoSweep sweep = run_hypo_sweep(cfg, true);
  const SweepConfig& sw = cfg.sweep;
  const int n = sweep.rows.empty() ? 0 : int(sweep.rows.front().per_hyp_mean_err.size());
  const int64_t trials = sw.trials;

  ExperimentResult res;
  res.mode = SweepMode::complexity;
  res.n_hypotheses = n;

  for (double eps : sw.eps_grid) {
    ComplexityCell cell;
    cell.eps = eps;
    int64_t prev = 0;
    for (size_t hz = 0; hz < sweep.rows.size() && !cell.resolved; ++hz) {
      const HorizonRow& row = sweep.rows[hz];
      bool pass;
      if (sw.criterion_mean) {
        double worst = 0.0;
        for (double v : row.per_hyp_mean_pow) worst = std::max(worst, v);
        pass = worst < eps;
      } else {
        // Worst-hypothesis exceedance probability against the target level.
        double worst = 0.0;
        const std::vector<double>& pows = sweep.raw_pows[hz];
        for (int i = 0; i < n; ++i) {
          int64_t cnt = 0;
          for (int64_t k = 0; k < trials; ++k)
            if (pows[size_t(i * trials + k)] >= eps) ++cnt;
          worst = std::max(worst, double(cnt) / double(trials));
        }
        pass = worst <= sw.delta;
      }
      if (pass) {
        cell.resolved = true;
        cell.t_pass = row.horizon;
        cell.t_last_fail = prev;
      } else {
        prev = row.horizon;
      }
    }
    if (!cell.resolved) cell.t_last_fail = prev;

    BoundReport rep;
    rep.name = "complexity_estimate";
    rep.value_nats = cell.resolved ? double(cell.t_pass) : 0.0;
    rep.inputs["eps"] = eps;
    rep.inputs["t_pass"] = double(cell.t_pass);
    rep.inputs["t_last_fail"] = double(cell.t_last_fail);
    rep.inputs["resolved"] = cell.resolved ? 1.0 : 0.0;
    rep.inputs["criterion_mean"] = sw.criterion_mean ? 1.0 : 0.0;
    rep.inputs["delta"] = sw.delta;
    rep.validity.emplace_back("criterion met within the horizon grid", cell.resolved);
    res.reports.push_back(std::move(rep));
    res.complexity.push_back(cell);
  }
  res.rows = std::move(sweep.rows);
  res.completed = true;
  return res;
}

ExperimentResult diminishing_returns(const ExperimentConfig& cfg) {
  require(cfg.algorithm.kind == AlgorithmSpec::Kind::sgd, Err::precondition,
          "diminishing_returns: gradient descent algorithm required");
  const Ensemble ens = build_ensemble(cfg.ensemble);
  const Oracle o = build_oracle(cfg.oracle);
  require(o.supports_lf(), Err::unsupported,
          "diminishing_returns: oracle without a per-step divergence");
  require(ens.common_min.has_value(), Err::unsupported,
          "diminishing_returns: ensemble without a shared minimum value");
  const Algo alg = build_algo(cfg.algorithm);
  const SweepConfig& sw = cfg.sweep;
  const double cmin = *ens.common_min;
  const int n = ens.size();
  const int64_t trials = sw.trials;
  const int64_t cells = int64_t(n) * trials;
  const int64_t T = sw.horizons.back();

  // Fixed cell->batch map keeps the reduction order independent of the job
  // count: batch partials are summed in cell order, batches in index order.
  const int64_t nb = std::min(cells, kMaxBatches);
  struct Batch {
    Vec err_sum, err_sq, lf_sum, lf_sq;
  };
  std::vector<Batch> batches{size_t(nb)};
  parallel_cells(nb, sw.jobs, [&](int64_t b) {
    Batch& bt = batches[size_t(b)];
    bt.err_sum.assign(size_t(T), 0.0);
    bt.err_sq.assign(size_t(T), 0.0);
    bt.lf_sum.assign(size_t(T), 0.0);
    bt.lf_sq.assign(size_t(T), 0.0);
    const int64_t lo = cells * b / nb, hi = cells * (b + 1) / nb;
    for (int64_t c = lo; c < hi; ++c) {
      const int64_t hyp = c / trials, trial = c % trials;
      const Instance& f = ens.at(int(hyp));
      const uint64_t seed =
          CounterRng::derive({sw.base_seed, uint64_t(hyp), uint64_t(trial)});
      run_stream(alg, o, f, T, seed, [&](int64_t t, ConstSpan x) {
        if (t > T) return;
        const double e = pow_err(f.value(x) - f.min_value(), sw.r);
        const double lf = o.lf_term(f, x, cmin);
        bt.err_sum[size_t(t - 1)] += e;
        bt.err_sq[size_t(t - 1)] += e * e;
        bt.lf_sum[size_t(t - 1)] += lf;
        bt.lf_sq[size_t(t - 1)] += lf * lf;
      });
    }
  });

  TracesReport tr;
  tr.err_mean.assign(size_t(T), 0.0);
  tr.err_se.assign(size_t(T), 0.0);
  tr.lf_mean.assign(size_t(T), 0.0);
  tr.lf_se.assign(size_t(T), 0.0);
  Vec err_sq(size_t(T), 0.0), lf_sq(size_t(T), 0.0);
  for (const Batch& bt : batches)
    for (int64_t t = 0; t < T; ++t) {
      tr.err_mean[size_t(t)] += bt.err_sum[size_t(t)];
      tr.lf_mean[size_t(t)] += bt.lf_sum[size_t(t)];
      err_sq[size_t(t)] += bt.err_sq[size_t(t)];
      lf_sq[size_t(t)] += bt.lf_sq[size_t(t)];
    }
  const double nc = double(cells);
  for (int64_t t = 0; t < T; ++t) {
    tr.err_mean[size_t(t)] /= nc;
    tr.lf_mean[size_t(t)] /= nc;
    if (cells > 1) {
      const double ev = std::max(0.0, err_sq[size_t(t)] - nc * tr.err_mean[size_t(t)] * tr.err_mean[size_t(t)]);
      const double lv = std::max(0.0, lf_sq[size_t(t)] - nc * tr.lf_mean[size_t(t)] * tr.lf_mean[size_t(t)]);
      tr.err_se[size_t(t)] = std::sqrt(ev / (nc - 1.0) / nc);
      tr.lf_se[size_t(t)] = std::sqrt(lv / (nc - 1.0) / nc);
    }
  }

  // Pointwise cap: for quadratics under a value+gradient oracle the per-step
  // divergence is err*(err+2)/(2*sigma^2) <= err*(D^2+1)/sigma^2 on a domain
  // of diameter D, since err <= D^2/2.
  if (ens.family == Family::quadratic && sw.r == 1.0 && o.sigma() > 0.0) {
    const double d = ens.domain.diameter();
    tr.ratio_const = (d * d + 1.0) / (o.sigma() * o.sigma());
    tr.pointwise_checked = true;
    for (int64_t t = 0; t < T && tr.pointwise_ok; ++t)
      if (tr.lf_mean[size_t(t)] > tr.ratio_const * tr.err_mean[size_t(t)]) {
        tr.pointwise_ok = false;
        tr.first_pointwise_fail = t + 1;
      }
  }

  tr.fit_lo = sw.fit_lo > 0 ? sw.fit_lo : std::max<int64_t>(1, T / 100);
  tr.fit_hi = sw.fit_hi > 0 ? std::min(sw.fit_hi, T) : T;
  bool err_fit_ok = false, lf_fit_ok = false;
  std::vector<std::pair<double, double>> pts;
  auto window_fit = [&](const Vec& trace, FitResult& out) {
    pts.clear();
    for (int64_t t = tr.fit_lo; t <= tr.fit_hi; ++t)
      if (trace[size_t(t - 1)] > 0.0) pts.emplace_back(double(t), trace[size_t(t - 1)]);
    try {
      out = fit_exponent(pts);
      return true;
    } catch (const Error&) {
      out = FitResult{};
      return false;
    }
  };
  err_fit_ok = window_fit(tr.err_mean, tr.err_fit);
  lf_fit_ok = window_fit(tr.lf_mean, tr.lf_fit);

  ExperimentResult res;
  res.mode = SweepMode::traces;
  res.n_hypotheses = n;
  const double max_kl = try_max_kl(ens, o);
  res.rows.reserve(size_t(T));
  for (int64_t t = 1; t <= T; ++t) {
    HorizonRow row;
    row.horizon = t;
    row.mean_err = tr.err_mean[size_t(t - 1)];
    // For trace rows the information columns carry the per-step divergence
    // estimate: mean +- 2 standard errors.
    row.mi_nats = tr.lf_mean[size_t(t - 1)];
    row.mi_lo = tr.lf_mean[size_t(t - 1)] - 2.0 * tr.lf_se[size_t(t - 1)];
    row.mi_hi = tr.lf_mean[size_t(t - 1)] + 2.0 * tr.lf_se[size_t(t - 1)];
    row.ir_upper_nats = std::isnan(max_kl) ? kNaN : double(t) * max_kl;
    res.rows.push_back(std::move(row));
  }

  auto fit_report = [&](const char* name, const FitResult& fit, bool ok) {
    BoundReport rep;
    rep.name = name;
    rep.value_nats = fit.slope;
    rep.inputs["slope"] = fit.slope;
    rep.inputs["ci_half"] = fit.ci_half;
    rep.inputs["r2"] = fit.r2;
    rep.inputs["intercept"] = fit.intercept;
    rep.inputs["fit_lo"] = double(tr.fit_lo);
    rep.inputs["fit_hi"] = double(tr.fit_hi);
    rep.inputs["t_max"] = double(T);
    rep.inputs["trials_total"] = nc;
    rep.validity.emplace_back("fit window holds at least 4 positive trace points", ok);
    if (tr.pointwise_checked) {
      rep.inputs["ratio_const"] = tr.ratio_const;
      rep.validity.emplace_back("per-step divergence within ratio_const times mean error",
                                tr.pointwise_ok);
    }
    res.reports.push_back(std::move(rep));
  };
  fit_report("traces_err_fit", tr.err_fit, err_fit_ok);
  fit_report("traces_lf_fit", tr.lf_fit, lf_fit_ok);

  // Even-power companion under the second-moment metric: the mean err^2
  // trace must obey K*ln(1/eps_T) - L <= sum eps_t^((m-1)/m), since the
  // divergence budget through step T caps how distinguishable the pair is.
  if (ens.family == Family::even_power && o.kind() == OracleKind::first_order_gaussian &&
      sw.r == 2.0) {
    const double m = double(ens.instances.front().power());
    const double s2 = o.sigma() * o.sigma();
    const double K = 2.0 * s2 / (3.0 * (m * m * m + m * m));
    const double cm = std::log(1.0 / (std::pow(3.0, 1.0 / m) * 8.0)) / 3.0;
    const double L = -2.0 * s2 * cm / (m * m + 1.0);
    const double alpha = (m - 1.0) / m;
    const double cand = 0.5 * std::pow(K / alpha, 1.0 / alpha);
    RecurrenceReport rr = recurrence_check(K, L, alpha, tr.err_mean, cand);
    BoundReport rep;
    rep.name = "recurrence_check";
    rep.value_nats = double(rr.holds_up_to);
    rep.inputs["K"] = K;
    rep.inputs["L"] = L;
    rep.inputs["alpha"] = alpha;
    rep.inputs["candidate_c"] = cand;
    rep.inputs["holds_up_to"] = double(rr.holds_up_to);
    rep.inputs["witnesses"] = double(rr.witnesses.size());
    if (rr.first_violation) rep.inputs["first_violation"] = double(*rr.first_violation);
    rep.validity.emplace_back("recurrence satisfied at every prefix", rr.holds_all);
    res.reports.push_back(std::move(rep));
  }

  res.traces = std::move(tr);
  res.completed = true;
  return res;
}

double excess_risk(double x, double theta, double kappa, double c_hi) {
  const double d = std::abs(x - theta);
  if (d == 0.0) return 0.0;
  if (kappa == 1.0) return 2.0 * c_hi * d;  // constant margin, never clamped
  // |2*eta(u) - 1| = min(2*c_hi*u^(kappa-1), 1) at distance u; integrate to d.
  const double dc = std::pow(2.0 * c_hi, -1.0 / (kappa - 1.0));
  if (d <= dc) return (2.0 * c_hi / kappa) * std::pow(d, kappa);
  return (2.0 * c_hi / kappa) * std::pow(dc, kappa) + (d - dc);
}

ExperimentResult active_learning_run(const ExperimentConfig& cfg) {
  require(cfg.algorithm.kind == AlgorithmSpec::Kind::active_bisection, Err::precondition,
          "active run: active_bisection algorithm required");
  require(cfg.oracle.kind == OracleKind::bernoulli_label, Err::precondition,
          "active run: bernoulli_label oracle required");
  const double kappa = cfg.oracle.kappa;
  require(kappa >= 1.0 && kappa <= 2.0, Err::unsupported, "active run: kappa in [1, 2]");
  const Oracle o = build_oracle(cfg.oracle);
  const Algo alg = build_algo(cfg.algorithm);
  const SweepConfig& sw = cfg.sweep;
  const Domain dom = Domain::interval(0.0, 1.0);
  const int64_t trials = sw.trials;
  const int64_t nh = int64_t(sw.horizons.size());
  const int64_t t_max = sw.horizons.back();

  std::vector<double> risk(size_t(trials * nh), 0.0);
  parallel_cells(trials, sw.jobs, [&](int64_t k) {
    const uint64_t seed = CounterRng::derive({sw.base_seed, 0xacull, uint64_t(k)});
    CounterRng pre(CounterRng::derive({seed, 0x74686574ull}));
    const double theta = pre.next_unit();
    const Instance f = Instance::threshold(dom, theta);
    size_t next = 0;
    run_stream(alg, o, f, t_max, seed, [&](int64_t t, ConstSpan x) {
      while (next < size_t(nh) && t == sw.horizons[next] + 1) {
        risk[size_t(k) * size_t(nh) + next] = excess_risk(x[0], theta, kappa, cfg.oracle.c_hi);
        ++next;
      }
    });
  });

  ActiveReport ar;
  ar.horizons = sw.horizons;
  ar.risk_mean.assign(size_t(nh), 0.0);
  ar.risk_se.assign(size_t(nh), 0.0);
  Vec sq(size_t(nh), 0.0);
  for (int64_t k = 0; k < trials; ++k)
    for (int64_t j = 0; j < nh; ++j) {
      const double v = risk[size_t(k) * size_t(nh) + size_t(j)];
      ar.risk_mean[size_t(j)] += v;
      sq[size_t(j)] += v * v;
    }
  const double nt = double(trials);
  for (int64_t j = 0; j < nh; ++j) {
    ar.risk_mean[size_t(j)] /= nt;
    if (trials > 1) {
      const double var =
          std::max(0.0, sq[size_t(j)] - nt * ar.risk_mean[size_t(j)] * ar.risk_mean[size_t(j)]);
      ar.risk_se[size_t(j)] = std::sqrt(var / (nt - 1.0) / nt);
    }
  }
  // Median risk per horizon. A small fraction of trials discards the
  // threshold-bearing interval on an unlucky vote and never recovers; those
  // trials put a floor under the mean, so the rate is read off the median.
  ar.risk_med.assign(size_t(nh), 0.0);
  {
    Vec col(size_t(trials), 0.0);
    for (int64_t j = 0; j < nh; ++j) {
      for (int64_t k = 0; k < trials; ++k) col[size_t(k)] = risk[size_t(k) * size_t(nh) + size_t(j)];
      std::sort(col.begin(), col.end());
      const size_t m = size_t(trials) / 2;
      ar.risk_med[size_t(j)] =
          trials % 2 == 1 ? col[m] : 0.5 * (col[m - 1] + col[m]);
    }
  }

  const int64_t flo = sw.fit_lo > 0 ? sw.fit_lo : sw.horizons.front();
  const int64_t fhi = sw.fit_hi > 0 ? sw.fit_hi : t_max;
  ar.exponential_fit = kappa == 1.0;
  bool fit_ok = false;
  if (ar.exponential_fit) {
    // Constant label margin: risk halves per voting epoch, so ln(risk) is
    // linear in t.
    Vec xs, ys;
    for (int64_t j = 0; j < nh; ++j)
      if (sw.horizons[size_t(j)] >= flo && sw.horizons[size_t(j)] <= fhi &&
          ar.risk_med[size_t(j)] > 0.0) {
        xs.push_back(double(sw.horizons[size_t(j)]));
        ys.push_back(std::log(ar.risk_med[size_t(j)]));
      }
    try {
      require(xs.size() >= 4, Err::precondition, "active fit: at least 4 points");
      ar.fit = linfit(xs, ys);
      fit_ok = true;
    } catch (const Error&) {
      ar.fit = FitResult{};
    }
  } else {
    std::vector<std::pair<double, double>> pts;
    for (int64_t j = 0; j < nh; ++j)
      if (sw.horizons[size_t(j)] >= flo && sw.horizons[size_t(j)] <= fhi &&
          ar.risk_med[size_t(j)] > 0.0)
        pts.emplace_back(double(sw.horizons[size_t(j)]), ar.risk_med[size_t(j)]);
    try {
      ar.fit = fit_exponent(pts);
      fit_ok = true;
    } catch (const Error&) {
      ar.fit = FitResult{};
    }
  }

  ExperimentResult res;
  res.mode = SweepMode::active;
  res.n_hypotheses = 0;
  res.rows.reserve(size_t(nh));
  for (int64_t j = 0; j < nh; ++j) {
    HorizonRow row;
    row.horizon = sw.horizons[size_t(j)];
    row.mean_err = ar.risk_mean[size_t(j)];
    res.rows.push_back(std::move(row));
  }

  BoundReport rep;
  rep.name = "active_risk_fit";
  rep.value_nats = ar.fit.slope;
  rep.inputs["kappa"] = kappa;
  rep.inputs["c_hi"] = cfg.oracle.c_hi;
  rep.inputs["slope"] = ar.fit.slope;
  rep.inputs["ci_half"] = ar.fit.ci_half;
  rep.inputs["r2"] = ar.fit.r2;
  rep.inputs["trials"] = nt;
  rep.inputs["t_max"] = double(t_max);
  rep.inputs["risk_med_first"] = ar.risk_med.front();
  rep.inputs["risk_med_last"] = ar.risk_med.back();
  rep.validity.emplace_back("fit window holds at least 4 positive risk points", fit_ok);
  if (ar.exponential_fit) {
    rep.validity.emplace_back("log-risk is linear in t with r2 >= 0.9", fit_ok && ar.fit.r2 >= 0.9);
    rep.validity.emplace_back("risk decreases", fit_ok && ar.fit.slope < 0.0);
  } else {
    const double target = -kappa / (2.0 * kappa - 2.0);
    rep.inputs["target_exponent"] = target;
    rep.validity.emplace_back("fitted exponent within 0.5 of the target",
                              fit_ok && std::abs(ar.fit.slope - target) <= 0.5);
  }
  res.reports.push_back(std::move(rep));
  res.active = std::move(ar);
  res.completed = true;
  return res;
}

ExperimentResult moment_check(const ExperimentConfig& cfg) {
  require(cfg.oracle.kind == OracleKind::moment_bounded, Err::precondition,
          "moment_check: moment_bounded oracle required");
  const Ensemble ens = build_ensemble(cfg.ensemble);
  require(ens.family == Family::linear, Err::precondition,
          "moment_check: linear instances required");
  const Oracle o = build_oracle(cfg.oracle);
  const SweepConfig& sw = cfg.sweep;
  const int n = ens.size();
  const int probes = sw.probes;
  const int64_t samples = sw.samples;
  const size_t dim = size_t(ens.domain.dim());

  // Probe points are uniform over the box, one draw stream per probe.
  std::vector<Vec> xs{size_t(probes)};
  for (int p = 0; p < probes; ++p) {
    CounterRng rng(CounterRng::derive({sw.base_seed, 0x4040ull, uint64_t(p)}));
    Vec x(dim, 0.0);
    for (size_t d = 0; d < dim; ++d) {
      const double lo = ens.domain.lower(int(d)), hi = ens.domain.upper(int(d));
      x[d] = lo + rng.next_unit() * (hi - lo);
    }
    xs[size_t(p)] = std::move(x);
  }

  const int64_t cells = int64_t(probes) * n;
  std::vector<MomentProbe> out{size_t(cells)};
  parallel_cells(cells, sw.jobs, [&](int64_t c) {
    const int p = int(c / n), i = int(c % n);
    const Instance& f = ens.at(i);
    MomentProbe& mp = out[size_t(c)];
    mp.x = xs[size_t(p)];
    mp.hypothesis = i;
    mp.f_true = f.value(mp.x);
    mp.grad_true = f.subgradient(mp.x);
    mp.mean_v1.assign(dim, 0.0);
    mp.se_v1.assign(dim, 0.0);
    Vec m2_1(dim, 0.0);
    double m2_0 = 0.0, moment_sum = 0.0;
    CounterRng rng(CounterRng::derive({sw.base_seed, 0x6d6full, uint64_t(p), uint64_t(i)}));
    Response r;
    for (int64_t s = 0; s < samples; ++s) {
      o.sample_into(f, mp.x, rng, r);
      const FirstOrder& fo = std::get<FirstOrder>(r);
      welford(fo.value, s, mp.mean_v0, m2_0);
      for (size_t d = 0; d < dim; ++d) welford(fo.grad[d], s, mp.mean_v1[d], m2_1[d]);
      moment_sum += std::pow(std::abs(fo.value - mp.f_true), cfg.oracle.alpha);
    }
    const double ns = double(samples);
    mp.se_v0 = std::sqrt(m2_0 / (ns - 1.0) / ns);
    for (size_t d = 0; d < dim; ++d) mp.se_v1[d] = std::sqrt(m2_1[d] / (ns - 1.0) / ns);
    mp.moment_alpha = moment_sum / ns;
    mp.unbiased_ok = std::abs(mp.mean_v0 - mp.f_true) <= 3.0 * mp.se_v0;
    for (size_t d = 0; d < dim && mp.unbiased_ok; ++d)
      mp.unbiased_ok = std::abs(mp.mean_v1[d] - mp.grad_true[d]) <= 3.0 * mp.se_v1[d];
    mp.moment_ok = mp.moment_alpha <= 1.0;
  });

  ExperimentResult res;
  res.mode = SweepMode::moment_check;
  res.n_hypotheses = n;
  const double mix =
      cfg.oracle.c * std::pow(cfg.oracle.eps, cfg.oracle.alpha / (cfg.oracle.alpha - 1.0));
  for (const MomentProbe& mp : out) {
    BoundReport rep;
    rep.name = "moment_check";
    rep.value_nats = mp.moment_alpha;
    rep.inputs["hypothesis"] = double(mp.hypothesis);
    rep.inputs["alpha"] = cfg.oracle.alpha;
    rep.inputs["c"] = cfg.oracle.c;
    rep.inputs["eps"] = cfg.oracle.eps;
    rep.inputs["mix_prob"] = mix;
    rep.inputs["n_samples"] = double(samples);
    rep.inputs["f_true"] = mp.f_true;
    rep.inputs["mean_v0"] = mp.mean_v0;
    rep.inputs["se_v0"] = mp.se_v0;
    for (size_t d = 0; d < mp.x.size(); ++d) rep.inputs["x_" + std::to_string(d)] = mp.x[d];
    rep.validity.emplace_back("value channel mean within 3 standard errors of f(x)",
                              mp.unbiased_ok);
    rep.validity.emplace_back("alpha-th central moment of the value channel at most 1",
                              mp.moment_ok);
    res.reports.push_back(std::move(rep));
  }
  res.moment = std::move(out);
  res.completed = true;
  return res;
}

ExperimentResult bound_eval(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.mode = SweepMode::bound_eval;
  for (ThmBound w : cfg.bound.which) {
    std::map<std::string, double> sub;
    for (const std::string& key : bound_keys(w)) {
      auto it = cfg.bound.params.find(key);
      if (it != cfg.bound.params.end()) sub[key] = it->second;
    }
    res.reports.push_back(thm_lower(w, sub));
  }
  res.completed = true;
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  std::vector<std::string> bad = validate(cfg);
  if (!bad.empty()) {
    std::string msg = "invalid experiment config: ";
    for (size_t i = 0; i < bad.size(); ++i) {
      if (i) msg += "; ";
      msg += bad[i];
    }
    fail(Err::precondition, msg);
  }
  switch (cfg.sweep.mode) {
    case SweepMode::hypothesis_test: return hypothesis_test(cfg);
    case SweepMode::complexity: return estimate_complexity(cfg);
    case SweepMode::traces: return diminishing_returns(cfg);
    case SweepMode::active: return active_learning_run(cfg);
    case SweepMode::moment_check: return moment_check(cfg);
    case SweepMode::bound_eval: return bound_eval(cfg);
  }
  fail(Err::internal, "run_experiment: unknown mode");
}

}  // namespace ob
