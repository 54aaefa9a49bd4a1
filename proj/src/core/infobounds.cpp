#include "core/infobounds.hpp"

#include <algorithm>
#include <cmath>

namespace ob {

double fano_lower(int num_hypotheses, double delta) {
  require(num_hypotheses == 2 || num_hypotheses > 4, Err::unsupported,
          "fano_lower: hypothesis count must be 2 or greater than 4");
  require(delta >= 0.0 && delta <= 0.5, Err::invalid_argument, "fano_lower: delta in [0, 1/2]");
  if (num_hypotheses == 2) return std::log(2.0) - binary_entropy_nats(delta);
  return (1.0 - delta) * std::log(double(num_hypotheses)) - std::log(2.0);
}

namespace {

bool same_params(const Instance& a, const Instance& b) {
  if (a.family() != b.family()) return false;
  switch (a.family()) {
    case Family::norm_distance: return a.theta() == b.theta() && a.scale() == b.scale();
    case Family::quadratic: return a.theta() == b.theta();
    case Family::even_power: return a.theta() == b.theta() && a.power() == b.power();
    case Family::linear: return a.slope() == b.slope() && a.sign() == b.sign();
    case Family::threshold: return a.theta() == b.theta();
  }
  return false;
}

// sup over the domain of |<a, x> + b|.
double sup_abs_affine(const Domain& dom, ConstSpan a, double b) {
  double at_center = dot(a, dom.center()) + b;
  double sway = dom.kind() == DomainKind::box ? dom.radius() * norm1(a) : dom.radius() * norm2(a);
  return std::fabs(at_center) + sway;
}

// Exact sup-KL for a pair when the value gap is affine in x and the gradient
// gap constant (quadratic/linear families under Gaussian oracles).
double affine_pair_sup_kl(const Instance& fi, const Instance& fj, const Oracle& o) {
  const Domain& dom = fi.domain();
  const int n = dom.dim();
  Vec a(size_t(n), 0.0), dg(size_t(n), 0.0);
  double b = 0.0;
  if (fi.family() == Family::quadratic) {
    // f_i - f_j = <theta_j - theta_i, x> + (|theta_i|^2 - |theta_j|^2)/2
    for (int k = 0; k < n; ++k) {
      a[size_t(k)] = fj.theta()[size_t(k)] - fi.theta()[size_t(k)];
      dg[size_t(k)] = a[size_t(k)];
      b += 0.5 * (fi.theta()[size_t(k)] * fi.theta()[size_t(k)] -
                  fj.theta()[size_t(k)] * fj.theta()[size_t(k)]);
    }
  } else {
    for (int k = 0; k < n; ++k) {
      a[size_t(k)] = double(fi.sign()) * fi.slope()[size_t(k)] -
                     double(fj.sign()) * fj.slope()[size_t(k)];
      dg[size_t(k)] = a[size_t(k)];
    }
  }
  double s2 = o.sigma() * o.sigma();
  if (o.kind() == OracleKind::grad_gaussian) return norm_sq(dg) / (2.0 * s2);
  double df = sup_abs_affine(dom, a, b);
  return (df * df + norm_sq(dg)) / (2.0 * s2);
}

std::vector<Vec> grid_points(const Ensemble& ens, const GridSpec& grid) {
  const Domain& dom = ens.domain;
  std::vector<Vec> pts;
  if (dom.dim() == 1) {
    int p = std::max(2, grid.points_1d);
    double lo = dom.center()[0] - dom.radius(), hi = dom.center()[0] + dom.radius();
    pts.reserve(size_t(p));
    for (int k = 0; k < p; ++k)
      pts.push_back({lo + (hi - lo) * double(k) / double(p - 1)});
    return pts;
  }
  pts.reserve(size_t(grid.random_points) + size_t(ens.size()) + 1);
  pts.push_back(dom.center());
  for (int i = 0; i < ens.size(); ++i) pts.push_back(ens.at(i).minimizer());
  CounterRng rng(CounterRng::derive({grid.seed, uint64_t(dom.dim())}));
  const int n = dom.dim();
  for (int k = 0; k < grid.random_points; ++k) {
    Vec x(size_t(n), 0.0);
    if (dom.kind() == DomainKind::box) {
      for (int i = 0; i < n; ++i)
        x[size_t(i)] = dom.center()[size_t(i)] + dom.radius() * (2.0 * rng.next_unit() - 1.0);
    } else {
      double nn = 0.0;
      for (int i = 0; i < n; ++i) {
        x[size_t(i)] = rng.next_gaussian();
        nn += x[size_t(i)] * x[size_t(i)];
      }
      double rad = dom.radius() * std::pow(rng.next_unit(), 1.0 / double(n));
      double f = nn > 0.0 ? rad / std::sqrt(nn) : 0.0;
      for (int i = 0; i < n; ++i) x[size_t(i)] = dom.center()[size_t(i)] + f * x[size_t(i)];
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

}  // namespace

double max_response_kl_grid(const Ensemble& ens, const Oracle& o, const GridSpec& grid) {
  if (ens.size() < 2) return 0.0;
  std::vector<Vec> pts = grid_points(ens, grid);
  double best = 0.0;
  for (int i = 0; i < ens.size(); ++i)
    for (int j = 0; j < ens.size(); ++j) {
      if (i == j) continue;
      for (const Vec& x : pts) {
        double v = o.response_kl(ens.at(i), ens.at(j), x);
        if (v > best) best = v;
        if (best == kInf) return kInf;
      }
    }
  return best;
}

double max_response_kl(const Ensemble& ens, const Oracle& o, const GridSpec& grid) {
  if (ens.size() < 2) return 0.0;
  switch (o.kind()) {
    case OracleKind::stat_estimation: {
      double best = 0.0;
      for (int i = 0; i < ens.size(); ++i)
        for (int j = i + 1; j < ens.size(); ++j)
          best = std::max(best, dist_sq(ens.at(i).minimizer(), ens.at(j).minimizer()));
      return best / (2.0 * o.sigma() * o.sigma());
    }
    case OracleKind::noiseless_first_order: {
      for (int i = 0; i < ens.size(); ++i)
        for (int j = i + 1; j < ens.size(); ++j)
          if (!same_params(ens.at(i), ens.at(j))) return kInf;
      return 0.0;
    }
    case OracleKind::moment_bounded:
      fail(Err::unsupported, "response_kl: undefined for the moment_bounded oracle");
    case OracleKind::first_order_gaussian:
    case OracleKind::grad_gaussian: {
      if (ens.family == Family::quadratic || ens.family == Family::linear) {
        double best = 0.0;
        for (int i = 0; i < ens.size(); ++i)
          for (int j = i + 1; j < ens.size(); ++j)
            best = std::max(best, affine_pair_sup_kl(ens.at(i), ens.at(j), o));
        return best;
      }
      if (ens.family == Family::norm_distance) {
        // Value gap <= scale*|theta_i - theta_j|, gradient gap <= 2*scale;
        // dominates the true sup (exactly the grad term for grad-only noise).
        double best = 0.0, s2 = o.sigma() * o.sigma();
        for (int i = 0; i < ens.size(); ++i)
          for (int j = i + 1; j < ens.size(); ++j) {
            double sc = std::min(ens.at(i).scale(), ens.at(j).scale());
            double grad_gap_sq = 4.0 * sc * sc;
            double v = o.kind() == OracleKind::grad_gaussian
                           ? grad_gap_sq / (2.0 * s2)
                           : (sc * sc * dist_sq(ens.at(i).theta(), ens.at(j).theta()) +
                              grad_gap_sq) /
                                 (2.0 * s2);
            best = std::max(best, v);
          }
        return best;
      }
      return max_response_kl_grid(ens, o, grid);
    }
    case OracleKind::bernoulli_label:
      return max_response_kl_grid(ens, o, grid);
  }
  fail(Err::internal, "max_response_kl: bad oracle kind");
}

double ir_upper(const Ensemble& ens, const Oracle& o, int64_t horizon, const GridSpec& grid) {
  require(horizon >= 1, Err::invalid_argument, "ir_upper: horizon >= 1");
  return double(horizon) * max_response_kl(ens, o, grid);
}

std::vector<double> lf_terms(const std::vector<Vec>& queries, const Ensemble& ens,
                             const Oracle& o, int chosen) {
  require(ens.common_min.has_value(), Err::unsupported,
          "lf_terms: ensemble without a shared minimum value");
  require(chosen >= 0 && chosen < ens.size(), Err::invalid_argument,
          "lf_terms: chosen index in range");
  const Instance& f = ens.at(chosen);
  std::vector<double> out;
  out.reserve(queries.size());
  for (const Vec& x : queries) out.push_back(o.lf_term(f, x, *ens.common_min));
  return out;
}

const char* thm_bound_name(ThmBound which) {
  switch (which) {
    case ThmBound::thm1: return "thm1";
    case ThmBound::thm2_fog: return "thm2_fog";
    case ThmBound::thm2_sog: return "thm2_sog";
    case ThmBound::thm3_fog: return "thm3_fog";
    case ThmBound::thm3_sog: return "thm3_sog";
    case ThmBound::thm4: return "thm4";
    case ThmBound::thm8_k1: return "thm8_k1";
  }
  return "?";
}

std::optional<ThmBound> thm_bound_from_name(const std::string& name) {
  for (ThmBound w : {ThmBound::thm1, ThmBound::thm2_fog, ThmBound::thm2_sog, ThmBound::thm3_fog,
                     ThmBound::thm3_sog, ThmBound::thm4, ThmBound::thm8_k1})
    if (name == thm_bound_name(w)) return w;
  return std::nullopt;
}

namespace {

void check_keys(const std::map<std::string, double>& params,
                std::initializer_list<const char*> keys, const char* bound) {
  for (const char* k : keys)
    require(params.count(k) == 1, Err::invalid_argument,
            std::string(bound) + ": missing parameter " + k);
  for (const auto& [k, v] : params) {
    bool known = false;
    for (const char* want : keys) known = known || k == want;
    require(known, Err::invalid_argument, std::string(bound) + ": unknown parameter " + k);
  }
}

}  // namespace

BoundReport thm_lower(ThmBound which, const std::map<std::string, double>& params) {
  BoundReport rep;
  rep.name = thm_bound_name(which);
  rep.inputs = params;
  auto flag = [&rep](std::string pre, bool ok) { rep.validity.emplace_back(std::move(pre), ok); };
  const double ln2 = std::log(2.0);
  switch (which) {
    case ThmBound::thm1: {
      check_keys(params, {"cstar", "n_hypotheses", "delta"}, "thm1");
      double cs = params.at("cstar"), nn = params.at("n_hypotheses"), d = params.at("delta");
      int n = int(nn);
      flag("cstar > 0", cs > 0.0 && std::isfinite(cs));
      flag("n_hypotheses is 2 or greater than 4", double(n) == nn && (n == 2 || n > 4));
      flag("delta in (0, 1/2)", d > 0.0 && d < 0.5);
      double id_bound = n == 2 ? ln2 - binary_entropy_nats(std::clamp(d, 0.0, 1.0))
                               : (1.0 - d) * std::log(std::max(nn, 1.0)) - ln2;
      rep.value_nats = id_bound / cs;
      break;
    }
    case ThmBound::thm2_fog:
    case ThmBound::thm2_sog: {
      const char* nm = thm_bound_name(which);
      check_keys(params, {"n", "s_x", "delta", "sigma", "eps", "r"}, nm);
      double n = params.at("n"), s = params.at("s_x"), d = params.at("delta");
      double sg = params.at("sigma"), eps = params.at("eps"), r = params.at("r");
      flag("n >= 16", n >= 16.0);
      flag("s_x > 0", s > 0.0);
      flag("eps > 0", eps > 0.0);
      flag("eps <= (s_x*sqrt(n/8))^r", eps <= std::pow(s * std::sqrt(n / 8.0), r));
      flag("delta in (0, 1/2)", d > 0.0 && d < 0.5);
      flag("sigma > 0", sg > 0.0);
      flag("r >= 1", r >= 1.0);
      double denom = which == ThmBound::thm2_fog ? 128.0 * (n * s * s + 1.0) : 128.0;
      rep.value_nats =
          ((1.0 - d) * n - 8.0) * n * s * s * ln2 / denom * sg * sg / std::pow(eps, 2.0 / r);
      break;
    }
    case ThmBound::thm3_fog:
    case ThmBound::thm3_sog: {
      const char* nm = thm_bound_name(which);
      check_keys(params, {"n", "d_x", "delta", "sigma", "eps", "r"}, nm);
      double n = params.at("n"), dx = params.at("d_x"), d = params.at("delta");
      double sg = params.at("sigma"), eps = params.at("eps"), r = params.at("r");
      double s = dx / (2.0 * std::sqrt(std::max(n, 1.0)));  // box half-side from the l2 diameter
      flag("n >= 16", n >= 16.0);
      flag("d_x > 0", dx > 0.0);
      flag("eps > 0", eps > 0.0);
      flag("eps <= (n*s_x^2/16)^r with s_x = d_x/(2*sqrt(n))",
           eps <= std::pow(n * s * s / 16.0, r));
      flag("delta in (0, 1/2)", d > 0.0 && d < 0.5);
      flag("sigma > 0", sg > 0.0);
      flag("r >= 1", r >= 1.0);
      double denom = which == ThmBound::thm3_fog ? 256.0 * (dx * dx + 1.0) : 256.0;
      rep.value_nats = ((1.0 - d) * n - 8.0) * ln2 / denom * sg * sg / std::pow(eps, 1.0 / r);
      break;
    }
    case ThmBound::thm4: {
      check_keys(params, {"alpha", "c", "delta", "eps"}, "thm4");
      double al = params.at("alpha"), c = params.at("c"), d = params.at("delta");
      double eps = params.at("eps");
      flag("alpha > 1", al > 1.0);
      flag("c > 0", c > 0.0);
      flag("eps < min{L/2^(1/alpha), 1} with L = 1",
           eps > 0.0 && eps < std::min(std::pow(2.0, -1.0 / al), 1.0));
      flag("delta in (0, 1/2)", d > 0.0 && d < 0.5);
      rep.value_nats = (ln2 - binary_entropy_nats(std::clamp(d, 0.0, 1.0))) / (c * ln2) *
                       std::pow(eps, -al / (al - 1.0));
      break;
    }
    case ThmBound::thm8_k1: {
      check_keys(params, {"cap_c", "t"}, "thm8_k1");
      double cc = params.at("cap_c"), t = params.at("t");
      flag("0 < cap_c < 1/2", cc > 0.0 && cc < 0.5);
      flag("t >= 1", t >= 1.0);
      rep.value_nats = std::exp2(-6.0 * cc * cc * t);  // risk probability, not nats
      break;
    }
  }
  if (!std::isfinite(rep.value_nats)) {
    require(!rep.all_valid(), Err::internal, "thm_lower: non-finite value with valid inputs");
    rep.value_nats = 0.0;
  }
  return rep;
}

RecurrenceReport recurrence_check(double K, double L, double alpha, ConstSpan eps_seq,
                                  double candidate_c) {
  require(K > 0.0 && std::isfinite(K), Err::invalid_argument, "recurrence_check: K > 0");
  require(alpha > 0.0 && std::isfinite(alpha), Err::invalid_argument,
          "recurrence_check: alpha > 0");
  require(std::isfinite(L), Err::invalid_argument, "recurrence_check: L finite");
  RecurrenceReport rep;
  double sum = 0.0;
  for (size_t i = 0; i < eps_seq.size(); ++i) {
    double e = eps_seq[i];
    require(e >= 0.0, Err::invalid_argument, "recurrence_check: eps_seq nonnegative");
    sum += std::pow(e, alpha);
    double lhs = e > 0.0 ? K * std::log(1.0 / e) - L : kInf;
    if (lhs > sum && !rep.first_violation) {
      rep.first_violation = int64_t(i) + 1;
      rep.holds_all = false;
    }
    if (candidate_c > 0.0 && rep.witnesses.size() < 64 &&
        e >= candidate_c * std::pow(double(i + 1), -1.0 / alpha))
      rep.witnesses.push_back(int64_t(i) + 1);
  }
  rep.holds_up_to = rep.first_violation ? *rep.first_violation - 1 : int64_t(eps_seq.size());
  return rep;
}

MiEstimate plugin_mi(const std::vector<int64_t>& counts, int n) {
  require(n >= 1 && counts.size() == size_t(n) * size_t(n), Err::invalid_argument,
          "plugin_mi: counts must be an n x n matrix");
  std::vector<int64_t> row(size_t(n), 0), col(size_t(n), 0);
  int64_t total = 0;
  int64_t nonzero_cells = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int64_t c = counts[size_t(i) * size_t(n) + size_t(j)];
      require(c >= 0, Err::invalid_argument, "plugin_mi: counts nonnegative");
      row[size_t(i)] += c;
      col[size_t(j)] += c;
      total += c;
      if (c > 0) ++nonzero_cells;
    }
  require(total > 0, Err::precondition, "plugin_mi: at least two rows with positive counts");
  MiEstimate est;
  est.miller_madow = double(nonzero_cells - 1) / (2.0 * double(total));
  int rows_nonzero = 0;
  for (int i = 0; i < n; ++i) rows_nonzero += row[size_t(i)] > 0 ? 1 : 0;
  if (rows_nonzero < 2) return est;  // degenerate marginal carries no information
  double mi = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int64_t c = counts[size_t(i) * size_t(n) + size_t(j)];
      if (c == 0) continue;
      mi += double(c) / double(total) *
            std::log(double(c) * double(total) / (double(row[size_t(i)]) * double(col[size_t(j)])));
    }
  est.mi_nats = std::max(0.0, mi);
  return est;
}

MiInterval bootstrap_mi(const std::vector<int64_t>& counts, int n, int resamples, uint64_t seed) {
  require(resamples >= 2, Err::invalid_argument, "bootstrap_mi: resamples >= 2");
  MiEstimate base = plugin_mi(counts, n);
  CounterRng rng(CounterRng::derive({seed, 0xb0075ull}));
  std::vector<int64_t> re(counts.size(), 0);
  std::vector<double> cdf(size_t(n), 0.0);
  double mean = 0.0, m2 = 0.0;
  for (int b = 0; b < resamples; ++b) {
    std::fill(re.begin(), re.end(), int64_t{0});
    for (int i = 0; i < n; ++i) {
      int64_t row_total = 0;
      for (int j = 0; j < n; ++j) row_total += counts[size_t(i) * size_t(n) + size_t(j)];
      if (row_total == 0) continue;
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        acc += double(counts[size_t(i) * size_t(n) + size_t(j)]) / double(row_total);
        cdf[size_t(j)] = acc;
      }
      cdf[size_t(n) - 1] = 1.0;
      for (int64_t k = 0; k < row_total; ++k) {
        double u = rng.next_unit();
        int j = 0;
        while (j + 1 < n && u >= cdf[size_t(j)]) ++j;
        ++re[size_t(i) * size_t(n) + size_t(j)];
      }
    }
    double v = plugin_mi(re, n).mi_nats;
    double d = v - mean;
    mean += d / double(b + 1);
    m2 += d * (v - mean);
  }
  double sd = std::sqrt(m2 / double(resamples));
  double half = 2.0 * sd;
  return MiInterval{std::max(0.0, base.mi_nats - half), base.mi_nats + half};
}

FitResult linfit(ConstSpan xs, ConstSpan ys) {
  require(xs.size() == ys.size() && xs.size() >= 2, Err::invalid_argument,
          "linfit: two or more paired points required");
  const double n = double(xs.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  require(sxx > 0.0, Err::invalid_argument, "linfit: xs must not be constant");
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = std::max(0.0, syy - fit.slope * sxy);
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  if (xs.size() > 2) fit.ci_half = 2.0 * std::sqrt(sse / (n - 2.0) / sxx);
  return fit;
}

FitResult fit_exponent(const std::vector<std::pair<double, double>>& points) {
  require(points.size() >= 4, Err::invalid_argument, "fit_exponent: at least 4 points required");
  Vec xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (const auto& [scale, value] : points) {
    require(scale > 0.0 && value > 0.0, Err::invalid_argument,
            "fit_exponent: scales and values must be positive");
    xs.push_back(std::log(scale));
    ys.push_back(std::log(value));
  }
  return linfit(xs, ys);
}

}  // namespace ob
