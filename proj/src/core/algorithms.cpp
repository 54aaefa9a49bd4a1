#include "core/algorithms.hpp"

#include <algorithm>
#include <cmath>

namespace ob {

const char* algo_name(const Algo& a) {
  switch (a.index()) {
    case 0: return "sgd";
    case 1: return "bisection";
    case 2: return "grid_search";
    case 3: return "active_bisection";
  }
  return "?";
}

Engine::Engine(const Algo& alg, const Domain& dom, int64_t horizon)
    : dom_(dom), horizon_(horizon) {
  require(horizon >= 1, Err::invalid_argument, "Engine: horizon >= 1");
  if (const SgdSpec* s = std::get_if<SgdSpec>(&alg)) {
    kind_ = Kind::sgd;
    rule_ = s->rule;
    require(std::isfinite(s->scale), Err::invalid_argument, "sgd: step scale finite");
    scale_ = s->scale > 0.0
                 ? s->scale
                 : (rule_ == StepRule::inv_t ? 1.0 : dom.diameter() / std::sqrt(double(horizon)));
    if (s->x1.empty()) {
      x_ = dom.center();
    } else {
      require(int(s->x1.size()) == dom.dim(), Err::invalid_argument, "sgd: x1 dim mismatch");
      require(dom.contains(s->x1), Err::domain_violation, "sgd: x1 outside the domain");
      x_ = s->x1;
    }
    return;
  }
  if (std::get_if<BisectionSpec>(&alg)) {
    kind_ = Kind::bisection;
    require(dom.dim() == 1, Err::unsupported, "bisection: dim-1 domains only");
    lo_ = dom.center()[0] - dom.radius();
    hi_ = dom.center()[0] + dom.radius();
    x_ = {0.5 * (lo_ + hi_)};
    return;
  }
  if (std::get_if<GridSearchSpec>(&alg)) {
    kind_ = Kind::grid_search;
    require(dom.dim() == 1, Err::unsupported, "grid_search: dim-1 domains only");
    int64_t g = std::max<int64_t>(2, int64_t(std::sqrt(double(horizon))));
    double lo = dom.center()[0] - dom.radius(), hi = dom.center()[0] + dom.radius();
    grid_pts_.resize(size_t(g));
    for (int64_t k = 0; k < g; ++k)
      grid_pts_[size_t(k)] = lo + (hi - lo) * double(k) / double(g - 1);
    grid_sums_.assign(size_t(g), 0.0);
    grid_counts_.assign(size_t(g), 0);
    x_ = {grid_pts_[0]};
    return;
  }
  if (const ActiveBisectionSpec* s = std::get_if<ActiveBisectionSpec>(&alg)) {
    kind_ = Kind::active_bisection;
    require(dom.dim() == 1, Err::unsupported, "active_bisection: dim-1 domains only");
    require(s->vote_factor > 0.0 && std::isfinite(s->vote_factor), Err::invalid_argument,
            "active_bisection: vote_factor > 0");
    require(s->eps_target > 0.0 && s->eps_target < 1.0, Err::invalid_argument,
            "active_bisection: eps_target in (0, 1)");
    require(s->exponent >= 1.0 && std::isfinite(s->exponent), Err::invalid_argument,
            "active_bisection: exponent >= 1");
    vote_factor_ = s->vote_factor;
    eps_target_ = s->eps_target;
    exponent_ = s->exponent;
    lo_ = dom.center()[0] - dom.radius();
    hi_ = dom.center()[0] + dom.radius();
    cur_epoch_len_ = epoch_len(0);
    x_ = {0.5 * (lo_ + hi_)};
    return;
  }
  fail(Err::internal, "Engine: bad algorithm variant");
}

int64_t Engine::epoch_len(int64_t e) const {
  double len;
  if (exponent_ <= 1.0) {
    len = std::ceil(vote_factor_ * std::log(1.0 / eps_target_));
  } else {
    len = std::ceil(vote_factor_ * std::exp2(2.0 * (exponent_ - 1.0) * double(e)));
  }
  if (!(len >= 1.0)) len = 1.0;
  require(len <= 9.0e18, Err::invalid_argument, "active_bisection: epoch length overflow");
  return int64_t(len);
}

ConstSpan Engine::grad_of(const Response& r) const {
  if (const FirstOrder* fo = std::get_if<FirstOrder>(&r)) return fo->grad;
  if (const GradOnly* go = std::get_if<GradOnly>(&r)) return go->grad;
  fail(Err::incompatible, "gradient step: first-order responses required");
}

void Engine::absorb(const Response& r) {
  require(t_ < horizon_, Err::precondition, "Engine::absorb: horizon exhausted");
  ++t_;
  switch (kind_) {
    case Kind::sgd: {
      ConstSpan g = grad_of(r);
      require(g.size() == x_.size(), Err::incompatible, "sgd: gradient dim mismatch");
      double a = rule_ == StepRule::inv_t ? scale_ / double(t_) : scale_ / std::sqrt(double(t_));
      for (size_t i = 0; i < x_.size(); ++i) x_[i] -= a * g[i];
      dom_.project_inplace(x_);
      return;
    }
    case Kind::bisection: {
      ConstSpan g = grad_of(r);
      require(g.size() == 1, Err::incompatible, "bisection: gradient dim mismatch");
      double mid = x_[0];
      if (g[0] > 0.0)
        hi_ = mid;
      else if (g[0] < 0.0)
        lo_ = mid;
      else
        lo_ = hi_ = mid;
      x_[0] = 0.5 * (lo_ + hi_);
      return;
    }
    case Kind::grid_search: {
      const FirstOrder* fo = std::get_if<FirstOrder>(&r);
      require(fo != nullptr, Err::incompatible, "grid_search: value responses required");
      const int64_t g = int64_t(grid_pts_.size());
      size_t cur = size_t((t_ - 1) % g);
      grid_sums_[cur] += fo->value;
      grid_counts_[cur] += 1;
      if (t_ >= horizon_) {
        size_t best = 0;
        double best_mean = kInf;
        for (size_t k = 0; k < grid_pts_.size(); ++k) {
          if (grid_counts_[k] == 0) continue;
          double m = grid_sums_[k] / double(grid_counts_[k]);
          if (m < best_mean) {
            best_mean = m;
            best = k;
          }
        }
        x_[0] = grid_pts_[best];
      } else {
        x_[0] = grid_pts_[size_t(t_ % g)];
      }
      return;
    }
    case Kind::active_bisection: {
      const Label* lb = std::get_if<Label>(&r);
      require(lb != nullptr, Err::incompatible, "active_bisection: label responses required");
      require(lb->y == 1 || lb->y == -1, Err::invalid_argument, "active_bisection: labels are +-1");
      vote_sum_ += lb->y;
      ++votes_;
      if (votes_ >= cur_epoch_len_) {
        double mid = 0.5 * (lo_ + hi_);
        if (vote_sum_ >= 0)  // majority says the threshold lies left of mid; ties shrink right
          hi_ = mid;
        else
          lo_ = mid;
        ++epoch_;
        votes_ = 0;
        vote_sum_ = 0;
        cur_epoch_len_ = epoch_len(epoch_);
      }
      x_[0] = 0.5 * (lo_ + hi_);
      return;
    }
  }
  fail(Err::internal, "Engine::absorb: bad kind");
}

Transcript run(const Algo& alg, const Oracle& o, const Instance& f, int64_t horizon, uint64_t seed) {
  Engine eng(alg, f.domain(), horizon);
  CounterRng rng(seed);
  Transcript tr;
  tr.queries.reserve(size_t(horizon));
  tr.responses.reserve(size_t(horizon));
  tr.err_trace.reserve(size_t(horizon) + 1);
  const double fmin = f.min_value();
  for (int64_t t = 1; t <= horizon; ++t) {
    ConstSpan x = eng.query();
    tr.queries.emplace_back(x.begin(), x.end());
    tr.err_trace.push_back(f.value(x) - fmin);
    tr.responses.push_back(o.sample(f, x, rng));
    eng.absorb(tr.responses.back());
  }
  ConstSpan xf = eng.query();
  tr.final_point.assign(xf.begin(), xf.end());
  tr.err_trace.push_back(f.value(xf) - fmin);
  return tr;
}

std::vector<Vec> replay_queries(const Algo& alg, const Domain& dom, int64_t horizon,
                                const std::vector<Response>& responses) {
  require(int64_t(responses.size()) <= horizon, Err::invalid_argument,
          "replay_queries: more responses than the horizon");
  Engine eng(alg, dom, horizon);
  std::vector<Vec> qs;
  qs.reserve(responses.size() + 1);
  for (const Response& r : responses) {
    ConstSpan x = eng.query();
    qs.emplace_back(x.begin(), x.end());
    eng.absorb(r);
  }
  ConstSpan x = eng.query();
  qs.emplace_back(x.begin(), x.end());
  return qs;
}

int canonical_estimate(const Ensemble& ens, ConstSpan x) {
  require(ens.size() >= 1, Err::invalid_argument, "canonical_estimate: empty ensemble");
  int best = 0;
  double best_excess = kInf;
  for (int i = 0; i < ens.size(); ++i) {
    double excess = ens.at(i).value(x) - ens.at(i).min_value();
    if (excess < best_excess) {
      best_excess = excess;
      best = i;
    }
  }
  return best;
}

}  // namespace ob
