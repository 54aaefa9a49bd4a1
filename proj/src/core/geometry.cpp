#include "core/geometry.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include "core/rng.hpp"

namespace ob {

Domain::Domain(DomainKind k, int dim, double radius, Vec center)
    : kind_(k), dim_(dim), radius_(radius), center_(std::move(center)) {
  require(dim_ >= 1, Err::invalid_argument, "Domain: dim >= 1");
  require(radius_ > 0.0 && std::isfinite(radius_), Err::invalid_argument, "Domain: radius > 0");
  require(center_.size() == size_t(dim_), Err::invalid_argument, "Domain: center size == dim");
}

Domain Domain::box(int dim, double radius) { return {DomainKind::box, dim, radius, Vec(size_t(std::max(dim, 1)), 0.0)}; }
Domain Domain::box(int dim, double radius, Vec center) { return {DomainKind::box, dim, radius, std::move(center)}; }
Domain Domain::ball(int dim, double radius) { return {DomainKind::ball, dim, radius, Vec(size_t(std::max(dim, 1)), 0.0)}; }
Domain Domain::ball(int dim, double radius, Vec center) { return {DomainKind::ball, dim, radius, std::move(center)}; }

Domain Domain::interval(double lo, double hi) {
  require(lo < hi, Err::invalid_argument, "Domain::interval: lo < hi");
  return {DomainKind::box, 1, (hi - lo) / 2.0, Vec{(lo + hi) / 2.0}};
}

double Domain::diameter() const {
  return kind_ == DomainKind::box ? 2.0 * radius_ * std::sqrt(double(dim_)) : 2.0 * radius_;
}

double Domain::inscribed_scale() const {
  return kind_ == DomainKind::box ? radius_ : radius_ / std::sqrt(double(dim_));
}

bool Domain::contains(ConstSpan x, double tol) const {
  require(x.size() == size_t(dim_), Err::invalid_argument, "Domain::contains: dim mismatch");
  if (kind_ == DomainKind::box) {
    for (int i = 0; i < dim_; ++i)
      if (std::fabs(x[i] - center_[i]) > radius_ + tol) return false;
    return true;
  }
  return dist2(x, center_) <= radius_ + tol;
}

Vec Domain::project(ConstSpan x) const {
  Vec out(x.begin(), x.end());
  project_inplace(out);
  return out;
}

void Domain::project_inplace(Vec& x) const {
  require(x.size() == size_t(dim_), Err::invalid_argument, "Domain::project: dim mismatch");
  if (kind_ == DomainKind::box) {
    for (int i = 0; i < dim_; ++i)
      x[size_t(i)] = std::clamp(x[size_t(i)], center_[size_t(i)] - radius_, center_[size_t(i)] + radius_);
    return;
  }
  double d = dist2(x, center_);
  // A boundary band of a few ulps keeps the rescale idempotent under rounding.
  if (d <= radius_ * (1.0 + 64 * std::numeric_limits<double>::epsilon())) return;
  double f = radius_ / d;
  for (int i = 0; i < dim_; ++i)
    x[size_t(i)] = center_[size_t(i)] + f * (x[size_t(i)] - center_[size_t(i)]);
}

double Domain::lower(int axis) const {
  require(kind_ == DomainKind::box, Err::unsupported, "Domain::lower: box domains only");
  require(axis >= 0 && axis < dim_, Err::invalid_argument, "Domain::lower: axis in range");
  return center_[axis] - radius_;
}

double Domain::upper(int axis) const {
  require(kind_ == DomainKind::box, Err::unsupported, "Domain::upper: box domains only");
  require(axis >= 0 && axis < dim_, Err::invalid_argument, "Domain::upper: axis in range");
  return center_[axis] + radius_;
}

bool Domain::same_as(const Domain& o) const {
  if (kind_ != o.kind_ || dim_ != o.dim_ || radius_ != o.radius_) return false;
  for (int i = 0; i < dim_; ++i)
    if (center_[i] != o.center_[i]) return false;
  return true;
}

namespace {

// Packed sign vector, one bit per coordinate.
struct Bits {
  std::vector<uint64_t> w;
};

int hamming(const Bits& a, const Bits& b) {
  int h = 0;
  for (size_t i = 0; i < a.w.size(); ++i) h += std::popcount(a.w[i] ^ b.w[i]);
  return h;
}

}  // namespace

PackingSet vg_packing(int dim, uint64_t seed) {
  require(dim >= 16, Err::precondition, "vg_packing: dim >= 16");
  const int target = int(std::ceil(std::exp2(double(dim) / 8.0))) + 1;
  const int hmin = (dim + 7) / 8;
  const int words = (dim + 63) / 64;
  const uint64_t tail_mask = (dim % 64 == 0) ? ~0ull : ((1ull << (dim % 64)) - 1ull);

  constexpr int kRestarts = 10;
  constexpr int64_t kDrawsPerRestart = 1000000;

  for (int restart = 0; restart < kRestarts; ++restart) {
    CounterRng rng(CounterRng::derive({seed, uint64_t(restart)}));
    std::vector<Bits> kept;
    kept.reserve(size_t(target));
    for (int64_t draw = 0; draw < kDrawsPerRestart && int(kept.size()) < target; ++draw) {
      Bits cand;
      cand.w.resize(size_t(words));
      for (int i = 0; i < words; ++i) cand.w[size_t(i)] = rng.next_u64();
      cand.w.back() &= tail_mask;
      bool ok = true;
      for (const Bits& b : kept)
        if (hamming(cand, b) < hmin) {
          ok = false;
          break;
        }
      if (ok) kept.push_back(std::move(cand));
    }
    if (int(kept.size()) == target) {
      PackingSet ps;
      ps.points.reserve(kept.size());
      for (const Bits& b : kept) {
        Vec p(size_t(dim), 0.0);
        for (int i = 0; i < dim; ++i)
          p[size_t(i)] = (b.w[size_t(i / 64)] >> (i % 64)) & 1ull ? 1.0 : -1.0;
        ps.points.push_back(std::move(p));
      }
      int hmin_actual = dim;
      for (size_t i = 0; i < kept.size(); ++i)
        for (size_t j = i + 1; j < kept.size(); ++j)
          hmin_actual = std::min(hmin_actual, hamming(kept[i], kept[j]));
      ps.min_sq_dist = 4.0 * double(hmin_actual);
      ps.meta = "vg dim=" + std::to_string(dim) + " count=" + std::to_string(target) +
                " hamming_min=" + std::to_string(hmin_actual);
      return ps;
    }
  }
  fail(Err::construction_failure,
       "vg_packing: no packing of " + std::to_string(target) + " points with Hamming >= " +
           std::to_string(hmin) + " found in 10 restarts x 1e6 draws (dim " + std::to_string(dim) + ")");
}

PackingSet lattice_packing(const Domain& dom, double sep) {
  require(sep > 0.0 && std::isfinite(sep), Err::invalid_argument, "lattice_packing: sep > 0");
  const int n = dom.dim();
  const Vec& c = dom.center();
  const double rho = dom.radius();

  std::vector<int64_t> counts(size_t(n), 0);
  double total = 1.0;
  for (int i = 0; i < n; ++i) {
    int64_t k = int64_t(std::floor(2.0 * rho / sep + 1e-12));
    counts[size_t(i)] = k + 1;
    total *= double(k + 1);
  }
  require(total <= 2e6, Err::invalid_argument, "lattice_packing: grid exceeds 2e6 points");

  PackingSet ps;
  std::vector<int64_t> idx(size_t(n), 0);
  Vec pt(size_t(n), 0.0);
  bool done = false;
  while (!done) {
    for (int i = 0; i < n; ++i) pt[size_t(i)] = c[size_t(i)] - rho + double(idx[size_t(i)]) * sep;
    if (dom.kind() == DomainKind::box || dom.contains(pt)) ps.points.push_back(pt);
    int axis = 0;
    while (axis < n) {
      if (++idx[size_t(axis)] < counts[size_t(axis)]) break;
      idx[size_t(axis)] = 0;
      ++axis;
    }
    done = axis == n;
  }

  if (ps.points.size() < 2) {
    // Antipodal pair through the center along e1 (ball) or the diagonal (box).
    require(sep <= dom.diameter() * (1.0 + 1e-12), Err::construction_failure,
            "lattice_packing: separation exceeds domain diameter");
    Vec a(c), b(c);
    if (dom.kind() == DomainKind::ball) {
      a[0] -= sep / 2.0;
      b[0] += sep / 2.0;
    } else {
      double step = sep / (2.0 * std::sqrt(double(n)));
      for (int i = 0; i < n; ++i) {
        a[size_t(i)] -= step;
        b[size_t(i)] += step;
      }
    }
    ps.points = {std::move(a), std::move(b)};
  }

  ps.min_sq_dist = sep * sep;
  double vol = dom.kind() == DomainKind::box ? ipow(2.0 * rho, n) : unit_ball_volume(n) * ipow(rho, n);
  ps.meta = "lattice sep=" + num_str(sep) + " count=" + std::to_string(ps.points.size()) +
            " vol_ratio=" + num_str(vol / (unit_ball_volume(n) * ipow(sep, n)));
  return ps;
}

double unit_ball_volume(int dim) {
  require(dim >= 1, Err::invalid_argument, "unit_ball_volume: dim >= 1");
  double n2 = double(dim) / 2.0;
  return std::exp(n2 * std::log(3.14159265358979323846) - std::lgamma(n2 + 1.0));
}

double min_pairwise_sq_dist(const std::vector<Vec>& pts) {
  require(pts.size() >= 2, Err::invalid_argument, "min_pairwise_sq_dist: need >= 2 points");
  double m = kInf;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) m = std::min(m, dist_sq(pts[i], pts[j]));
  return m;
}

}  // namespace ob
