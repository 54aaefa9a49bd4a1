#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ob {

// Error taxonomy shared by the C++ core and the C API.
enum class Err {
  invalid_argument,
  domain_violation,
  incompatible,
  unsupported,
  precondition,
  construction_failure,
  parse,
  io,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Err code() const noexcept { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, Err code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

using Vec = std::vector<double>;
using ConstSpan = std::span<const double>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

inline double dot(ConstSpan a, ConstSpan b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(ConstSpan a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

inline double norm2(ConstSpan a) { return std::sqrt(norm_sq(a)); }

inline double norm1(ConstSpan a) {
  double s = 0.0;
  for (double v : a) s += std::fabs(v);
  return s;
}

inline double dist_sq(ConstSpan a, ConstSpan b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double dist2(ConstSpan a, ConstSpan b) { return std::sqrt(dist_sq(a, b)); }

// Integer power by repeated multiplication; exact for small exponents.
inline double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// Binary entropy in nats; endpoints by continuity (0 ln 0 = 0).
inline double binary_entropy_nats(double p) {
  if (p < 0.0 || p > 1.0) fail(Err::invalid_argument, "binary_entropy_nats: p in [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

// KL divergence between Bernoulli(p) and Bernoulli(q) in nats; may be +inf.
inline double kl_bernoulli(double p, double q) {
  if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0)
    fail(Err::invalid_argument, "kl_bernoulli: probabilities in [0, 1]");
  double s = 0.0;
  if (p > 0.0) {
    if (q == 0.0) return kInf;
    s += p * std::log(p / q);
  }
  if (p < 1.0) {
    if (q == 1.0) return kInf;
    s += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  }
  return s;
}

// 17 significant digits: enough for exact double round-trip.
inline std::string num_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace ob
