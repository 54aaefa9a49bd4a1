#include "core/presets.hpp"

#include "core/config.hpp"

namespace ob {

namespace {

struct Preset {
  const char* name;
  const char* ini;
};

// One-command reproductions: each pins every parameter of one scaling check.

// Two-hypothesis quadratic pair: information sandwich fano <= MI <= 0.1*T
// nats per horizon, plus the closed-form per-query divergence report.
constexpr const char* kSec41 = R"ini(
[ensemble]
kind = sec41_pair
eps = 0.02

[oracle]
kind = first_order_gaussian
sigma = 1

[algorithm]
kind = sgd
step_rule = inv_t

[sweep]
mode = hypothesis_test
horizons = 1, 10, 100, 1000
trials = 500
base_seed = 1
eps = 0.02
delta = 0.25
r = 1
)ini";

// Lipschitz rate: query-complexity scan on the distance pair with a
// gradient-only oracle; T-hat(eps) should scale like 1/eps^2.
constexpr const char* kThm2 = R"ini(
[ensemble]
kind = norm_pair
rho = 0.5
theta0 = 0.3
theta1 = 0.7
scale = 1

[oracle]
kind = grad_gaussian
sigma = 1

[algorithm]
kind = sgd
step_rule = inv_sqrt_t
step_scale = 0.5

[sweep]
mode = complexity
horizons = 1, 2, 3, 4, 6, 8, 11, 16, 23, 32, 45, 64, 91, 128, 181, 256, 362, 512, 724, 1024, 1448, 2048, 2896, 4096, 5793, 8192, 11585, 16384, 23170, 32768
trials = 500
base_seed = 1
eps = 0.02
delta = 0.25
r = 1
eps_grid = 0.04, 0.02, 0.01, 0.005
criterion = mean
)ini";

// Strongly convex rate: same scan on the quadratic pair with a first-order
// oracle and 1/t steps; T-hat(eps) should scale like 1/eps.
constexpr const char* kThm3 = R"ini(
[ensemble]
kind = quad_pair
rho = 2
theta0 = 1.5
theta1 = 2.5

[oracle]
kind = first_order_gaussian
sigma = 1

[algorithm]
kind = sgd
step_rule = inv_t

[sweep]
mode = complexity
horizons = 1, 2, 3, 4, 6, 8, 11, 16, 23, 32, 45, 64, 91, 128, 181, 256, 362, 512, 724, 1024
trials = 500
base_seed = 1
eps = 0.02
delta = 0.25
r = 1
eps_grid = 0.04, 0.02, 0.01, 0.005
criterion = mean
)ini";

// Moment-bounded value/gradient channel: unbiasedness and the alpha-th
// central moment budget at random probe points, both hypotheses.
constexpr const char* kThm4 = R"ini(
[ensemble]
kind = thm4_pair
eps = 0.05
dim = 2

[oracle]
kind = moment_bounded
alpha = 2
c = 4
eps = 0.05

[algorithm]
kind = sgd

[sweep]
mode = moment_check
base_seed = 1
samples = 200000
probes = 10
)ini";

// Diminishing returns: per-step divergence trace vs error trace on a
// quadratic lattice over [0, 1]; the divergence is capped by
// (diameter^2 + 1) / sigma^2 times the mean error at every step.
constexpr const char* kThm5 = R"ini(
[ensemble]
kind = lattice_quadratic
dim = 1
rho = 0.5
sep = 0.25

[oracle]
kind = first_order_gaussian
sigma = 1

[algorithm]
kind = sgd
step_rule = inv_t

[sweep]
mode = traces
horizons = 1000
trials = 500
base_seed = 1
eps = 0.02
delta = 0.25
r = 1
fit_lo = 10
fit_hi = 1000
)ini";

// Even-power anytime gap: under the second-moment metric the divergence
// trace decays at (m-1)/m times the error-trace exponent (m = 4).
constexpr const char* kThm6 = R"ini(
[ensemble]
kind = even_power_pair
power = 4
eps = 0.01

[oracle]
kind = first_order_gaussian
sigma = 1

[algorithm]
kind = sgd
step_rule = inv_sqrt_t
step_scale = 0.5

[sweep]
mode = traces
horizons = 3000
trials = 500
base_seed = 1
eps = 0.02
delta = 0.25
r = 2
fit_lo = 30
fit_hi = 3000
)ini";

// Even-power recurrence companion: same run, longer horizon; the mean err^2
// trace must satisfy the divergence-budget recurrence at every prefix.
constexpr const char* kThm7 = R"ini(
[ensemble]
kind = even_power_pair
power = 4
eps = 0.01

[oracle]
kind = first_order_gaussian
sigma = 1

[algorithm]
kind = sgd
step_rule = inv_sqrt_t
step_scale = 0.5

[sweep]
mode = traces
horizons = 10000
trials = 200
base_seed = 1
eps = 0.02
delta = 0.25
r = 2
fit_lo = 100
fit_hi = 10000
)ini";

// Active threshold learning: kappa = 2 median excess risk decays like 1/t
// over t in [100, 10000].
constexpr const char* kThm8 = R"ini(
[ensemble]
kind = threshold_grid
sep = 0.25

[oracle]
kind = bernoulli_label
kappa = 2
c_lo = 0.1
c_hi = 0.49

[algorithm]
kind = active_bisection
vote_factor = 260
eps_target = 1e-4
exponent = 2

[sweep]
mode = active
horizons = 100, 141, 200, 283, 400, 566, 800, 1131, 1600, 2263, 3200, 4525, 6400, 9051, 10000
trials = 4000
base_seed = 1
eps = 0.02
delta = 0.25
r = 1
)ini";

constexpr Preset kPresets[] = {
    {"sec41", kSec41}, {"thm2", kThm2}, {"thm3", kThm3}, {"thm4", kThm4},
    {"thm5", kThm5},   {"thm6", kThm6}, {"thm7", kThm7}, {"thm8", kThm8},
};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const Preset& p : kPresets) out.push_back(p.name);
  return out;
}

const char* preset_ini(const std::string& name) {
  for (const Preset& p : kPresets)
    if (name == p.name) return p.ini;
  return nullptr;
}

ExperimentConfig preset_config(const std::string& name) {
  const char* ini = preset_ini(name);
  if (ini == nullptr) {
    std::string known;
    for (const Preset& p : kPresets) {
      if (!known.empty()) known += ", ";
      known += p.name;
    }
    fail(Err::invalid_argument, "unknown preset '" + name + "' (known: " + known + ")");
  }
  ExperimentConfig cfg = parse_config(ini);
  cfg.stem = name;
  return cfg;
}

}  // namespace ob
