#include "core/config.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <sstream>

namespace ob {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(trim(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

bool to_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

bool to_i64(const std::string& s, int64_t& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtoll(s.c_str(), &end, 10);
  return end == s.c_str() + s.size();
}

bool to_u64(const std::string& s, uint64_t& out) {
  if (s.empty() || s[0] == '-') return false;
  char* end = nullptr;
  out = std::strtoull(s.c_str(), &end, 10);
  return end == s.c_str() + s.size();
}

std::optional<OracleKind> oracle_kind_from_name(const std::string& s) {
  for (OracleKind k :
       {OracleKind::noiseless_first_order, OracleKind::first_order_gaussian,
        OracleKind::grad_gaussian, OracleKind::moment_bounded, OracleKind::bernoulli_label,
        OracleKind::stat_estimation})
    if (s == oracle_kind_name(k)) return k;
  return std::nullopt;
}

const char* step_rule_name(StepRule r) {
  return r == StepRule::inv_t ? "inv_t" : "inv_sqrt_t";
}

std::optional<StepRule> step_rule_from_name(const std::string& s) {
  for (StepRule r : {StepRule::inv_t, StepRule::inv_sqrt_t})
    if (s == step_rule_name(r)) return r;
  return std::nullopt;
}

struct Parser {
  ExperimentConfig cfg;
  std::vector<std::string> errs;

  std::string where(const std::string& sec, const std::string& key) {
    return "[" + sec + "] " + key + ": ";
  }

  void set_d(const std::string& sec, const std::string& key, const std::string& v, double& out) {
    if (!to_double(v, out)) errs.push_back(where(sec, key) + "'" + v + "' is not a number");
  }

  void set_i(const std::string& sec, const std::string& key, const std::string& v, int& out) {
    int64_t x;
    if (!to_i64(v, x) || x < INT32_MIN || x > INT32_MAX)
      errs.push_back(where(sec, key) + "'" + v + "' is not an integer");
    else
      out = int(x);
  }

  void set_i64(const std::string& sec, const std::string& key, const std::string& v, int64_t& out) {
    if (!to_i64(v, out)) errs.push_back(where(sec, key) + "'" + v + "' is not an integer");
  }

  void set_u64(const std::string& sec, const std::string& key, const std::string& v,
               uint64_t& out) {
    if (!to_u64(v, out))
      errs.push_back(where(sec, key) + "'" + v + "' is not an unsigned integer");
  }

  void set_dlist(const std::string& sec, const std::string& key, const std::string& v, Vec& out) {
    Vec parsed;
    for (const std::string& item : split_list(v)) {
      double x;
      if (!to_double(item, x)) {
        errs.push_back(where(sec, key) + "'" + item + "' is not a number");
        return;
      }
      parsed.push_back(x);
    }
    out = std::move(parsed);
  }

  void set_i64list(const std::string& sec, const std::string& key, const std::string& v,
                   std::vector<int64_t>& out) {
    std::vector<int64_t> parsed;
    for (const std::string& item : split_list(v)) {
      int64_t x;
      if (!to_i64(item, x)) {
        errs.push_back(where(sec, key) + "'" + item + "' is not an integer");
        return;
      }
      parsed.push_back(x);
    }
    out = std::move(parsed);
  }

  void ensemble_key(const std::string& key, const std::string& v) {
    EnsembleSpec& e = cfg.ensemble;
    if (key == "kind") {
      if (auto k = ensemble_kind_from_name(v))
        e.kind = *k;
      else
        errs.push_back(where("ensemble", key) + "unknown ensemble kind '" + v + "'");
    } else if (key == "eps")
      set_d("ensemble", key, v, e.eps);
    else if (key == "dim")
      set_i("ensemble", key, v, e.dim);
    else if (key == "rho")
      set_d("ensemble", key, v, e.rho);
    else if (key == "r")
      set_d("ensemble", key, v, e.r);
    else if (key == "power")
      set_i("ensemble", key, v, e.power);
    else if (key == "sep")
      set_d("ensemble", key, v, e.sep);
    else if (key == "theta0")
      set_d("ensemble", key, v, e.theta0);
    else if (key == "theta1")
      set_d("ensemble", key, v, e.theta1);
    else if (key == "scale")
      set_d("ensemble", key, v, e.scale);
    else if (key == "packing_seed")
      set_u64("ensemble", key, v, e.packing_seed);
    else
      errs.push_back("unknown key '" + key + "' in section [ensemble]");
  }

  void oracle_key(const std::string& key, const std::string& v) {
    OracleSpec& o = cfg.oracle;
    if (key == "kind") {
      if (auto k = oracle_kind_from_name(v))
        o.kind = *k;
      else
        errs.push_back(where("oracle", key) + "unknown oracle kind '" + v + "'");
    } else if (key == "sigma")
      set_d("oracle", key, v, o.sigma);
    else if (key == "alpha")
      set_d("oracle", key, v, o.alpha);
    else if (key == "c")
      set_d("oracle", key, v, o.c);
    else if (key == "eps")
      set_d("oracle", key, v, o.eps);
    else if (key == "kappa")
      set_d("oracle", key, v, o.kappa);
    else if (key == "c_lo")
      set_d("oracle", key, v, o.c_lo);
    else if (key == "c_hi")
      set_d("oracle", key, v, o.c_hi);
    else
      errs.push_back("unknown key '" + key + "' in section [oracle]");
  }

  void algorithm_key(const std::string& key, const std::string& v) {
    AlgorithmSpec& a = cfg.algorithm;
    if (key == "kind") {
      if (auto k = algorithm_kind_from_name(v))
        a.kind = *k;
      else
        errs.push_back(where("algorithm", key) + "unknown algorithm kind '" + v + "'");
    } else if (key == "step_rule") {
      if (auto r = step_rule_from_name(v))
        a.step_rule = *r;
      else
        errs.push_back(where("algorithm", key) + "unknown step rule '" + v + "'");
    } else if (key == "step_scale")
      set_d("algorithm", key, v, a.step_scale);
    else if (key == "x1")
      set_dlist("algorithm", key, v, a.x1);
    else if (key == "vote_factor")
      set_d("algorithm", key, v, a.vote_factor);
    else if (key == "eps_target")
      set_d("algorithm", key, v, a.eps_target);
    else if (key == "exponent")
      set_d("algorithm", key, v, a.exponent);
    else
      errs.push_back("unknown key '" + key + "' in section [algorithm]");
  }

  void sweep_key(const std::string& key, const std::string& v) {
    SweepConfig& s = cfg.sweep;
    if (key == "mode") {
      if (auto m = sweep_mode_from_name(v))
        s.mode = *m;
      else
        errs.push_back(where("sweep", key) + "unknown sweep mode '" + v + "'");
    } else if (key == "horizons")
      set_i64list("sweep", key, v, s.horizons);
    else if (key == "trials")
      set_i("sweep", key, v, s.trials);
    else if (key == "base_seed")
      set_u64("sweep", key, v, s.base_seed);
    else if (key == "eps")
      set_d("sweep", key, v, s.eps);
    else if (key == "delta")
      set_d("sweep", key, v, s.delta);
    else if (key == "r")
      set_d("sweep", key, v, s.r);
    else if (key == "eps_grid")
      set_dlist("sweep", key, v, s.eps_grid);
    else if (key == "criterion") {
      if (v == "mean")
        s.criterion_mean = true;
      else if (v == "probability")
        s.criterion_mean = false;
      else
        errs.push_back(where("sweep", key) + "expected 'mean' or 'probability', got '" + v + "'");
    } else if (key == "fit_lo")
      set_i64("sweep", key, v, s.fit_lo);
    else if (key == "fit_hi")
      set_i64("sweep", key, v, s.fit_hi);
    else if (key == "samples")
      set_i("sweep", key, v, s.samples);
    else if (key == "probes")
      set_i("sweep", key, v, s.probes);
    else
      errs.push_back("unknown key '" + key + "' in section [sweep]");
  }

  // [bound] holds `which` plus free-form numeric parameters; each named bound
  // checks its own required keys at evaluation time.
  void bound_key(const std::string& key, const std::string& v) {
    BoundEvalConfig& b = cfg.bound;
    if (key == "which") {
      std::vector<ThmBound> parsed;
      for (const std::string& item : split_list(v)) {
        if (auto w = thm_bound_from_name(item))
          parsed.push_back(*w);
        else {
          errs.push_back(where("bound", key) + "unknown bound '" + item + "'");
          return;
        }
      }
      b.which = std::move(parsed);
    } else {
      double x;
      if (!to_double(v, x))
        errs.push_back(where("bound", key) + "'" + v + "' is not a number");
      else
        b.params[key] = x;
    }
  }
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  Parser p;
  std::string section;
  std::vector<std::string> seen;  // "section\x1fkey" duplicate tracking
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    size_t hash = raw.find_first_of("#;");
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        p.errs.push_back("line " + std::to_string(lineno) + ": malformed section header '" +
                         line + "'");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "ensemble" && section != "oracle" && section != "algorithm" &&
          section != "sweep" && section != "bound") {
        p.errs.push_back("unknown section [" + section + "]");
        section.clear();
      }
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      p.errs.push_back("line " + std::to_string(lineno) + ": expected key = value, got '" + line +
                       "'");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      p.errs.push_back("line " + std::to_string(lineno) + ": empty key");
      continue;
    }
    if (section.empty()) {
      p.errs.push_back("key '" + key + "' outside any section");
      continue;
    }
    std::string tag = section + '\x1f' + key;
    if (std::find(seen.begin(), seen.end(), tag) != seen.end()) {
      p.errs.push_back("duplicate key '" + key + "' in section [" + section + "]");
      continue;
    }
    seen.push_back(tag);
    if (section == "ensemble")
      p.ensemble_key(key, value);
    else if (section == "oracle")
      p.oracle_key(key, value);
    else if (section == "algorithm")
      p.algorithm_key(key, value);
    else if (section == "sweep")
      p.sweep_key(key, value);
    else
      p.bound_key(key, value);
  }

  if (p.errs.empty())
    for (std::string& v : validate(p.cfg)) p.errs.push_back(std::move(v));
  if (!p.errs.empty()) {
    std::string msg = "config: ";
    for (size_t i = 0; i < p.errs.size(); ++i) {
      if (i) msg += "; ";
      msg += p.errs[i];
    }
    fail(Err::parse, msg);
  }
  return p.cfg;
}

namespace {

void emit_kv(std::string& out, const char* key, const std::string& v) {
  out += key;
  out += " = ";
  out += v;
  out += '\n';
}

void emit_kv(std::string& out, const char* key, double v) { emit_kv(out, key, num_str(v)); }

template <class T>
std::string join_list(const std::vector<T>& xs) {
  std::string s;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_same_v<T, double>)
      s += num_str(xs[i]);
    else
      s += std::to_string(xs[i]);
  }
  return s;
}

}  // namespace

std::string echo_config(const ExperimentConfig& cfg) {
  std::string out;
  const EnsembleSpec& e = cfg.ensemble;
  out += "[ensemble]\n";
  emit_kv(out, "kind", ensemble_kind_name(e.kind));
  emit_kv(out, "eps", e.eps);
  emit_kv(out, "dim", std::to_string(e.dim));
  emit_kv(out, "rho", e.rho);
  emit_kv(out, "r", e.r);
  emit_kv(out, "power", std::to_string(e.power));
  emit_kv(out, "sep", e.sep);
  emit_kv(out, "theta0", e.theta0);
  emit_kv(out, "theta1", e.theta1);
  emit_kv(out, "scale", e.scale);
  emit_kv(out, "packing_seed", std::to_string(e.packing_seed));

  const OracleSpec& o = cfg.oracle;
  out += "\n[oracle]\n";
  emit_kv(out, "kind", oracle_kind_name(o.kind));
  emit_kv(out, "sigma", o.sigma);
  emit_kv(out, "alpha", o.alpha);
  emit_kv(out, "c", o.c);
  emit_kv(out, "eps", o.eps);
  emit_kv(out, "kappa", o.kappa);
  emit_kv(out, "c_lo", o.c_lo);
  emit_kv(out, "c_hi", o.c_hi);

  const AlgorithmSpec& a = cfg.algorithm;
  out += "\n[algorithm]\n";
  emit_kv(out, "kind", algorithm_kind_name(a.kind));
  emit_kv(out, "step_rule", step_rule_name(a.step_rule));
  emit_kv(out, "step_scale", a.step_scale);
  if (!a.x1.empty()) emit_kv(out, "x1", join_list(a.x1));
  emit_kv(out, "vote_factor", a.vote_factor);
  emit_kv(out, "eps_target", a.eps_target);
  emit_kv(out, "exponent", a.exponent);

  const SweepConfig& s = cfg.sweep;
  out += "\n[sweep]\n";
  emit_kv(out, "mode", sweep_mode_name(s.mode));
  if (!s.horizons.empty()) emit_kv(out, "horizons", join_list(s.horizons));
  emit_kv(out, "trials", std::to_string(s.trials));
  emit_kv(out, "base_seed", std::to_string(s.base_seed));
  emit_kv(out, "eps", s.eps);
  emit_kv(out, "delta", s.delta);
  emit_kv(out, "r", s.r);
  if (!s.eps_grid.empty()) emit_kv(out, "eps_grid", join_list(s.eps_grid));
  emit_kv(out, "criterion", s.criterion_mean ? "mean" : "probability");
  emit_kv(out, "fit_lo", std::to_string(s.fit_lo));
  emit_kv(out, "fit_hi", std::to_string(s.fit_hi));
  emit_kv(out, "samples", std::to_string(s.samples));
  emit_kv(out, "probes", std::to_string(s.probes));

  const BoundEvalConfig& b = cfg.bound;
  if (!b.which.empty() || !b.params.empty()) {
    out += "\n[bound]\n";
    if (!b.which.empty()) {
      std::string names;
      for (size_t i = 0; i < b.which.size(); ++i) {
        if (i) names += ", ";
        names += thm_bound_name(b.which[i]);
      }
      emit_kv(out, "which", names);
    }
    for (const auto& [k, v] : b.params) emit_kv(out, k.c_str(), v);
  }
  return out;
}

}  // namespace ob
