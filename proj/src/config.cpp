#include "mdopt/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "mdopt/families.hpp"
#include "mdopt/io.hpp"

namespace mdopt {

std::string command_name(Command c) {
  switch (c) {
    case Command::equiv: return "equiv";
    case Command::cross_equiv: return "cross-equiv";
    case Command::efficiency: return "efficiency";
    case Command::trajectory: return "trajectory";
    case Command::identities: return "identities";
  }
  return "equiv";
}

std::optional<Command> parse_command(std::string_view s) {
  if (s == "equiv") return Command::equiv;
  if (s == "cross-equiv") return Command::cross_equiv;
  if (s == "efficiency") return Command::efficiency;
  if (s == "trajectory") return Command::trajectory;
  if (s == "identities") return Command::identities;
  return std::nullopt;
}

std::string format_error(const ParseError& e) {
  if (e.line <= 0) return e.message;
  return e.message + " (line " + std::to_string(e.line) + ")";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct RawEntry {
  std::string value;
  int line = 0;
};

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "command", "family", "dim", "mu", "optimizer", "schedule", "scale", "T",
      "M", "seed", "tolerance", "tol_gap", "tol_inverse", "tol_hessian", "samples",
      "out", "init", "init_value", "per_replicate", "execution"};
  return keys;
}

class Parser {
 public:
  explicit Parser(std::string_view text) { scan(text); }

  std::vector<ParseError> take_errors() { return std::move(errors_); }
  bool failed() const { return !errors_.empty(); }

  void error(int line, std::string message) { errors_.push_back({line, std::move(message)}); }

  const RawEntry* find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  template <class F>
  void with(const std::string& key, F&& f) {
    if (const RawEntry* e = find(key)) f(*e);
  }

  bool parse_double(const RawEntry& e, const std::string& key, double& out) {
    std::string_view v = e.value;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out)) {
      error(e.line, "malformed number for '" + key + "'");
      return false;
    }
    return true;
  }

  bool parse_int(const RawEntry& e, const std::string& key, std::int64_t& out) {
    std::string_view v = e.value;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) {
      error(e.line, "malformed integer for '" + key + "'");
      return false;
    }
    return true;
  }

  bool parse_u64(const RawEntry& e, const std::string& key, std::uint64_t& out) {
    std::string_view v = e.value;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) {
      error(e.line, "malformed integer for '" + key + "'");
      return false;
    }
    return true;
  }

  bool parse_doubles(const RawEntry& e, const std::string& key, std::vector<double>& out) {
    out.clear();
    std::string_view v = e.value;
    while (true) {
      std::size_t sep = v.find(';');
      std::string_view part = trim(sep == std::string_view::npos ? v : v.substr(0, sep));
      double x = 0.0;
      auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), x);
      if (ec != std::errc{} || p != part.data() + part.size() || !std::isfinite(x)) {
        error(e.line, "malformed number for '" + key + "'");
        return false;
      }
      out.push_back(x);
      if (sep == std::string_view::npos) break;
      v.remove_prefix(sep + 1);
    }
    return true;
  }

  bool parse_bool(const RawEntry& e, const std::string& key, bool& out) {
    if (e.value == "true" || e.value == "1") {
      out = true;
      return true;
    }
    if (e.value == "false" || e.value == "0") {
      out = false;
      return true;
    }
    error(e.line, "malformed boolean for '" + key + "' (expected true|false)");
    return false;
  }

 private:
  void scan(std::string_view text) {
    int line_no = 0;
    while (!text.empty()) {
      ++line_no;
      std::size_t nl = text.find('\n');
      std::string_view line = text.substr(0, nl);
      text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
      line = trim(line);
      if (line.empty() || line.front() == '#') continue;
      std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) {
        error(line_no, "malformed line (expected key=value)");
        continue;
      }
      std::string key(trim(line.substr(0, eq)));
      std::string value(trim(line.substr(eq + 1)));
      const auto& keys = known_keys();
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        error(line_no, "unknown key '" + key + "'");
        continue;
      }
      if (entries_.count(key)) {
        error(line_no, "duplicate key '" + key + "'");
        continue;
      }
      entries_.emplace(std::move(key), RawEntry{std::move(value), line_no});
    }
  }

  std::map<std::string, RawEntry> entries_;
  std::vector<ParseError> errors_;
};

}  // namespace

ParseResult parse_config(std::string_view text) {
  Parser p(text);
  ExperimentConfig cfg;

  bool have_command = false;
  p.with("command", [&](const RawEntry& e) {
    if (auto c = parse_command(e.value)) {
      cfg.command = *c;
      have_command = true;
    } else {
      p.error(e.line, "unknown command '" + e.value + "'");
    }
  });
  if (!have_command && !p.find("command")) p.error(0, "missing required key 'command'");

  p.with("family", [&](const RawEntry& e) {
    const auto& names = family_names();
    if (std::find(names.begin(), names.end(), e.value) == names.end())
      p.error(e.line, "unknown family '" + e.value + "'");
    else
      cfg.family = e.value;
  });
  if (!p.find("family")) p.error(0, "missing required key 'family'");

  cfg.dim = cfg.family == "product" ? 3 : 1;
  p.with("dim", [&](const RawEntry& e) {
    std::int64_t v = 0;
    if (p.parse_int(e, "dim", v)) {
      if (v < 1)
        p.error(e.line, "dim must be >= 1");
      else
        cfg.dim = static_cast<int>(v);
    }
  });

  int mu_line = 0;
  p.with("mu", [&](const RawEntry& e) {
    mu_line = e.line;
    p.parse_doubles(e, "mu", cfg.mu_true);
  });

  p.with("optimizer", [&](const RawEntry& e) {
    if (auto o = parse_optimizer(e.value))
      cfg.optimizer = *o;
    else
      p.error(e.line, "unknown optimizer '" + e.value + "'");
  });

  p.with("schedule", [&](const RawEntry& e) {
    if (auto k = StepSchedule::parse_kind(e.value))
      cfg.schedule.kind = *k;
    else
      p.error(e.line, "unknown schedule '" + e.value + "'");
  });

  p.with("scale", [&](const RawEntry& e) {
    double v = 0.0;
    if (p.parse_double(e, "scale", v)) {
      if (!(v > 0.0))
        p.error(e.line, "scale must be positive");
      else
        cfg.schedule.scale = v;
    }
  });

  p.with("T", [&](const RawEntry& e) {
    std::int64_t v = 0;
    if (p.parse_int(e, "T", v)) {
      if (v < 1)
        p.error(e.line, "T must be >= 1");
      else
        cfg.T = v;
    }
  });

  p.with("M", [&](const RawEntry& e) {
    std::int64_t v = 0;
    if (p.parse_int(e, "M", v)) {
      if (v < 1)
        p.error(e.line, "M must be >= 1");
      else
        cfg.M = static_cast<int>(v);
    }
  });

  p.with("seed", [&](const RawEntry& e) { p.parse_u64(e, "seed", cfg.seed); });

  auto positive_double = [&](const char* key, double& slot) {
    p.with(key, [&](const RawEntry& e) {
      double v = 0.0;
      if (p.parse_double(e, key, v)) {
        if (!(v > 0.0))
          p.error(e.line, std::string(key) + " must be positive");
        else
          slot = v;
      }
    });
  };
  positive_double("tolerance", cfg.tolerance);
  positive_double("tol_gap", cfg.tol_gap);
  positive_double("tol_inverse", cfg.tol_inverse);
  positive_double("tol_hessian", cfg.tol_hessian);

  p.with("samples", [&](const RawEntry& e) {
    std::int64_t v = 0;
    if (p.parse_int(e, "samples", v)) {
      if (v < 1)
        p.error(e.line, "samples must be >= 1");
      else
        cfg.samples = static_cast<int>(v);
    }
  });

  p.with("out", [&](const RawEntry& e) { cfg.out = e.value; });

  p.with("init", [&](const RawEntry& e) {
    if (e.value == "first-observation")
      cfg.init = InitMode::first_observation;
    else if (e.value == "fixed")
      cfg.init = InitMode::fixed;
    else
      p.error(e.line, "unknown init mode '" + e.value + "' (expected first-observation|fixed)");
  });

  int init_value_line = 0;
  p.with("init_value", [&](const RawEntry& e) {
    init_value_line = e.line;
    p.parse_doubles(e, "init_value", cfg.init_value);
  });

  p.with("per_replicate", [&](const RawEntry& e) { p.parse_bool(e, "per_replicate", cfg.per_replicate); });

  p.with("execution", [&](const RawEntry& e) {
    if (e.value == "serial")
      cfg.execution = ExecutionPolicy::serial;
    else if (e.value == "parallel")
      cfg.execution = ExecutionPolicy::parallel;
    else
      p.error(e.line, "unknown execution policy '" + e.value + "' (expected serial|parallel)");
  });

  // Cross-field validation; runs whenever the family itself resolved so that
  // domain problems are reported alongside structural ones.
  if (!cfg.family.empty()) {
    ExponentialFamily fam = make_family(cfg.family, cfg.dim);

    auto fit_to_dim = [&](std::vector<double>& v, const char* key, int line) {
      if (v.size() == 1 && cfg.dim > 1) v.assign(static_cast<std::size_t>(cfg.dim), v[0]);
      if (!v.empty() && static_cast<int>(v.size()) != cfg.dim) {
        p.error(line, std::string(key) + " has " + std::to_string(v.size()) +
                          " components, expected dim = " + std::to_string(cfg.dim));
        return false;
      }
      return true;
    };

    if (fit_to_dim(cfg.mu_true, "mu", mu_line) && !cfg.mu_true.empty()) {
      int bad = fam.pair().dual_domain().first_violation(cfg.mu_true);
      if (bad >= 0) {
        std::string where = cfg.dim == 1 ? "mu" : "mu[" + std::to_string(bad) + "]";
        p.error(mu_line, where + " outside open domain " +
                             interval_string(fam.pair().dual_domain().coord(bad)));
      }
    }
    fit_to_dim(cfg.init_value, "init_value", init_value_line);
    if (cfg.init == InitMode::fixed && !cfg.init_value.empty() &&
        static_cast<int>(cfg.init_value.size()) == cfg.dim &&
        (cfg.command == Command::efficiency ||
         (cfg.command == Command::trajectory && (cfg.optimizer == OptimizerKind::natural ||
                                                 cfg.optimizer == OptimizerKind::retraction)))) {
      int bad = fam.pair().dual_domain().first_violation(cfg.init_value);
      if (bad >= 0)
        p.error(init_value_line, "init_value[" + std::to_string(bad) + "] outside open domain " +
                                     interval_string(fam.pair().dual_domain().coord(bad)));
    }

    if (have_command) {
      const bool needs_mu = cfg.command == Command::equiv ||
                            cfg.command == Command::cross_equiv ||
                            cfg.command == Command::efficiency ||
                            cfg.command == Command::trajectory;
      if (needs_mu && cfg.mu_true.empty()) p.error(0, "missing required key 'mu'");
      if (cfg.command == Command::trajectory && !p.find("optimizer"))
        p.error(0, "missing required key 'optimizer'");
      if (cfg.command == Command::efficiency) {
        if (cfg.T < 2) p.error(0, "efficiency requires T >= 2");
        if (cfg.M < 2) p.error(0, "efficiency requires M >= 2");
      }
    }
  }

  ParseResult result;
  result.errors = p.take_errors();
  if (result.errors.empty()) result.config = std::move(cfg);
  return result;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string s;
  auto kv = [&s](const std::string& k, const std::string& v) { s += k + "=" + v + "\n"; };
  kv("command", command_name(c.command));
  kv("family", c.family);
  kv("dim", std::to_string(c.dim));
  if (!c.mu_true.empty()) kv("mu", join_coords(c.mu_true));
  kv("optimizer", optimizer_name(c.optimizer));
  kv("schedule", c.schedule.name());
  kv("scale", format_double(c.schedule.scale));
  kv("T", std::to_string(c.T));
  kv("M", std::to_string(c.M));
  kv("seed", std::to_string(c.seed));
  kv("tolerance", format_double(c.tolerance));
  kv("tol_gap", format_double(c.tol_gap));
  kv("tol_inverse", format_double(c.tol_inverse));
  kv("tol_hessian", format_double(c.tol_hessian));
  kv("samples", std::to_string(c.samples));
  if (!c.out.empty()) kv("out", c.out);
  kv("init", c.init == InitMode::first_observation ? "first-observation" : "fixed");
  if (!c.init_value.empty()) kv("init_value", join_coords(c.init_value));
  kv("per_replicate", c.per_replicate ? "true" : "false");
  kv("execution", c.execution == ExecutionPolicy::serial ? "serial" : "parallel");
  return s;
}

}  // namespace mdopt
