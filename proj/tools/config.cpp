#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

namespace alflab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

const std::set<std::string> kSubcommands = {"catalog", "curvature", "spaces", "mass",
                                            "lambda",  "instability", "flow"};

const std::set<std::string> kMetricKeys = {"kind", "m", "a", "n", "kappa", "xi", "L",
                                           "hopf", "A", "sigma"};
const std::set<std::string> kReferenceKeys = {"kind", "L"};
const std::set<std::string> kNumericKeys = {"grid", "ntheta", "r_out", "tol", "radii", "tau",
                                            "k", "alpha", "s", "s_values", "T", "dt", "jobs",
                                            "ray", "r", "theta"};
const std::set<std::string> kOutputKeys = {"prefix", "seed"};
const std::set<std::string> kRunKeys = {"subcommand"};

bool parse_double(const std::string& v, double* out) {
  try {
    size_t pos = 0;
    *out = std::stod(v, &pos);
    return pos == v.size();
  } catch (...) {
    return false;
  }
}

bool parse_list(const std::string& v, std::vector<double>* out) {
  out->clear();
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double d;
    if (!parse_double(trim(item), &d)) return false;
    out->push_back(d);
  }
  return !out->empty();
}

}  // namespace

std::optional<ExperimentConfig> parse_config(const std::string& text, ParseError* err) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string section = "run";
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_sub = false;
  auto fail = [&](const std::string& msg) {
    if (err) *err = ParseError{lineno, msg};
    return std::nullopt;
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') return fail("malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section != "run" && section != "metric" && section != "reference" &&
          section != "numeric" && section != "output")
        return fail("unknown section '" + section + "'");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) return fail("expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    const std::string qual = section + "." + key;
    if (seen.count(qual)) return fail("duplicate key '" + key + "'");
    seen.insert(qual);

    auto need_double = [&](double* dst, double lo, double hi) -> bool {
      double d;
      if (!parse_double(val, &d)) return false;
      if (d < lo || d > hi) return false;
      *dst = d;
      return true;
    };

    if (section == "run") {
      if (!kRunKeys.count(key)) return fail("unknown key '" + key + "' in [run]");
      if (!kSubcommands.count(val)) return fail("unknown subcommand '" + val + "'");
      cfg.subcommand = val;
      have_sub = true;
    } else if (section == "metric") {
      if (!kMetricKeys.count(key)) return fail("unknown key '" + key + "' in [metric]");
      if (key == "kind") {
        cfg.metric_kind = val;
      } else {
        double d;
        if (!parse_double(val, &d)) return fail("bad number for '" + key + "'");
        cfg.metric_params[key] = d;
      }
    } else if (section == "reference") {
      if (!kReferenceKeys.count(key)) return fail("unknown key '" + key + "' in [reference]");
      if (key == "kind") {
        if (val != "model" && val != "self" && val != "flat")
          return fail("reference kind must be model|self|flat");
        cfg.reference = val;
      } else if (!need_double(&cfg.reference_L, 0, 1e9)) {
        return fail("bad reference L");
      }
    } else if (section == "numeric") {
      if (!kNumericKeys.count(key)) return fail("unknown key '" + key + "' in [numeric]");
      double d;
      if (key == "radii") {
        if (!parse_list(val, &cfg.radii)) return fail("bad radii list");
        if (!std::is_sorted(cfg.radii.begin(), cfg.radii.end()))
          return fail("radii must increase");
      } else if (key == "s_values") {
        if (!parse_list(val, &cfg.s_values)) return fail("bad s_values list");
      } else if (key == "ray") {
        cfg.ray = (val == "true" || val == "1");
      } else if (key == "grid") {
        if (!parse_double(val, &d) || d < 8 || d > 100000) return fail("grid out of range");
        cfg.grid = int(d);
      } else if (key == "ntheta") {
        if (!parse_double(val, &d) || d < 4 || d > 4096) return fail("ntheta out of range");
        cfg.ntheta = int(d);
      } else if (key == "k") {
        if (!parse_double(val, &d) || d < 0 || d > 2) return fail("k out of range [0,2]");
        cfg.k = int(d);
      } else if (key == "jobs") {
        if (!parse_double(val, &d) || d < 1 || d > 256) return fail("jobs out of range");
        cfg.jobs = int(d);
      } else if (key == "r_out") {
        if (!need_double(&cfg.r_out, 1e-6, 1e9)) return fail("r_out out of range");
      } else if (key == "tol") {
        if (!need_double(&cfg.tol, 1e-15, 1.0)) return fail("tol out of range");
      } else if (key == "tau") {
        if (!need_double(&cfg.tau, -100, 100)) return fail("tau out of range");
      } else if (key == "alpha") {
        if (!need_double(&cfg.alpha, 1e-6, 0.999999)) return fail("alpha must be in (0,1)");
      } else if (key == "s") {
        if (!need_double(&cfg.s, -10, 10)) return fail("s out of range");
      } else if (key == "T") {
        if (!need_double(&cfg.T, 0, 1e6)) return fail("T out of range");
      } else if (key == "dt") {
        if (!need_double(&cfg.dt, 0, 1e6)) return fail("dt out of range");
      } else if (key == "r") {
        if (!need_double(&cfg.point_r, 0, 1e12)) return fail("r out of range");
      } else if (key == "theta") {
        if (!need_double(&cfg.point_theta, 0, M_PI)) return fail("theta out of range");
      }
    } else if (section == "output") {
      if (!kOutputKeys.count(key)) return fail("unknown key '" + key + "' in [output]");
      if (key == "prefix") {
        cfg.output_prefix = val;
      } else {
        double d;
        if (!parse_double(val, &d) || d < 0) return fail("bad seed");
        cfg.seed = std::uint64_t(d);
      }
    }
  }
  if (!have_sub) {
    lineno = 0;
    return fail("missing subcommand");
  }
  if (const char* env = std::getenv("ALF_LAB_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (...) {
    }
  }
  return cfg;
}

}  // namespace alflab::cli
