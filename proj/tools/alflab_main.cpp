#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "runner.hpp"

using alflab::cli::ExperimentConfig;
using alflab::cli::ParseError;

int main(int argc, char** argv) {
  CLI::App app{"alflab: ALF Ricci-flow numerical laboratory"};
  app.require_subcommand(0, 1);

  std::string config_path;
  app.add_option("--config", config_path, "config file (INI-style sections)");

  ExperimentConfig flags;
  std::string radii_csv, svals_csv;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--metric", flags.metric_kind, "metric kind");
    for (const char* p : {"m", "a", "n", "kappa", "xi", "L", "A", "sigma", "hopf"})
      sub->add_option("--" + std::string(p), flags.metric_params[p], "metric parameter");
    sub->add_option("--ref", flags.reference, "reference: model|self|flat");
    sub->add_option("--grid", flags.grid, "radial grid size");
    sub->add_option("--ntheta", flags.ntheta, "polar grid size");
    sub->add_option("--r-out", flags.r_out, "outer truncation radius");
    sub->add_option("--tol", flags.tol, "solver tolerance");
    sub->add_option("--radii", radii_csv, "comma-separated radius ladder");
    sub->add_option("--tau", flags.tau, "weight exponent");
    sub->add_option("--k", flags.k, "derivative count in the norm");
    sub->add_option("--alpha", flags.alpha, "Holder exponent");
    sub->add_option("--s", flags.s, "perturbation amplitude");
    sub->add_option("--s-values", svals_csv, "comma-separated ray amplitudes");
    sub->add_option("--T", flags.T, "flow time horizon");
    sub->add_option("--dt", flags.dt, "flow step (0 = auto CFL)");
    sub->add_option("--jobs", flags.jobs, "worker pool size");
    sub->add_flag("--ray", flags.ray, "also run the lambda(s) ray");
    sub->add_option("--r", flags.point_r, "evaluation radius");
    sub->add_option("--theta", flags.point_theta, "evaluation polar angle");
    sub->add_option("--out", flags.output_prefix, "output path prefix");
    sub->add_option("--seed", flags.seed, "deterministic seed");
  };

  for (const char* name : {"catalog", "curvature", "spaces", "mass", "lambda",
                           "instability", "flow"})
    add_common(app.add_subcommand(name));

  CLI11_PARSE(app, argc, argv);

  ExperimentConfig cfg;
  CLI::App* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands()[0];

  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config file '" << config_path << "'\n";
      return 1;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    ParseError err;
    auto parsed = alflab::cli::parse_config(ss.str(), &err);
    if (!parsed) {
      std::cerr << "config error (line " << err.line << "): " << err.message << "\n";
      return 1;
    }
    cfg = *parsed;
  } else if (!sub) {
    std::cerr << "usage error: missing subcommand (or --config)\n";
    return 1;
  }

  if (sub) {
    cfg.subcommand = sub->get_name();
    auto set = [&](const char* flag) { return sub->count(flag) > 0; };
    if (set("--metric")) cfg.metric_kind = flags.metric_kind;
    for (const char* p : {"m", "a", "n", "kappa", "xi", "L", "A", "sigma", "hopf"})
      if (set(("--" + std::string(p)).c_str())) cfg.metric_params[p] = flags.metric_params[p];
    if (set("--ref")) cfg.reference = flags.reference;
    if (set("--grid")) cfg.grid = flags.grid;
    if (set("--ntheta")) cfg.ntheta = flags.ntheta;
    if (set("--r-out")) cfg.r_out = flags.r_out;
    if (set("--tol")) cfg.tol = flags.tol;
    if (set("--tau")) cfg.tau = flags.tau;
    if (set("--k")) cfg.k = flags.k;
    if (set("--alpha")) cfg.alpha = flags.alpha;
    if (set("--s")) cfg.s = flags.s;
    if (set("--T")) cfg.T = flags.T;
    if (set("--dt")) cfg.dt = flags.dt;
    if (set("--jobs")) cfg.jobs = flags.jobs;
    if (set("--ray")) cfg.ray = flags.ray;
    if (set("--r")) cfg.point_r = flags.point_r;
    if (set("--theta")) cfg.point_theta = flags.point_theta;
    if (set("--out")) cfg.output_prefix = flags.output_prefix;
    if (set("--seed")) cfg.seed = flags.seed;
  }

  if (!radii_csv.empty()) {
    cfg.radii.clear();
    std::stringstream ss(radii_csv);
    std::string item;
    while (std::getline(ss, item, ',')) cfg.radii.push_back(std::stod(item));
  }
  if (!svals_csv.empty()) {
    cfg.s_values.clear();
    std::stringstream ss(svals_csv);
    std::string item;
    while (std::getline(ss, item, ',')) cfg.s_values.push_back(std::stod(item));
  }
  if (const char* env = std::getenv("ALF_LAB_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (...) {
    }
  }

  return alflab::cli::run(cfg, std::cout);
}
