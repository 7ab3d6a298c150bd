// visaddle: projected first-order solvers (FB / EG / EFTP) for regularized
// saddle-point variational inequalities, with the bilinear experiment presets.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "visaddle/config.hpp"
#include "visaddle/experiment.hpp"
#include "visaddle/parallel.hpp"

using namespace visaddle;

namespace {

void print_manifest(const RunManifest& m) {
  std::printf("output dir: %s\n", m.out_dir.c_str());
  for (const auto& c : m.cells) {
    std::printf("cell %d: %s gamma=%g eta=%g status=%s\n", c.cell.index,
                method_name(c.cell.method), c.cell.gamma, c.eta_used,
                c.status.c_str());
    for (const auto& f : c.files) std::printf("  %s\n", f.c_str());
  }
  for (const auto& f : m.extra_files) std::printf("  %s\n", f.c_str());
  std::printf("manifest: %s\n", m.manifest_file.c_str());
}

void apply_cfg_overrides(ExperimentConfig& cfg, const std::string& eftp_rule,
                         std::uint64_t seed, bool seed_set, int max_iter,
                         double tol, int workers) {
  if (seed_set) cfg.output.seed = seed;
  if (workers >= 0) cfg.output.workers = workers;
  for (auto& s : cfg.solvers) {
    if (max_iter > 0) s.max_iter = max_iter;
    if (tol > 0) s.tol = tol;
    if (!eftp_rule.empty()) s.eftp_rule = eftp_rule;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regularized saddle-point VI solver toolkit"};
  app.require_subcommand(1);
  // let `visaddle preset fig1 --out DIR` reach the global flags
  app.fallthrough();

  std::string out_dir, eftp_rule;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int max_iter = 0, workers = -1, threads = 0;
  double tol = 0.0;
  bool serial = false;

  app.add_option("--out", out_dir, "output directory (default: $VISADDLE_OUT or ./out)");
  app.add_option("--seed", seed, "RNG seed override")->each([&](const std::string&) {
    seed_set = true;
  });
  app.add_option("--max-iter", max_iter, "solver iteration cap override");
  app.add_option("--tol", tol, "residual tolerance override");
  app.add_option("--eftp-rule", eftp_rule, "EFTP stepsize rule: quarter | half")
      ->check(CLI::IsMember({"quarter", "half"}));
  app.add_option("--workers", workers, "concurrent sweep cells (0 = all cores)");
  app.add_option("--threads", threads, "OpenMP thread count (0 = runtime default)");
  app.add_flag("--serial", serial, "disable the OpenMP kernels");

  std::string config_path, preset_name;
  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("config", config_path, "experiment config file")->required();
  auto* preset_cmd = app.add_subcommand("preset", "run a built-in preset");
  preset_cmd->add_option("name", preset_name, "fig1 | fig2 | fig3")->required();
  auto* constants_cmd =
      app.add_subcommand("constants", "print the constants report for a config");
  constants_cmd->add_option("config", config_path, "experiment config file")
      ->required();
  auto* validate_cmd = app.add_subcommand("validate", "validate a config file");
  validate_cmd->add_option("config", config_path, "experiment config file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  par::set_enabled(!serial);
  par::set_threads(threads);

  try {
    if (run_cmd->parsed()) {
      ExperimentConfig cfg = load_config(config_path);
      apply_cfg_overrides(cfg, eftp_rule, seed, seed_set, max_iter, tol, workers);
      for (const auto& w : validate_config(cfg))
        std::fprintf(stderr, "warning: %s\n", w.c_str());
      const RunManifest m = run_experiment(cfg, out_dir);
      print_manifest(m);
      return m.exit_code;
    }
    if (preset_cmd->parsed()) {
      PresetOverrides ov;
      ov.out_dir = out_dir;
      if (seed_set) ov.seed = seed;
      if (max_iter > 0) ov.max_iter = max_iter;
      if (tol > 0) ov.tol = tol;
      if (!eftp_rule.empty()) ov.eftp_rule = eftp_rule;
      const RunManifest m = run_preset(preset_name, ov);
      print_manifest(m);
      return m.exit_code;
    }
    if (constants_cmd->parsed()) {
      ExperimentConfig cfg = load_config(config_path);
      apply_cfg_overrides(cfg, eftp_rule, seed, seed_set, max_iter, tol, workers);
      validate_config(cfg);
      const SaddleOperator base = build_operator(cfg.problem, cfg.output.seed);
      std::vector<double> gammas = cfg.sweep.gammas;
      if (gammas.empty()) gammas.push_back(cfg.penalty.gamma);
      for (double g : gammas) {
        PenaltyConfig pc = cfg.penalty;
        pc.gamma = g;
        const RegularizedOperator R(base, pc);
        ConstantsOptions copt;
        copt.region = Region::centered_box(base.dim(), cfg.constants.half_width);
        copt.n_samples = cfg.constants.n_samples;
        copt.seed = cfg.output.seed;
        const ConstantsReport rep =
            compute_constants(R, {cfg.problem.mu_theta, cfg.problem.mu_phi}, copt);
        std::printf("%s\n", rep.to_text().c_str());
      }
      return 0;
    }
    if (validate_cmd->parsed()) {
      const ExperimentConfig cfg = load_config(config_path);
      const auto warnings = validate_config(cfg);
      for (const auto& w : warnings)
        std::fprintf(stderr, "warning: %s\n", w.c_str());
      std::printf("config ok: %zu solver block(s), %zu sweep gamma(s)\n",
                  cfg.solvers.size(),
                  cfg.sweep.gammas.empty() ? 1 : cfg.sweep.gammas.size());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error:\n%s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
