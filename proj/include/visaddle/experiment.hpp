#pragma once

#include <optional>
#include <string>
#include <vector>

#include "visaddle/config.hpp"
#include "visaddle/constants.hpp"
#include "visaddle/solvers.hpp"
#include "visaddle/svgplot.hpp"

namespace visaddle {

// One (method, gamma, eta) point of a run. eta unset means the Assumption-6
// auto stepsize derived from the cell's constants report.
struct Cell {
  int index = 0;
  Method method = Method::eftp;
  double gamma = 0.0;
  std::optional<double> eta;
  SolverEntry entry;
  PlotKind plot = PlotKind::residual_vs_iter;
};

struct CellOutcome {
  Cell cell;
  std::string status;  // ok | skipped(<reason>) | diverged
  double eta_used = 0.0;
  std::vector<std::string> files;  // file names relative to the output dir
  SolveTrace trace;
  std::optional<ConstantsReport> constants;
};

struct RunManifest {
  std::string out_dir;
  std::string manifest_file;
  std::vector<CellOutcome> cells;
  std::vector<std::string> extra_files;
  int exit_code = 0;  // 0 all ok; 2 at least one cell diverged or skipped
};

// Product expansion of the config: solver entries x sweep gammas x sweep etas.
std::vector<Cell> expand_cells(const ExperimentConfig& cfg);

// --out flag > [output] dir > VISADDLE_OUT > ./out
std::string resolve_output_dir(const ExperimentConfig& cfg,
                               const std::string& flag_dir = "");

RunManifest run_experiment(const ExperimentConfig& cfg,
                           const std::string& flag_dir = "");

struct PresetOverrides {
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iter;
  std::optional<double> tol;
  std::optional<std::string> eftp_rule;
};

bool is_preset_name(const std::string& name);  // fig1 | fig2 | fig3
RunManifest run_preset(const std::string& name, const PresetOverrides& ov = {});

void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace visaddle
