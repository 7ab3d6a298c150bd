#pragma once

#include <optional>
#include <string>
#include <vector>

#include "visaddle/geometry.hpp"
#include "visaddle/solvers.hpp"

namespace visaddle {

// Static SVG 1.1 panels, written without any plotting dependency so the
// bytes are a pure function of the inputs: fixed 800x600 viewport, fixed
// palette, series drawn in config order.
enum class PlotKind { trajectory, residual_vs_iter, residual_vs_evals };
const char* plot_kind_name(PlotKind k);

struct PlotSeries {
  std::string label;
  const SolveTrace* trace = nullptr;
};

struct PlotSpec {
  PlotKind kind = PlotKind::residual_vs_iter;
  std::string title;
  std::vector<PlotSeries> series;
  // Trajectory panels mark the solution with a star when known.
  std::optional<ParameterPoint> solution;
};

struct PlotResult {
  std::string svg;
  // Log-scale panels drop nonpositive residuals; the count is kept here and
  // echoed in an SVG comment.
  int dropped_nonpositive = 0;
};

PlotResult emit_plot(const PlotSpec& spec);
PlotResult write_plot(const std::string& path, const PlotSpec& spec);

}  // namespace visaddle
