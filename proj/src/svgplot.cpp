#include "visaddle/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace visaddle {

const char* plot_kind_name(PlotKind k) {
  switch (k) {
    case PlotKind::trajectory: return "trajectory";
    case PlotKind::residual_vs_iter: return "residual_iter";
    case PlotKind::residual_vs_evals: return "residual_evals";
  }
  return "?";
}

namespace {

constexpr double kWidth = 800, kHeight = 600;
constexpr double kLeft = 80, kRight = 30, kTop = 50, kBottom = 60;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Range {
  double lo = 0, hi = 1;
  void expand(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (hi <= lo) {
      const double d = std::max(1.0, std::abs(lo) * 0.1);
      lo -= d;
      hi += d;
    } else {
      const double d = 0.05 * (hi - lo);
      lo -= d;
      hi += d;
    }
  }
};

// Round tick step of the form {1,2,5} * 10^k giving 4..9 ticks.
std::vector<double> linear_ticks(double lo, double hi) {
  const double range = hi - lo;
  double step = std::pow(10.0, std::floor(std::log10(range / 4.0)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (range / (step * m) <= 8.0) {
      step *= m;
      break;
    }
  }
  std::vector<double> ticks;
  const double first = std::ceil(lo / step) * step;
  for (double t = first; t <= hi + 1e-12 * range; t += step)
    ticks.push_back(std::abs(t) < 1e-12 * range ? 0.0 : t);
  return ticks;
}

struct Mapper {
  Range xr, yr;
  bool ylog = false;
  double x(double v) const { return kLeft + (v - xr.lo) / (xr.hi - xr.lo) * kPlotW; }
  double y(double v) const {
    const double t = ylog ? std::log10(v) : v;
    return kTop + kPlotH - (t - yr.lo) / (yr.hi - yr.lo) * kPlotH;
  }
};

void draw_frame(std::ostringstream& os, const Mapper& m, const std::string& title,
                const std::string& xlabel, const std::string& ylabel) {
  os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
  os << "<rect x=\"" << px(kLeft) << "\" y=\"" << px(kTop) << "\" width=\""
     << px(kPlotW) << "\" height=\"" << px(kPlotH)
     << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  os << "<text x=\"" << px(kWidth / 2) << "\" y=\"28\" font-family=\"sans-serif\" "
        "font-size=\"16\" text-anchor=\"middle\">"
     << title << "</text>\n";
  os << "<text x=\"" << px(kLeft + kPlotW / 2) << "\" y=\"" << px(kHeight - 15)
     << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
     << xlabel << "</text>\n";
  os << "<text x=\"20\" y=\"" << px(kTop + kPlotH / 2)
     << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
        "transform=\"rotate(-90 20 "
     << px(kTop + kPlotH / 2) << ")\">" << ylabel << "</text>\n";

  for (double t : linear_ticks(m.xr.lo, m.xr.hi)) {
    const double X = m.x(t);
    os << "<line x1=\"" << px(X) << "\" y1=\"" << px(kTop + kPlotH) << "\" x2=\""
       << px(X) << "\" y2=\"" << px(kTop + kPlotH + 5)
       << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << px(X) << "\" y=\"" << px(kTop + kPlotH + 20)
       << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
       << num(t) << "</text>\n";
  }
  if (m.ylog) {
    const int dlo = static_cast<int>(std::floor(m.yr.lo));
    const int dhi = static_cast<int>(std::ceil(m.yr.hi));
    const int n = dhi - dlo;
    const int step = n > 12 ? (n + 11) / 12 : 1;
    for (int d = dlo; d <= dhi; d += step) {
      const double Y = kTop + kPlotH - (d - m.yr.lo) / (m.yr.hi - m.yr.lo) * kPlotH;
      if (Y < kTop - 0.5 || Y > kTop + kPlotH + 0.5) continue;
      os << "<line x1=\"" << px(kLeft) << "\" y1=\"" << px(Y) << "\" x2=\""
         << px(kLeft + kPlotW) << "\" y2=\"" << px(Y)
         << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
      os << "<text x=\"" << px(kLeft - 8) << "\" y=\"" << px(Y + 4)
         << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e"
         << d << "</text>\n";
    }
  } else {
    for (double t : linear_ticks(m.yr.lo, m.yr.hi)) {
      const double Y = m.y(t);
      os << "<line x1=\"" << px(kLeft - 5) << "\" y1=\"" << px(Y) << "\" x2=\""
         << px(kLeft) << "\" y2=\"" << px(Y)
         << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
      os << "<text x=\"" << px(kLeft - 8) << "\" y=\"" << px(Y + 4)
         << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
       << num(t) << "</text>\n";
    }
  }
}

void draw_legend(std::ostringstream& os, const std::vector<PlotSeries>& series) {
  const double x0 = kLeft + kPlotW - 190, y0 = kTop + 12;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = y0 + 18.0 * static_cast<double>(i);
    os << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y) << "\" x2=\"" << px(x0 + 24)
       << "\" y2=\"" << px(y) << "\" stroke=\"" << kPalette[i % kPaletteSize]
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << px(x0 + 30) << "\" y=\"" << px(y + 4)
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[i].label
       << "</text>\n";
  }
}

}  // namespace

PlotResult emit_plot(const PlotSpec& spec) {
  require(!spec.series.empty(), "plot: needs at least one series");
  for (const auto& s : spec.series)
    require(s.trace != nullptr && !s.trace->iterates.empty(),
            "plot: series '" + s.label + "' has no data");

  PlotResult result;
  Mapper m;
  const bool residual_panel = spec.kind != PlotKind::trajectory;

  if (residual_panel) {
    m.ylog = true;
    bool first = true;
    for (const auto& s : spec.series) {
      const SolveTrace& t = *s.trace;
      for (std::size_t i = 0; i < t.residual_norms.size(); ++i) {
        const double r = t.residual_norms[i];
        if (!(r > 0) || !std::isfinite(r)) {
          result.dropped_nonpositive += 1;
          continue;
        }
        const double x = spec.kind == PlotKind::residual_vs_iter
                             ? static_cast<double>(t.iterations[i])
                             : static_cast<double>(t.oracle_calls_at[i]);
        const double ly = std::log10(r);
        if (first) {
          m.xr = {x, x};
          m.yr = {ly, ly};
          first = false;
        } else {
          m.xr.expand(x);
          m.yr.expand(ly);
        }
      }
    }
    require(!first, "plot: all residuals are nonpositive; nothing to draw on a "
                    "log panel");
    // snap the y-range to whole decades so ticks cover the data
    m.yr.lo = std::floor(m.yr.lo);
    m.yr.hi = std::ceil(m.yr.hi);
    if (m.yr.hi == m.yr.lo) m.yr.hi += 1;
    m.xr.pad();
  } else {
    bool first = true;
    for (const auto& s : spec.series) {
      for (const auto& w : s.trace->iterates) {
        const double x = w.theta(0), y = w.phi(0);
        if (first) {
          m.xr = {x, x};
          m.yr = {y, y};
          first = false;
        } else {
          m.xr.expand(x);
          m.yr.expand(y);
        }
      }
    }
    if (spec.solution) {
      m.xr.expand(spec.solution->theta(0));
      m.yr.expand(spec.solution->phi(0));
    }
    m.xr.pad();
    m.yr.pad();
  }

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
        "viewBox=\"0 0 800 600\">\n";
  if (result.dropped_nonpositive > 0)
    os << "<!-- dropped " << result.dropped_nonpositive
       << " nonpositive residual points -->\n";

  const char* xlabel = spec.kind == PlotKind::trajectory ? "theta"
                       : spec.kind == PlotKind::residual_vs_iter
                           ? "iteration"
                           : "oracle calls";
  const char* ylabel = spec.kind == PlotKind::trajectory ? "phi" : "residual";
  draw_frame(os, m, spec.title, xlabel, ylabel);

  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const SolveTrace& t = *spec.series[si].trace;
    os << "<polyline fill=\"none\" stroke=\"" << kPalette[si % kPaletteSize]
       << "\" stroke-width=\"1.5\" points=\"";
    bool any = false;
    for (std::size_t i = 0; i < t.iterates.size(); ++i) {
      double X, Y;
      if (spec.kind == PlotKind::trajectory) {
        X = m.x(t.iterates[i].theta(0));
        Y = m.y(t.iterates[i].phi(0));
      } else {
        const double r = t.residual_norms[i];
        if (!(r > 0) || !std::isfinite(r)) continue;
        X = m.x(spec.kind == PlotKind::residual_vs_iter
                    ? static_cast<double>(t.iterations[i])
                    : static_cast<double>(t.oracle_calls_at[i]));
        Y = m.y(r);
      }
      os << (any ? " " : "") << px(X) << "," << px(Y);
      any = true;
    }
    os << "\"/>\n";

    if (spec.kind == PlotKind::trajectory) {
      const ParameterPoint& w0 = t.iterates.front();
      const ParameterPoint& wn = t.iterates.back();
      os << "<circle cx=\"" << px(m.x(w0.theta(0))) << "\" cy=\""
         << px(m.y(w0.phi(0))) << "\" r=\"5\" fill=\""
         << kPalette[si % kPaletteSize] << "\"/>\n";
      os << "<rect x=\"" << px(m.x(wn.theta(0)) - 4) << "\" y=\""
         << px(m.y(wn.phi(0)) - 4) << "\" width=\"8\" height=\"8\" fill=\""
         << kPalette[si % kPaletteSize] << "\"/>\n";
    }
  }

  if (spec.kind == PlotKind::trajectory && spec.solution) {
    const double cx = m.x(spec.solution->theta(0));
    const double cy = m.y(spec.solution->phi(0));
    // five-point star
    os << "<polygon points=\"";
    for (int i = 0; i < 10; ++i) {
      const double ang = -M_PI / 2 + i * M_PI / 5;
      const double r = (i % 2 == 0) ? 9.0 : 3.8;
      os << (i ? " " : "") << px(cx + r * std::cos(ang)) << ","
         << px(cy + r * std::sin(ang));
    }
    os << "\" fill=\"#f2b01e\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  }

  draw_legend(os, spec.series);
  os << "</svg>\n";
  result.svg = os.str();
  return result;
}

PlotResult write_plot(const std::string& path, const PlotSpec& spec) {
  PlotResult r = emit_plot(spec);
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "plot: cannot open '" + path + "' for writing");
  out << r.svg;
  return r;
}

}  // namespace visaddle
