#include "visaddle/trace_io.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

namespace visaddle {

namespace {

void put_num(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

}  // namespace

void write_trace_csv(std::ostream& os, const SolveTrace& trace,
                     const std::vector<std::string>& header_comments) {
  for (const auto& line : header_comments) os << line << "\n";
  os << "# status " << status_name(trace.status) << " after "
     << trace.loop_iterations << " iterations (" << trace.stop_reason << ")\n";
  os << "# oracle_calls " << trace.oracle_calls << " residual_calls "
     << trace.residual_calls << "\n";

  const bool with_distance = !trace.distances.empty();
  const Index dt = trace.iterates.empty() ? 0 : trace.iterates.front().d_theta();
  const Index dp = trace.iterates.empty() ? 0 : trace.iterates.front().d_phi();

  os << "iter";
  for (Index i = 0; i < dt; ++i) os << ",theta_" << i;
  for (Index i = 0; i < dp; ++i) os << ",phi_" << i;
  os << ",residual";
  if (with_distance) os << ",distance";
  os << ",oracle_calls\n";

  for (std::size_t r = 0; r < trace.iterations.size(); ++r) {
    os << trace.iterations[r];
    const ParameterPoint& w = trace.iterates[r];
    for (Index i = 0; i < dt; ++i) {
      os << ",";
      put_num(os, w.theta(i));
    }
    for (Index i = 0; i < dp; ++i) {
      os << ",";
      put_num(os, w.phi(i));
    }
    os << ",";
    put_num(os, trace.residual_norms[r]);
    if (with_distance) {
      os << ",";
      put_num(os, trace.distances[r]);
    }
    os << "," << trace.oracle_calls_at[r] << "\n";
  }
}

std::string trace_csv_string(const SolveTrace& trace,
                             const std::vector<std::string>& header_comments) {
  std::ostringstream os;
  write_trace_csv(os, trace, header_comments);
  return os.str();
}

}  // namespace visaddle
