#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "visaddle/constants.hpp"
#include "visaddle/solvers.hpp"

namespace visaddle {

// CSV layout: `iter,theta_0..,phi_0..,residual[,distance],oracle_calls`,
// preceded by `#` comment lines echoing the run configuration and the
// constants report. Numbers are written with %.17g so a re-read is
// bit-exact.
void write_trace_csv(std::ostream& os, const SolveTrace& trace,
                     const std::vector<std::string>& header_comments);

std::string trace_csv_string(const SolveTrace& trace,
                             const std::vector<std::string>& header_comments);

}  // namespace visaddle
