#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ksns/diagnostics.hpp"
#include "ksns/state.hpp"

namespace ksns {

/// Shortest "%.17g" rendering: parses back to the identical double.
std::string format_double(double v);

/// Header row plus one row per record, columns in kDiagColumns order.
void write_series_csv(std::ostream& os, const DiagnosticsSeries& series);
void write_series_row(std::ostream& os, const DiagRow& row);
void write_series_header(std::ostream& os);

/// Reads a CSV produced by write_series_csv. Columns are matched by name;
/// unknown columns are ignored and missing ones left at zero.
DiagnosticsSeries read_series_csv(std::istream& is);

using EchoBlock = std::vector<std::pair<std::string, std::string>>;

/// Every effective parameter of a run, plus the Lyapunov set-up when known.
EchoBlock echo_params(const SimParams& p, double poincare, const LyapunovFeasibility& lyap);

/// "# key = value" lines.
void write_echo(std::ostream& os, const EchoBlock& echo);

}  // namespace ksns
