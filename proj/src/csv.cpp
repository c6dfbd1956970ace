#include "ksns/csv.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "ksns/error.hpp"

namespace ksns {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_series_header(std::ostream& os) {
  for (std::size_t i = 0; i < kDiagColumns.size(); ++i) os << (i ? "," : "") << kDiagColumns[i];
  os << '\n';
}

void write_series_row(std::ostream& os, const DiagRow& row) {
  for (std::size_t i = 0; i < kDiagColumns.size(); ++i)
    os << (i ? "," : "") << format_double(column_value(row, kDiagColumns[i]));
  os << '\n';
}

void write_series_csv(std::ostream& os, const DiagnosticsSeries& series) {
  write_series_header(os);
  for (const DiagRow& r : series.rows) write_series_row(os, r);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

void set_column(DiagRow& r, const std::string& c, double v) {
  if (c == "t") r.t = v;
  else if (c == "mass_n") r.mass_n = v;
  else if (c == "mass_c") r.mass_c = v;
  else if (c == "l2_n_dev") r.l2_n_dev = v;
  else if (c == "l2_c_dev") r.l2_c_dev = v;
  else if (c == "l2_u") r.l2_u = v;
  else if (c == "grad_c_l2") r.grad_c_l2 = v;
  else if (c == "grad_c_l4") r.grad_c_l4 = v;
  else if (c == "lyapunov") r.lyapunov = v;
  else if (c == "D_n") r.d_n = v;
  else if (c == "D_c") r.d_c = v;
  else if (c == "D_u") r.d_u = v;
  else if (c == "n_inf_dev") r.n_inf_dev = v;
  else if (c == "c_inf_dev") r.c_inf_dev = v;
  else if (c == "u_inf") r.u_inf = v;
  else if (c == "dt") r.dt = v;
  else if (c == "poisson_iters") r.poisson_iters = v;
}

double parse_number(const std::string& s, std::size_t line) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ValidationError("csv line " + std::to_string(line) + ": cannot parse '" + s + "'");
  return v;
}

}  // namespace

DiagnosticsSeries read_series_csv(std::istream& is) {
  DiagnosticsSeries series;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    header = split(line);
    break;
  }
  if (header.empty()) throw ValidationError("csv: missing header row");
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw ValidationError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(cells.size()));
    DiagRow r;
    for (std::size_t i = 0; i < cells.size(); ++i) set_column(r, header[i], parse_number(cells[i], lineno));
    series.rows.push_back(r);
  }
  return series;
}

EchoBlock echo_params(const SimParams& p, double poincare, const LyapunovFeasibility& lyap) {
  const Grid& g = p.grid;
  auto join = [&](auto get) {
    std::string s;
    for (int d = 0; d < g.dim; ++d) s += (d ? "," : "") + get(d);
    return s;
  };
  EchoBlock e;
  e.emplace_back("dim", std::to_string(g.dim));
  e.emplace_back("cells", join([&](int d) { return std::to_string(g.cells[d]); }));
  e.emplace_back("extents", join([&](int d) { return format_double(g.extents[d]); }));
  e.emplace_back("T", format_double(p.t_end));
  e.emplace_back("cfl", format_double(p.cfl));
  e.emplace_back("fixed_dt", p.fixed_dt ? format_double(*p.fixed_dt) : "adaptive");
  e.emplace_back("eps", format_double(p.eps));
  e.emplace_back("yosida_eps", format_double(p.effective_yosida_eps()));
  e.emplace_back("kappa", format_double(p.kappa));
  e.emplace_back("sensitivity", to_string(p.sensitivity.kind));
  e.emplace_back("cs", format_double(p.sensitivity.cs));
  e.emplace_back("alpha", format_double(p.sensitivity.alpha));
  e.emplace_back("theta", format_double(p.sensitivity.theta));
  e.emplace_back("phi", to_string(p.phi.kind));
  e.emplace_back("phi_strength", format_double(p.phi.strength));
  e.emplace_back("C_N", format_double(poincare));
  e.emplace_back("lyapunov_feasible", lyap.feasible() ? "true" : "false");
  if (lyap.config) {
    e.emplace_back("B", format_double(lyap.config->B));
    e.emplace_back("a1", format_double(lyap.config->a1));
    e.emplace_back("a2", format_double(lyap.config->a2));
    e.emplace_back("kappa_pred", format_double(lyap.config->kappa_pred));
  } else {
    e.emplace_back("lyapunov_reason", lyap.reason);
  }
  return e;
}

void write_echo(std::ostream& os, const EchoBlock& echo) {
  for (const auto& [k, v] : echo) os << "# " << k << " = " << v << '\n';
}

}  // namespace ksns
