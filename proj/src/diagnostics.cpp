#include "ksns/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "ksns/error.hpp"
#include "ksns/fluid.hpp"
#include "ksns/parallel.hpp"
#include "ksns/poisson.hpp"

namespace ksns {

double poincare_constant(const Grid& grid, double rel_tol) {
  PoissonSolver solver(grid, 1e-13);
  ScalarField x(grid);
  // Deterministic splitmix64 start vector, projected to zero mean.
  std::uint64_t state = 0x9E3779B97F4A7C15ull;
  for (double& v : x.values) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    v = static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
  }
  double lambda = 0.0;
  double change = 1.0;
  for (int it = 0; it < 500; ++it) {
    x = solver.solve_neumann(x);
    const double nrm = std::sqrt(inner(x, x));
    for (double& v : x.values) v /= nrm;
    const double next = -inner(x, laplacian_neumann(x)) / inner(x, x);
    change = std::abs(next - lambda) / next;
    lambda = next;
    if (it > 2 && change < rel_tol) {
      // Rayleigh quotients converge quadratically; one extra sweep settles the last digits.
      x = solver.solve_neumann(x);
      return inner(x, x) / -inner(x, laplacian_neumann(x));
    }
  }
  throw SolverError("poincare_constant: inverse iteration did not converge", 500, change);
}

LyapunovFeasibility make_lyapunov_config(double cs, double poincare) {
  LyapunovFeasibility out;
  if (!(poincare > 0.0) || !(cs >= 0.0)) {
    out.reason = "C_S must be >= 0 and C_N > 0";
    return out;
  }
  if (cs >= 2.0 * std::sqrt(poincare)) {
    out.reason = "C_S >= 2 sqrt(C_N): no admissible weight B";
    return out;
  }
  const double lo = 1.0 / (2.0 * poincare);
  const double cap = 10.0 / poincare;
  const double hi = cs > 0.0 ? std::min(2.0 / (cs * cs), cap) : cap;
  LyapunovConfig cfg;
  cfg.B = 0.5 * (lo + hi);
  cfg.poincare = poincare;
  cfg.cs = cs;
  cfg.a1 = cfg.B * poincare / 2.0 - 0.25;
  cfg.a2 = 1.0 - cfg.B * cs * cs / 2.0;
  cfg.kappa_pred = std::min(2.0 * cfg.a1 / cfg.B, 2.0 * poincare * cfg.a2);
  if (!(cfg.a1 > 0.0 && cfg.a2 > 0.0 && cfg.kappa_pred > 0.0)) {
    out.reason = "coefficients not positive at the chosen B";
    return out;
  }
  out.config = cfg;
  return out;
}

namespace {

double dev_sq(const ScalarField& f, double ref) {
  return parallel::sum(f.size(), [&](std::size_t i) {
           const double d = f.values[i] - ref;
           return d * d;
         }) *
         f.grid.cell_volume;
}

double dev_max(const ScalarField& f, double ref) {
  return parallel::max(f.size(), [&](std::size_t i) { return std::abs(f.values[i] - ref); });
}

}  // namespace

double lyapunov(const State& s, double n_bar0, const LyapunovConfig& cfg) {
  return 0.5 * cfg.B * dev_sq(s.n, n_bar0) + 0.5 * dev_sq(s.c, n_bar0);
}

LyapunovBudget lyapunov_budget(const State& s, double n_bar0, const LyapunovConfig& cfg) {
  LyapunovBudget b;
  b.value = lyapunov(s, n_bar0, cfg);
  b.bound_rhs = -cfg.a1 * dev_sq(s.n, n_bar0) - cfg.a2 * grad_c_norms(s.c).l2_sq;
  return b;
}

GradCNorms grad_c_norms(const ScalarField& c) {
  const Grid& g = c.grid;
  const VectorField gc = gradient_cc(c);
  std::vector<double> cell_sq(g.cell_count(), 0.0);
  parallel::for_each_index(cell_sq.size(), [&](std::size_t idx) {
    const Index3 cc = g.cell_coords(idx);
    double s = 0.0;
    for (int d = 0; d < g.dim; ++d) {
      const std::size_t lo = g.face_index(d, cc[0], cc[1], cc[2]);
      const double a = gc.comp[d][lo];
      const double b = gc.comp[d][lo + g.face_stride(d, d)];
      s += 0.5 * (a * a + b * b);
    }
    cell_sq[idx] = s;
  });
  GradCNorms out;
  out.l2_sq = parallel::sum(cell_sq.size(), [&](std::size_t i) { return cell_sq[i]; }) * g.cell_volume;
  out.l4_4 = parallel::sum(cell_sq.size(), [&](std::size_t i) { return cell_sq[i] * cell_sq[i]; }) * g.cell_volume;
  out.max_sq = parallel::max(cell_sq.size(), [&](std::size_t i) { return cell_sq[i]; });
  return out;
}

SteadyDistance steady_state_distance(const State& s, double n_bar0) {
  return {dev_max(s.n, n_bar0), dev_max(s.c, n_bar0), max_abs(s.u)};
}

DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> values, FitWindow window) {
  if (times.size() != values.size()) throw ValidationError("fit_decay_rate: times and values differ in length");
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < window.t_begin || times[i] > window.t_end) continue;
    if (!(values[i] > 0.0)) throw ValidationError("fit_decay_rate: nonpositive value inside the fit window");
    ts.push_back(times[i]);
    ys.push_back(std::log(values[i]));
  }
  if (ts.size() < 10) throw ValidationError("fit_decay_rate: fewer than 10 samples in the window");
  const double n = static_cast<double>(ts.size());
  double tm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    tm += ts[i];
    ym += ys[i];
  }
  tm /= n;
  ym /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - tm) * (ts[i] - tm);
    sty += (ts[i] - tm) * (ys[i] - ym);
    syy += (ys[i] - ym) * (ys[i] - ym);
  }
  if (stt == 0.0) throw ValidationError("fit_decay_rate: window has no time spread");
  DecayFit fit;
  const double slope = sty / stt;
  fit.rate = -slope;
  fit.intercept = ym - slope * tm;
  fit.samples = ts.size();
  double sse = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ys[i] - (fit.intercept + slope * ts[i]);
    sse += r * r;
  }
  // A constant series is fitted exactly.
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

double column_value(const DiagRow& r, std::string_view c) {
  if (c == "t") return r.t;
  if (c == "mass_n") return r.mass_n;
  if (c == "mass_c") return r.mass_c;
  if (c == "l2_n_dev") return r.l2_n_dev;
  if (c == "l2_c_dev") return r.l2_c_dev;
  if (c == "l2_u") return r.l2_u;
  if (c == "grad_c_l2") return r.grad_c_l2;
  if (c == "grad_c_l4") return r.grad_c_l4;
  if (c == "lyapunov") return r.lyapunov;
  if (c == "D_n") return r.d_n;
  if (c == "D_c") return r.d_c;
  if (c == "D_u") return r.d_u;
  if (c == "n_inf_dev") return r.n_inf_dev;
  if (c == "c_inf_dev") return r.c_inf_dev;
  if (c == "u_inf") return r.u_inf;
  if (c == "dt") return r.dt;
  if (c == "poisson_iters") return r.poisson_iters;
  throw ValidationError("unknown diagnostics column '" + std::string(c) + "'");
}

bool DiagnosticsSeries::has_column(std::string_view name) const {
  return std::find(kDiagColumns.begin(), kDiagColumns.end(), name) != kDiagColumns.end();
}

std::vector<double> DiagnosticsSeries::column(std::string_view name) const {
  if (!has_column(name)) throw ValidationError("unknown diagnostics column '" + std::string(name) + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(column_value(r, name));
  return out;
}

DiagRow measure(const State& s, double n_bar0, const std::optional<LyapunovConfig>& cfg, double alpha) {
  DiagRow r;
  r.t = s.t;
  r.mass_n = integrate(s.n);
  r.mass_c = integrate(s.c);
  r.l2_n_dev = dev_sq(s.n, n_bar0);
  r.l2_c_dev = dev_sq(s.c, n_bar0);
  r.l2_u = norm2_sq(s.u);
  const GradCNorms gc = grad_c_norms(s.c);
  r.grad_c_l2 = gc.l2_sq;
  r.grad_c_l4 = gc.l4_4;
  r.lyapunov = cfg ? 0.5 * cfg->B * r.l2_n_dev + 0.5 * r.l2_c_dev : std::numeric_limits<double>::quiet_NaN();
  const Dissipation dis = dissipation_integrals(s.n, s.c, s.u, alpha);
  r.d_n = dis.d_n;
  r.d_c = dis.d_c;
  r.d_u = dis.d_u;
  const SteadyDistance sd = steady_state_distance(s, n_bar0);
  r.n_inf_dev = sd.n_inf;
  r.c_inf_dev = sd.c_inf;
  r.u_inf = sd.u_inf;
  return r;
}

double transient_end(const DiagnosticsSeries& series, std::string_view column) {
  const std::vector<double> v = series.column(column);
  if (v.empty()) return 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] <= 0.5 * v.front()) return series.rows[i].t;
  return series.rows.back().t;
}

}  // namespace ksns
