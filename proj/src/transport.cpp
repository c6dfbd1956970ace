#include "ksns/transport.hpp"

#include <cmath>
#include <string>

#include "ksns/error.hpp"
#include "ksns/fluid.hpp"
#include "ksns/parallel.hpp"

namespace ksns {

VectorField advective_flux(const ScalarField& q, const VectorField& u) {
  require_same_grid(q.grid, u.grid, "advective_flux");
  const Grid& g = q.grid;
  VectorField F(g);
  for (int d = 0; d < g.dim; ++d) {
    const auto& ud = u.comp[d];
    auto& out = F.comp[d];
    const std::size_t stride = g.cell_stride(d);
    parallel::for_each_index(out.size(), [&](std::size_t idx) {
      const double a = ud[idx];
      if (a == 0.0) return;
      const Index3 f = g.face_coords(d, idx);
      if (g.is_boundary_face(d, f)) return;
      const std::size_t hi = g.cell_index(f[0], f[1], f[2]);
      out[idx] = a * (a > 0.0 ? q.values[hi - stride] : q.values[hi]);
    });
  }
  return F;
}

double monotone_dt_limit(const Grid& g, double max_speed) {
  double s = 0.0;
  for (int d = 0; d < g.dim; ++d) s += 2.0 / (g.spacing[d] * g.spacing[d]) + max_speed / g.spacing[d];
  return 1.0 / s;
}

namespace {

void check_dt(const Grid& g, double dt, const char* what) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw CflViolation(std::string(what) + ": dt must be positive");
  if (dt > viscous_dt_limit(g) * (1.0 + 1e-12))
    throw CflViolation(std::string(what) + ": dt exceeds the explicit diffusion limit");
}

}  // namespace

ScalarField step_n(const ScalarField& n, const ScalarField& c, const VectorField& u, const ChemotacticFlux& chemo,
                   double dt, const ScalarField* source) {
  require_same_grid(n.grid, c.grid, "step_n");
  require_same_grid(n.grid, u.grid, "step_n");
  const Grid& g = n.grid;
  check_dt(g, dt, "step_n");
  if (dt * max_abs(u) > g.min_spacing() * (1.0 + 1e-12)) throw CflViolation("step_n: dt exceeds the advective limit");
  const double nmax = max_abs(n);
  for (double v : n.values)
    if (v < -1e-12 * std::max(nmax, 1.0)) throw ValidationError("step_n: negative cell density on input");

  // Total flux grad n - J - n u; boundary faces of every term are zero.
  VectorField flux = gradient_cc(n);
  flux = axpy(-1.0, chemo(n, c), flux);
  flux = axpy(-1.0, advective_flux(n, u), flux);
  ScalarField next = axpy(dt, divergence_fc(flux), n);
  if (source) next = axpy(dt, *source, next);
  return next;
}

ScalarField step_c(const ScalarField& c, const ScalarField& n, const VectorField& u, double dt,
                   const ScalarField* source) {
  require_same_grid(n.grid, c.grid, "step_c");
  require_same_grid(c.grid, u.grid, "step_c");
  const Grid& g = c.grid;
  check_dt(g, dt, "step_c");
  if (dt >= 1.0) throw CflViolation("step_c: dt must be below 1 for the decay term");
  if (dt * max_abs(u) > g.min_spacing() * (1.0 + 1e-12)) throw CflViolation("step_c: dt exceeds the advective limit");

  const VectorField flux = axpy(-1.0, advective_flux(c, u), gradient_cc(c));
  const ScalarField div = divergence_fc(flux);
  ScalarField next(g);
  parallel::for_each_index(next.size(), [&](std::size_t i) {
    next.values[i] = c.values[i] + dt * (div.values[i] - c.values[i] + n.values[i]);
  });
  if (source) next = axpy(dt, *source, next);
  return next;
}

Dissipation dissipation_integrals(const ScalarField& n, const ScalarField& c, const VectorField& u, double alpha) {
  require_same_grid(n.grid, c.grid, "dissipation_integrals");
  const Grid& g = n.grid;
  const VectorField gn = gradient_cc(n);
  const VectorField gc = gradient_cc(c);
  const double expo = 2.0 * alpha - 2.0;
  Dissipation out;
  for (int d = 0; d < g.dim; ++d) {
    const std::vector<double> nf = face_average(n, d);
    const auto& gnd = gn.comp[d];
    const auto& gcd = gc.comp[d];
    out.d_n += parallel::sum(gnd.size(), [&](std::size_t i) {
      // 0^0 = 1 at alpha = 1
      const double w = expo == 0.0 ? 1.0 : std::pow(std::max(nf[i], 0.0), expo);
      return w * gnd[i] * gnd[i];
    });
    out.d_c += parallel::sum(gcd.size(), [&](std::size_t i) { return gcd[i] * gcd[i]; });
  }
  out.d_n *= g.cell_volume;
  out.d_c *= g.cell_volume;
  out.d_u = velocity_dissipation(u);
  return out;
}

}  // namespace ksns
