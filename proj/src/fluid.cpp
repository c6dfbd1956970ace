#include "ksns/fluid.hpp"

#include <cmath>
#include <numbers>

#include "ksns/error.hpp"
#include "ksns/parallel.hpp"
#include "ksns/sensitivity.hpp"

namespace ksns {

FluidParams make_fluid_params(double kappa, double yosida_eps, const ScalarField& phi) {
  if (!std::isfinite(kappa)) throw ValidationError("fluid: kappa must be finite");
  if (!(yosida_eps >= 0.0)) throw ValidationError("fluid: Yosida eps must be >= 0");
  if (!all_finite(phi)) throw ValidationError("fluid: phi must be finite");
  FluidParams p;
  p.kappa = kappa;
  p.yosida_eps = yosida_eps;
  p.phi = phi;
  p.grad_phi = gradient_cc(phi);
  return p;
}

Projection helmholtz_project(const VectorField& w, PoissonSolver& solver) {
  VectorField wz = w;
  zero_boundary_faces(wz);
  Projection out;
  out.q = solver.solve_neumann(divergence_fc(wz));
  out.u = axpy(-1.0, gradient_cc(out.q), wz);
  return out;
}

VectorField yosida_apply(const VectorField& u, double eps, PoissonSolver& solver) {
  if (eps == 0.0) return u;
  VectorField v(u.grid);
  for (int d = 0; d < u.dim(); ++d) v.comp[d] = solver.solve_helmholtz(d, u.comp[d], eps);
  return helmholtz_project(v, solver).u;
}

VectorField convection(const VectorField& a, const VectorField& u) {
  require_same_grid(a.grid, u.grid, "convection");
  const Grid& g = u.grid;
  VectorField out(g);
  for (int d = 0; d < g.dim; ++d) {
    const auto& ud = u.comp[d];
    const Index3 shape = g.face_shape(d);
    auto& dst = out.comp[d];
    parallel::for_each_index(ud.size(), [&](std::size_t idx) {
      const Index3 f = g.face_coords(d, idx);
      if (g.is_boundary_face(d, f)) return;
      const double centre = ud[idx];
      double s = 0.0;
      for (int e = 0; e < g.dim; ++e) {
        const double ae = e == d ? a.comp[d][idx] : tangential_average(g, a, d, f, e);
        if (ae == 0.0) continue;
        const std::size_t st = g.face_stride(d, e);
        if (ae > 0.0) {
          const double lo = f[e] > 0 ? ud[idx - st] : -centre;
          s += ae * (centre - lo) / g.spacing[e];
        } else {
          const double hi = f[e] < shape[e] - 1 ? ud[idx + st] : -centre;
          s += ae * (hi - centre) / g.spacing[e];
        }
      }
      dst[idx] = s;
    });
  }
  return out;
}

VectorField buoyancy(const ScalarField& n, const FluidParams& params) {
  require_same_grid(n.grid, params.grad_phi.grid, "buoyancy");
  const Grid& g = n.grid;
  VectorField out(g);
  for (int d = 0; d < g.dim; ++d) {
    const std::vector<double> nf = face_average(n, d);
    const auto& gp = params.grad_phi.comp[d];
    auto& o = out.comp[d];
    parallel::for_each_index(o.size(), [&](std::size_t i) { o[i] = nf[i] * gp[i]; });
  }
  return out;
}

double viscous_dt_limit(const Grid& g) {
  double s = 0.0;
  for (int d = 0; d < g.dim; ++d) s += 2.0 / (g.spacing[d] * g.spacing[d]);
  return 1.0 / s;
}

NsStep ns_substep(const VectorField& u, const ScalarField& n, const FluidParams& params, double dt,
                  PoissonSolver& solver, const VectorField* extra) {
  require_same_grid(u.grid, n.grid, "ns_substep");
  const Grid& g = u.grid;
  if (!(dt > 0.0)) throw CflViolation("ns_substep: dt must be positive");
  if (dt > viscous_dt_limit(g) * (1.0 + 1e-12))
    throw CflViolation("ns_substep: dt exceeds the explicit viscous limit");
  const double umax = max_abs(u);
  if (dt * umax > g.min_spacing() * (1.0 + 1e-12))
    throw CflViolation("ns_substep: dt exceeds the advective limit");

  VectorField rhs = vector_laplacian_noslip(u);
  if (params.kappa != 0.0 && umax > 0.0) {
    const VectorField a = yosida_apply(u, params.yosida_eps, solver);
    rhs = axpy(-params.kappa, convection(a, u), rhs);
  }
  rhs = axpy(1.0, buoyancy(n, params), rhs);
  if (extra) rhs = axpy(1.0, *extra, rhs);

  const Projection proj = helmholtz_project(axpy(dt, rhs, u), solver);
  NsStep out;
  out.u = proj.u;
  out.pressure = proj.q;
  for (double& v : out.pressure.values) v /= dt;
  out.stats = solver.last_stats();
  return out;
}

double velocity_dissipation(const VectorField& u) {
  const Grid& g = u.grid;
  double total = 0.0;
  for (int d = 0; d < g.dim; ++d) {
    const auto& ud = u.comp[d];
    const Index3 shape = g.face_shape(d);
    for (int e = 0; e < g.dim; ++e) {
      const std::size_t st = g.face_stride(d, e);
      const double inv_h2 = 1.0 / (g.spacing[e] * g.spacing[e]);
      total += parallel::sum(ud.size(), [&](std::size_t idx) {
        const Index3 f = g.face_coords(d, idx);
        double s = 0.0;
        if (e == d) {
          // differences between consecutive faces along the own axis
          if (f[d] < shape[d] - 1) {
            const double diff = ud[idx + st] - ud[idx];
            s += diff * diff * inv_h2;
          }
        } else {
          if (g.is_boundary_face(d, f)) return 0.0;
          if (f[e] < shape[e] - 1) {
            const double diff = ud[idx + st] - ud[idx];
            s += diff * diff * inv_h2;
          }
          // walls across the component: ghost -u at distance h, half weight
          if (f[e] == 0) s += 2.0 * ud[idx] * ud[idx] * inv_h2;
          if (f[e] == shape[e] - 1) s += 2.0 * ud[idx] * ud[idx] * inv_h2;
        }
        return s;
      });
    }
  }
  return total * g.cell_volume;
}

double energy_identity_residual(const VectorField& u_prev, const VectorField& u_next, const ScalarField& n,
                                double n_bar0, const FluidParams& params, double dt, double convection_work) {
  const double lhs = 0.5 * (norm2_sq(u_next) - norm2_sq(u_prev)) / dt;
  ScalarField dev = n;
  for (double& v : dev.values) v -= n_bar0;
  const double forcing = inner(buoyancy(dev, params), u_prev);
  const double rhs = -velocity_dissipation(u_prev) - convection_work + forcing;
  return std::abs(lhs - rhs);
}

double convection_work(const VectorField& u, const FluidParams& params, PoissonSolver& solver) {
  if (params.kappa == 0.0 || max_abs(u) == 0.0) return 0.0;
  const VectorField a = yosida_apply(u, params.yosida_eps, solver);
  return params.kappa * inner(convection(a, u), u);
}

namespace {

VectorField stokes_apply(const VectorField& v, PoissonSolver& solver) {
  return helmholtz_project(scaled(-1.0, vector_laplacian_noslip(v)), solver).u;
}

}  // namespace

double stokes_eigenvalue(const Grid& g, double rel_tol) {
  PoissonSolver solver(g, 1e-13);
  // Start from the lowest product mode so the iteration begins near the
  // bottom of the spectrum.
  const double lx = g.extents[0], ly = g.extents[1];
  VectorField x = curl_of_stream(g, [&](const Point& p) {
    double v = std::pow(std::sin(std::numbers::pi * p[0] / lx) * std::sin(std::numbers::pi * p[1] / ly), 2);
    if (g.dim == 3) v *= std::pow(std::sin(std::numbers::pi * p[2] / g.extents[2]), 2);
    return v;
  });
  auto normalise = [](VectorField& v) {
    const double nrm = std::sqrt(inner(v, v));
    for (int d = 0; d < v.dim(); ++d)
      for (double& e : v.comp[d]) e /= nrm;
  };
  normalise(x);
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    // Solve A y = x on the solenoidal subspace by plain CG; A is SPD there.
    VectorField y(g);
    VectorField r = x;
    VectorField p = r;
    double rr = inner(r, r);
    const double stop = 1e-24 * rr;
    int k = 0;
    for (; k < 20000 && rr > stop; ++k) {
      const VectorField ap = stokes_apply(p, solver);
      const double alpha = rr / inner(p, ap);
      y = axpy(alpha, p, y);
      r = axpy(-alpha, ap, r);
      const double rr_next = inner(r, r);
      p = axpy(rr_next / rr, p, r);
      rr = rr_next;
    }
    if (rr > stop) throw SolverError("stokes_eigenvalue: inner CG did not converge", k, std::sqrt(rr));
    normalise(y);
    x = helmholtz_project(y, solver).u;
    normalise(x);
    const double next = inner(x, stokes_apply(x, solver));
    const double change = std::abs(next - lambda) / next;
    lambda = next;
    if (it > 1 && change < rel_tol) return lambda;
  }
  throw SolverError("stokes_eigenvalue: inverse iteration did not converge", 200, lambda);
}

}  // namespace ksns
