#pragma once

#include "ksns/grid.hpp"
#include "ksns/poisson.hpp"

namespace ksns {

/// Parameters of the momentum equation. phi is the gravitational potential;
/// its face gradient is precomputed once.
struct FluidParams {
  double kappa = 1.0;       // convection strength, 0 is the Stokes limit
  double yosida_eps = 0.1;  // smoothing of the convecting velocity, 0 disables it
  ScalarField phi;
  VectorField grad_phi;
};

FluidParams make_fluid_params(double kappa, double yosida_eps, const ScalarField& phi);

struct Projection {
  VectorField u;  // divergence-free part
  ScalarField q;  // potential with w = u + grad q
};

/// Discrete Helmholtz projection: solves Lap_h q = div w and returns w - grad q.
Projection helmholtz_project(const VectorField& w, PoissonSolver& solver);

/// Yosida smoothing (1 + eps A)^-1 u, realised as the componentwise no-slip
/// solve (I - eps Lap_h) v = u followed by a projection. eps = 0 returns u.
VectorField yosida_apply(const VectorField& u, double eps, PoissonSolver& solver);

/// Advective-form convection (a . grad) u on the faces of u, with the
/// transported component upwinded by the interpolated advecting velocity a.
VectorField convection(const VectorField& a, const VectorField& u);

/// Face values of n grad phi (arithmetic-mean n on faces).
VectorField buoyancy(const ScalarField& n, const FluidParams& params);

struct NsStep {
  VectorField u;
  ScalarField pressure;
  SolveStats stats;
};

/// One projection step:
///   u* = u + dt [Lap_h u - kappa (Y_eps u . grad) u + n grad phi + extra]
///   u_next = P u*,  pressure = q / dt.
/// `extra` is an optional face forcing (manufactured solutions).
NsStep ns_substep(const VectorField& u, const ScalarField& n, const FluidParams& params, double dt,
                  PoissonSolver& solver, const VectorField* extra = nullptr);

/// Largest stable explicit viscous step, h_min^2 / (2 dim).
double viscous_dt_limit(const Grid& g);

/// Dirichlet energy sum |grad_h u|^2 vol of a no-slip face velocity, using the
/// same ghost treatment as vector_laplacian_noslip: equals -<u, Lap_h u>.
double velocity_dissipation(const VectorField& u);

/// kappa <(Y u . grad) u, u>: the convective energy exchange of the discrete
/// scheme. Zero in the continuum; the upwinding makes it O(h) and positive.
double convection_work(const VectorField& u, const FluidParams& params, PoissonSolver& solver);

/// | (|u_next|^2 - |u_prev|^2) / (2 dt) - ( -D_u - W + <(n - n_bar0) grad phi, u> ) |
/// with the right-hand side evaluated at u_prev and W = convection_work(u_prev).
double energy_identity_residual(const VectorField& u_prev, const VectorField& u_next, const ScalarField& n,
                                double n_bar0, const FluidParams& params, double dt, double convection_work = 0.0);

/// Smallest eigenvalue of the discrete Stokes operator -P Lap_h on solenoidal
/// no-slip face fields, by inverse iteration with CG on the solenoidal subspace.
double stokes_eigenvalue(const Grid& g, double rel_tol = 1e-8);

/// Discrete divergence-free, no-slip field from a node-based stream function
/// (2D) or the z-component of a vector potential (3D): u = curl psi.
/// Exactly divergence free on the MAC grid.
template <class Psi>
VectorField curl_of_stream(const Grid& g, Psi&& psi) {
  VectorField u(g);
  // u_x = d psi / dy, u_y = -d psi / dx with psi sampled at nodes (z ignored for dim 3,
  // where psi is evaluated at the z of each face).
  for (std::size_t idx = 0; idx < u.comp[0].size(); ++idx) {
    const Index3 f = g.face_coords(0, idx);
    if (g.is_boundary_face(0, f)) continue;
    Point lo = g.node(f);
    Point hi = g.node({f[0], f[1] + 1, f[2]});
    if (g.dim == 3) lo[2] = hi[2] = (f[2] + 0.5) * g.spacing[2];
    u.comp[0][idx] = (psi(hi) - psi(lo)) / g.spacing[1];
  }
  for (std::size_t idx = 0; idx < u.comp[1].size(); ++idx) {
    const Index3 f = g.face_coords(1, idx);
    if (g.is_boundary_face(1, f)) continue;
    Point lo = g.node(f);
    Point hi = g.node({f[0] + 1, f[1], f[2]});
    if (g.dim == 3) lo[2] = hi[2] = (f[2] + 0.5) * g.spacing[2];
    u.comp[1][idx] = -(psi(hi) - psi(lo)) / g.spacing[0];
  }
  return u;
}

}  // namespace ksns
