#include "ksns/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ksns/error.hpp"
#include "ksns/parallel.hpp"
#include "ksns/transport.hpp"

namespace ksns {

std::string to_string(PhiKind kind) {
  switch (kind) {
    case PhiKind::none: return "none";
    case PhiKind::linear: return "linear";
    case PhiKind::cosine: return "cosine";
  }
  return "?";
}

PhiKind phi_kind_from_string(const std::string& s) {
  if (s == "none") return PhiKind::none;
  if (s == "linear") return PhiKind::linear;
  if (s == "cosine") return PhiKind::cosine;
  throw ValidationError("unknown phi kind '" + s + "'");
}

ScalarField make_phi(const Grid& grid, const PhiSpec& spec) {
  ScalarField phi(grid);
  if (spec.kind == PhiKind::none) return phi;
  for (std::size_t idx = 0; idx < phi.size(); ++idx) {
    const Point x = grid.cell_center(grid.cell_coords(idx));
    if (spec.kind == PhiKind::linear) {
      phi[idx] = spec.strength * x[grid.dim - 1];
    } else {
      double v = spec.strength;
      for (int d = 0; d < grid.dim; ++d) v *= std::cos(std::numbers::pi * x[d] / grid.extents[d]);
      phi[idx] = v;
    }
  }
  return phi;
}

void SimParams::validate() const {
  if (!(t_end > 0.0)) throw ValidationError("T must be positive");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ValidationError("CFL safety factor must lie in (0, 1]");
  if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("eps must lie in (0, 1]");
  if (yosida_eps && *yosida_eps < 0.0) throw ValidationError("Yosida eps must be >= 0");
  if (diag_every < 1) throw ValidationError("diagnostics cadence must be positive");
  if (snapshot_every < 0) throw ValidationError("snapshot cadence must be >= 0");
  if (fixed_dt && !(*fixed_dt > 0.0)) throw ValidationError("fixed dt must be positive");
  if (!std::isfinite(phi.strength)) throw ValidationError("phi strength must be finite");
  // Re-run the sensitivity checks (alpha >= 1, C_S >= 0).
  (void)SensitivitySpec::make(sensitivity.kind, sensitivity.cs, sensitivity.alpha, sensitivity.theta,
                              sensitivity.table);
}

namespace {

double cfl_from(const Grid& g, double cfl, double umax, double drift) {
  const double h = g.min_spacing();
  double dt = h * h / (2.0 * g.dim);
  if (umax > 0.0) dt = std::min(dt, h / umax);
  if (drift > 0.0) dt = std::min(dt, h / drift);
  dt = std::min(dt, 0.5);
  return cfl * dt;
}

void require_valid(const State& s) {
  if (!all_finite(s.n) || !all_finite(s.c) || !all_finite(s.u))
    throw ValidationError("state contains non-finite values");
}

ScalarField sample_cells(const Grid& g, const std::function<double(const Point&, double)>& f, double t) {
  ScalarField out(g);
  for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] = f(g.cell_center(g.cell_coords(idx)), t);
  return out;
}

VectorField sample_faces(const Grid& g, const std::function<double(int, const Point&, double)>& f, double t) {
  VectorField out(g);
  for (int d = 0; d < g.dim; ++d)
    for (std::size_t idx = 0; idx < out.comp[d].size(); ++idx) {
      const Index3 fc = g.face_coords(d, idx);
      if (!g.is_boundary_face(d, fc)) out.comp[d][idx] = f(d, g.face_center(d, fc), t);
    }
  return out;
}

}  // namespace

double cfl_dt(const State& s, const SimParams& params) {
  require_valid(s);
  const ChemotacticFlux chemo(params.grid, params.sensitivity, make_regularization(params.eps, params.grid));
  return cfl_from(params.grid, params.cfl, max_abs(s.u), chemo.max_drift_speed(s.n, s.c));
}

Stepper::Stepper(const SimParams& params)
    : params_(params),
      chemo_(params.grid, params.sensitivity, make_regularization(params.eps, params.grid)),
      fluid_(make_fluid_params(params.kappa, params.effective_yosida_eps(), make_phi(params.grid, params.phi))),
      solver_(params.grid) {
  params_.validate();
}

double Stepper::cfl_dt(const State& s) const {
  require_valid(s);
  return cfl_from(params_.grid, params_.cfl, max_abs(s.u), chemo_.max_drift_speed(s.n, s.c));
}

State Stepper::prepare_initial(const State& s) {
  require_valid(s);
  require_same_grid(s.n.grid, params_.grid, "initial state");
  State out = s;
  out.u = helmholtz_project(s.u, solver_).u;
  return out;
}

State Stepper::advance(const State& s, double dt) {
  const Grid& g = params_.grid;
  const int iters_before = solver_.total_iterations();

  std::optional<ScalarField> src_n, src_c;
  std::optional<VectorField> src_u;
  if (params_.forcing) {
    const Forcing& f = *params_.forcing;
    if (f.n) src_n = sample_cells(g, f.n, s.t);
    if (f.c) src_c = sample_cells(g, f.c, s.t);
    if (f.u) src_u = sample_faces(g, f.u, s.t);
  }

  State next(g);
  next.t = s.t + dt;
  next.n = step_n(s.n, s.c, s.u, chemo_, dt, src_n ? &*src_n : nullptr);
  next.c = step_c(s.c, s.n, s.u, dt, src_c ? &*src_c : nullptr);
  NsStep ns = ns_substep(s.u, next.n, fluid_, dt, solver_, src_u ? &*src_u : nullptr);
  next.u = std::move(ns.u);
  next.pressure = std::move(ns.pressure);

  last_.dt = dt;
  last_.poisson_iterations = solver_.total_iterations() - iters_before;
  last_.poisson_residual = ns.stats.residual;

  std::ostringstream why;
  why.precision(17);
  if (!all_finite(next.n) || !all_finite(next.c) || !all_finite(next.u)) {
    why << "non-finite field at t=" << next.t;
    throw SimulationAbort(why.str());
  }
  const double nmax = max_abs(next.n);
  const double nmin = *std::min_element(next.n.values.begin(), next.n.values.end());
  if (nmin < -1e-12 * std::max(nmax, 1.0)) {
    why << "positivity violated for n at t=" << next.t << ": min n = " << nmin << ", dt = " << dt;
    throw SimulationAbort(why.str());
  }
  const double cmax = max_abs(next.c);
  const double cmin = *std::min_element(next.c.values.begin(), next.c.values.end());
  if (cmin < -1e-12 * std::max(cmax, 1.0)) {
    why << "positivity violated for c at t=" << next.t << ": min c = " << cmin << ", dt = " << dt;
    throw SimulationAbort(why.str());
  }
  const double div = max_abs(divergence_fc(next.u));
  if (div > 1e-9 * (1.0 + max_abs(next.u) / g.min_spacing())) {
    why << "divergence constraint violated at t=" << next.t << ": max |div u| = " << div;
    throw SimulationAbort(why.str());
  }
  return next;
}

Trajectory run(const SimParams& params, const State& initial, const RunOptions& options) {
  Trajectory traj;
  Stepper stepper(params);
  State state = stepper.prepare_initial(initial);

  traj.n_bar0 = mean(state.n);
  traj.poincare = options.poincare ? *options.poincare : poincare_constant(params.grid);
  traj.lyapunov = make_lyapunov_config(params.sensitivity.cs, traj.poincare);
  const double alpha = params.sensitivity.alpha;

  auto record = [&](const State& s, const StepInfo* info) {
    DiagRow row = measure(s, traj.n_bar0, traj.lyapunov.config, alpha);
    if (info) {
      row.dt = info->dt;
      row.poisson_iters = info->poisson_iterations;
    }
    traj.series.rows.push_back(row);
  };
  auto snapshot = [&](const State& s, long step) {
    if (params.snapshot_every > 0 && options.keep_snapshots) traj.snapshots.push_back(s);
    if (options.on_snapshot) options.on_snapshot(s, step);
  };

  record(state, nullptr);
  snapshot(state, 0);
  const double t_stop = params.t_end * (1.0 + 1e-12);
  long step = 0;
  bool last_recorded = true;
  bool last_snapshotted = true;
  try {
    while (true) {
      double dt = params.fixed_dt ? *params.fixed_dt : stepper.cfl_dt(state);
      if (params.fixed_dt) {
        const double limit = stepper.cfl_dt(state) / params.cfl;
        if (dt > limit * (1.0 + 1e-12)) throw CflViolation("fixed dt exceeds the stability bound");
      }
      if (state.t + dt > t_stop) break;
      State next = stepper.advance(state, dt);
      ++step;
      if (options.observer) options.observer(state, next, stepper.last_step());
      state = std::move(next);
      last_recorded = step % params.diag_every == 0;
      if (last_recorded) record(state, &stepper.last_step());
      last_snapshotted = params.snapshot_every > 0 && step % params.snapshot_every == 0;
      if (last_snapshotted) snapshot(state, step);
    }
  } catch (const std::exception& e) {
    traj.failure = e.what();
  }
  if (!last_recorded) record(state, &stepper.last_step());
  if (!last_snapshotted && params.snapshot_every > 0) snapshot(state, step);
  traj.steps = step;
  traj.final_state = std::move(state);
  return traj;
}

}  // namespace ksns
