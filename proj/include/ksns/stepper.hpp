#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ksns/diagnostics.hpp"
#include "ksns/fluid.hpp"
#include "ksns/poisson.hpp"
#include "ksns/sensitivity.hpp"
#include "ksns/state.hpp"

namespace ksns {

/// dt = cfl * min{ h^2/(2 dim), h/max|u|, h/max|drift|, 0.5 }.
double cfl_dt(const State& s, const SimParams& params);

struct StepInfo {
  double dt = 0.0;
  int poisson_iterations = 0;
  double poisson_residual = 0.0;
};

/// Advances (n, c, u) of the regularised system with first-order explicit
/// coupling: n and c see the start-of-step u, then u sees the new n.
/// Holds the solver and cached operators of one simulation.
class Stepper {
 public:
  explicit Stepper(const SimParams& params);

  double cfl_dt(const State& s) const;
  /// Throws SimulationAbort (positivity, finiteness, divergence), CflViolation or SolverError.
  State advance(const State& s, double dt);
  /// Projects u once so that the initial velocity is discretely solenoidal.
  State prepare_initial(const State& s);

  const SimParams& params() const { return params_; }
  const FluidParams& fluid() const { return fluid_; }
  const ChemotacticFlux& chemotaxis() const { return chemo_; }
  PoissonSolver& solver() { return solver_; }
  const StepInfo& last_step() const { return last_; }

 private:
  SimParams params_;
  ChemotacticFlux chemo_;
  FluidParams fluid_;
  PoissonSolver solver_;
  StepInfo last_;
};

struct Trajectory {
  DiagnosticsSeries series;
  std::vector<State> snapshots;  // every snapshot_every steps, plus the first and last state
  State final_state;
  double n_bar0 = 0.0;
  double poincare = 0.0;
  LyapunovFeasibility lyapunov;
  long steps = 0;
  std::optional<std::string> failure;

  bool ok() const { return !failure.has_value(); }
};

using StepObserver = std::function<void(const State& before, const State& after, const StepInfo&)>;

struct RunOptions {
  StepObserver observer;
  /// Called for every state retained as a snapshot (including the first).
  std::function<void(const State&, long step)> on_snapshot;
  /// Retain snapshots in Trajectory::snapshots (off when only streaming them out).
  bool keep_snapshots = true;
  /// Skip the Poincare/Lyapunov setup when the caller has it already.
  std::optional<double> poincare;
};

/// Advances to params.t_end without overshooting: stops once the next
/// adaptive step would pass t_end. Substep failures end the run with a
/// partial trajectory and the cause in `failure`.
Trajectory run(const SimParams& params, const State& initial, const RunOptions& options = {});

}  // namespace ksns
