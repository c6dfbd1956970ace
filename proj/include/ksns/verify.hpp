#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ksns/csv.hpp"
#include "ksns/diagnostics.hpp"
#include "ksns/scenarios.hpp"
#include "ksns/state.hpp"

namespace ksns {

enum class Verdict { pass, fail, skipped };
std::string to_string(Verdict v);

enum class AssertionKind {
  run_completes,       // trajectory reached T without an abort
  mass_conservation,   // max relative drift of mass_n <= tol
  c_mass_bound,        // mass_c(t) <= max(mass_n(0), mass_c(0)) + tol
  steady_deviation,    // max over time of n_inf_dev, c_inf_dev, u_inf <= tol
  lyapunov_feasible,   // skipped when C_S >= 2 sqrt(C_N)
  lyapunov_monotone,   // fraction of post-transient steps within the budget >= tol
  decay_rate,          // fitted rate of the summed columns >= tol * kappa_pred, r^2 >= 0.99
  steady_distance,     // final/initial of n_inf_dev, c_inf_dev, u_inf < tol
  grad_c_decay,        // grad_c_l2, grad_c_l4 exponential fits with r^2 >= tol and positive rates
  u_energy_decay,      // |rate(l2_u) / (2 lambda_Stokes) - 1| <= tol
  energy_identity_dt,  // one-step energy residual ratio under dt halving in [1.5, 2.5]
};

std::string to_string(AssertionKind k);

struct Assertion {
  AssertionKind kind = AssertionKind::run_completes;
  double tol = 0.0;
  std::vector<std::string> columns;  // series columns the assertion reads
  bool report_only = false;          // evaluated and reported, never fails

  std::string name() const { return to_string(kind); }
};

struct Scenario {
  std::string name;
  SimParams params;
  InitialSpec initial;
  std::vector<Assertion> assertions;
};

struct AssertionResult {
  std::string name;
  Verdict verdict = Verdict::skipped;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerdictReport {
  std::string scenario;
  EchoBlock echo;
  std::vector<AssertionResult> results;
  std::optional<std::string> run_failure;
  DiagnosticsSeries series;
  long steps = 0;

  /// True iff no assertion failed (skipped ones do not count).
  bool passed() const;
  const AssertionResult* find(const std::string& name) const;
};

/// Built-in scenarios on `grid`. C_S of the Lyapunov scenarios is set to
/// sqrt(C_N) (half of the feasibility limit 2 sqrt(C_N)) from the discrete
/// Poincare constant of the grid.
std::vector<std::string> scenario_names();
Scenario make_scenario(const std::string& name, const Grid& grid, std::uint64_t seed = 1);

/// Suites: conservation, lyapunov, stabilization, all.
std::vector<std::string> suite_scenarios(const std::string& suite);

VerdictReport run_scenario(const Scenario& s);
/// Runs the scenarios concurrently, one worker per scenario.
std::vector<VerdictReport> run_scenarios(const std::vector<Scenario>& scenarios);

/// Plain-text table followed by a key=value block.
std::string format_report(const VerdictReport& r);

struct LyapunovCalibration {
  double dt = 0.0;
  double discrepancy = 0.0;  // max |dL/dt at dt - dL/dt at dt/2| over the probe
  double tol_disc = 0.0;     // 2 * discrepancy
};

/// Runs `steps` steps at the initial CFL step and 2*steps at half of it.
LyapunovCalibration calibrate_lyapunov_tolerance(const SimParams& params, const State& initial,
                                                 const LyapunovConfig& cfg, int steps = 50);

struct LyapunovCheck {
  double t_transient = 0.0;
  std::size_t checked = 0;
  std::size_t satisfied = 0;
  double worst_excess = 0.0;  // max of dL/dt - bound_rhs over the checked steps
  double fraction() const { return checked ? static_cast<double>(satisfied) / checked : 1.0; }
};

/// Forward differences of consecutive rows (diag_every must be 1) against
/// bound_rhs of the earlier row plus tol_disc, after the transient.
LyapunovCheck check_lyapunov_monotone(const DiagnosticsSeries& series, const LyapunovConfig& cfg, double tol_disc);

struct EnergyHalving {
  double dt = 0.0;
  double residual_dt = 0.0;
  double residual_half = 0.0;
  double ratio() const { return residual_dt / residual_half; }
};

/// One step of the u-energy identity residual from the prepared initial state
/// at the CFL step and at half of it.
EnergyHalving energy_identity_halving(const SimParams& params, const State& initial);

struct LadderReport {
  std::vector<double> eps;
  std::vector<double> distances;  // L2 distance of (n, c, u) between rungs k and k+1 at the final time
  double t_final = 0.0;
  int inversions = 0;
  bool cauchy = true;
  std::vector<std::string> failures;
};

/// Identical initial data and time step across the rungs; rungs run concurrently.
LadderReport epsilon_ladder(const SimParams& base, const InitialSpec& initial, const std::vector<double>& eps_list);

/// Distances nonincreasing along the ladder, allowing one inversion of at most 10%.
bool cauchy_trend(const std::vector<double>& distances, int* inversions = nullptr);

}  // namespace ksns
