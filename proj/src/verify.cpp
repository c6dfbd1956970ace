#include "ksns/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ksns/error.hpp"
#include "ksns/fluid.hpp"
#include "ksns/stepper.hpp"

namespace ksns {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::skipped: return "skipped";
  }
  return "?";
}

std::string to_string(AssertionKind k) {
  switch (k) {
    case AssertionKind::run_completes: return "run_completes";
    case AssertionKind::mass_conservation: return "mass_conservation";
    case AssertionKind::c_mass_bound: return "c_mass_bound";
    case AssertionKind::steady_deviation: return "steady_deviation";
    case AssertionKind::lyapunov_feasible: return "lyapunov_feasible";
    case AssertionKind::lyapunov_monotone: return "lyapunov_monotone";
    case AssertionKind::decay_rate: return "decay_rate";
    case AssertionKind::steady_distance: return "steady_distance";
    case AssertionKind::grad_c_decay: return "grad_c_decay";
    case AssertionKind::u_energy_decay: return "u_energy_decay";
    case AssertionKind::energy_identity_dt: return "energy_identity_dt";
  }
  return "?";
}

bool VerdictReport::passed() const {
  return std::none_of(results.begin(), results.end(), [](const AssertionResult& r) { return r.verdict == Verdict::fail; });
}

const AssertionResult* VerdictReport::find(const std::string& name) const {
  for (const auto& r : results)
    if (r.name == name) return &r;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Scenario library

std::vector<std::string> scenario_names() {
  return {"steady_state",  "bump_n", "random_perturbation", "rotational_flux",   "stokes_limit",
          "convection_on", "swirl",  "infeasible_cs",       "rotational_near_pi"};
}

std::vector<std::string> suite_scenarios(const std::string& suite) {
  if (suite == "conservation") return {"steady_state", "bump_n"};
  if (suite == "lyapunov")
    return {"steady_state",  "bump_n",       "random_perturbation", "rotational_flux",
            "stokes_limit", "convection_on", "infeasible_cs",       "rotational_near_pi"};
  if (suite == "stabilization") return {"random_perturbation", "swirl"};
  if (suite == "all") return scenario_names();
  throw ValidationError("unknown suite '" + suite + "' (conservation, lyapunov, stabilization, all)");
}

namespace {

Assertion A(AssertionKind k, double tol, std::vector<std::string> cols = {}, bool report_only = false) {
  return {k, tol, std::move(cols), report_only};
}

const std::vector<std::string> kLyapCols{"lyapunov", "l2_n_dev", "grad_c_l2", "dt"};

}  // namespace

Scenario make_scenario(const std::string& name, const Grid& grid, std::uint64_t seed) {
  const double cn = poincare_constant(grid);
  const double cs_half = std::sqrt(cn);  // 0.5 * (2 sqrt(C_N))

  Scenario s;
  s.name = name;
  SimParams& p = s.params;
  p.grid = grid;
  p.diag_every = 1;
  p.sensitivity = SensitivitySpec::make(SensitivityKind::scalar_saturating, cs_half, 1.0);
  s.initial.seed = seed;

  const auto run_ok = A(AssertionKind::run_completes, 0.0);
  const auto mass = A(AssertionKind::mass_conservation, 1e-10, {"mass_n"});
  const auto cmass = A(AssertionKind::c_mass_bound, 1e-10, {"mass_n", "mass_c"});
  const auto feasible = A(AssertionKind::lyapunov_feasible, 0.0);
  const auto monotone = A(AssertionKind::lyapunov_monotone, 0.99, kLyapCols);
  const auto decay = A(AssertionKind::decay_rate, 0.5, {"l2_n_dev", "l2_c_dev", "lyapunov"});

  auto random_initial = [&] {
    s.initial.kind = InitialKind::random_perturbation;
    s.initial.amplitude = default_amplitude(InitialKind::random_perturbation);
  };

  if (name == "steady_state") {
    s.initial.kind = InitialKind::steady;
    p.t_end = 0.02;
    s.assertions = {run_ok, A(AssertionKind::mass_conservation, 1e-12, {"mass_n"}),
                    A(AssertionKind::c_mass_bound, 1e-12, {"mass_n", "mass_c"}),
                    A(AssertionKind::steady_deviation, 1e-12, {"n_inf_dev", "c_inf_dev", "u_inf"}), feasible,
                    monotone};
  } else if (name == "bump_n") {
    s.initial.kind = InitialKind::bump_n;
    s.initial.amplitude = default_amplitude(InitialKind::bump_n);
    p.t_end = 1.0;
    s.assertions = {run_ok, mass, cmass, feasible, monotone, decay};
  } else if (name == "random_perturbation") {
    random_initial();
    p.t_end = 1.5;
    s.assertions = {run_ok,
                    mass,
                    cmass,
                    feasible,
                    monotone,
                    decay,
                    A(AssertionKind::steady_distance, 0.01, {"n_inf_dev", "c_inf_dev", "u_inf"}),
                    A(AssertionKind::grad_c_decay, 0.98, {"grad_c_l2", "grad_c_l4", "lyapunov"})};
  } else if (name == "rotational_flux") {
    random_initial();
    p.sensitivity = SensitivitySpec::make(SensitivityKind::rotational, cs_half, 1.0, std::numbers::pi / 2.0);
    p.t_end = 0.5;
    s.assertions = {run_ok, mass, cmass, feasible, monotone};
  } else if (name == "stokes_limit" || name == "convection_on") {
    random_initial();
    p.kappa = name == "stokes_limit" ? 0.0 : 1.0;
    p.t_end = 0.5;
    s.assertions = {run_ok, mass, cmass, feasible, monotone, decay};
  } else if (name == "swirl") {
    s.initial.kind = InitialKind::swirl;
    s.initial.amplitude = default_amplitude(InitialKind::swirl);
    p.t_end = 0.1;
    s.assertions = {run_ok, mass, A(AssertionKind::u_energy_decay, 0.2, {"l2_u"}),
                    A(AssertionKind::energy_identity_dt, 0.0)};
  } else if (name == "infeasible_cs") {
    s.initial.kind = InitialKind::bump_n;
    s.initial.amplitude = default_amplitude(InitialKind::bump_n);
    p.sensitivity = SensitivitySpec::make(SensitivityKind::scalar_saturating, 2.2 * std::sqrt(cn), 1.0);
    p.t_end = 0.2;
    s.assertions = {run_ok, mass, cmass, feasible, monotone};
  } else if (name == "rotational_near_pi") {
    random_initial();
    p.sensitivity = SensitivitySpec::make(SensitivityKind::rotational, cs_half, 1.0, 0.95 * std::numbers::pi);
    p.t_end = 0.5;
    s.assertions = {run_ok, mass, A(AssertionKind::lyapunov_monotone, 0.99, kLyapCols, true)};
  } else {
    throw ValidationError("unknown scenario '" + name + "'");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Probes

LyapunovCalibration calibrate_lyapunov_tolerance(const SimParams& params, const State& initial,
                                                 const LyapunovConfig& cfg, int steps) {
  if (steps < 1) throw ValidationError("calibration needs at least one step");
  SimParams p = params;
  p.forcing.reset();
  Stepper coarse(p), fine(p);
  const State s0 = coarse.prepare_initial(initial);
  const double n_bar0 = mean(s0.n);
  LyapunovCalibration cal;
  cal.dt = coarse.cfl_dt(s0);
  State a = s0, b = s0;
  for (int k = 0; k < steps; ++k) {
    const double la = lyapunov(a, n_bar0, cfg);
    const double lb = lyapunov(b, n_bar0, cfg);
    a = coarse.advance(a, cal.dt);
    b = fine.advance(b, 0.5 * cal.dt);
    b = fine.advance(b, 0.5 * cal.dt);
    const double ra = (lyapunov(a, n_bar0, cfg) - la) / cal.dt;
    const double rb = (lyapunov(b, n_bar0, cfg) - lb) / cal.dt;
    cal.discrepancy = std::max(cal.discrepancy, std::abs(ra - rb));
  }
  cal.tol_disc = 2.0 * cal.discrepancy;
  return cal;
}

LyapunovCheck check_lyapunov_monotone(const DiagnosticsSeries& series, const LyapunovConfig& cfg, double tol_disc) {
  LyapunovCheck chk;
  const auto& rows = series.rows;
  if (rows.empty()) return chk;
  chk.t_transient = transient_end(series, "lyapunov");
  chk.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    if (rows[i].t < chk.t_transient) continue;
    const double dt = rows[i + 1].t - rows[i].t;
    if (!(dt > 0.0)) continue;
    const double slope = (rows[i + 1].lyapunov - rows[i].lyapunov) / dt;
    const double bound = -cfg.a1 * rows[i].l2_n_dev - cfg.a2 * rows[i].grad_c_l2;
    const double excess = slope - bound;
    chk.worst_excess = std::max(chk.worst_excess, excess);
    ++chk.checked;
    if (excess <= tol_disc) ++chk.satisfied;
  }
  if (chk.checked == 0) chk.worst_excess = 0.0;
  return chk;
}

EnergyHalving energy_identity_halving(const SimParams& params, const State& initial) {
  Stepper st(params);
  const State s0 = st.prepare_initial(initial);
  const double n_bar0 = mean(s0.n);
  EnergyHalving out;
  out.dt = st.cfl_dt(s0);
  const double work = convection_work(s0.u, st.fluid(), st.solver());
  auto residual = [&](double dt) {
    const State s1 = st.advance(s0, dt);
    return energy_identity_residual(s0.u, s1.u, s1.n, n_bar0, st.fluid(), dt, work);
  };
  out.residual_dt = residual(out.dt);
  out.residual_half = residual(0.5 * out.dt);
  return out;
}

bool cauchy_trend(const std::vector<double>& d, int* inversions) {
  int inv = 0;
  bool ok = true;
  for (std::size_t k = 1; k < d.size(); ++k) {
    if (d[k] <= d[k - 1]) continue;
    ++inv;
    if (d[k] > 1.1 * d[k - 1]) ok = false;
  }
  if (inversions) *inversions = inv;
  return ok && inv <= 1;
}

namespace {

double state_distance(const State& a, const State& b) {
  const ScalarField en = axpy(-1.0, a.n, b.n), ec = axpy(-1.0, a.c, b.c);
  const double dn = inner(en, en);
  const double dc = inner(ec, ec);
  const double du = norm2_sq(axpy(-1.0, a.u, b.u));
  return std::sqrt(dn + dc + du);
}

}  // namespace

LadderReport epsilon_ladder(const SimParams& base, const InitialSpec& initial, const std::vector<double>& eps_list) {
  if (eps_list.empty()) throw ValidationError("epsilon_ladder: empty eps list");
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0.0 && eps_list[k] <= 1.0)) throw ValidationError("epsilon_ladder: eps must lie in (0, 1]");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1]))
      throw ValidationError("epsilon_ladder: eps list must be strictly decreasing");
  }
  LadderReport rep;
  rep.eps = eps_list;
  const State init = make_initial(base.grid, initial);
  const double cn = poincare_constant(base.grid);

  // One step size for all rungs, so the final states are at the same time.
  double dt = std::numeric_limits<double>::infinity();
  for (double e : eps_list) {
    SimParams p = base;
    p.eps = e;
    Stepper st(p);
    dt = std::min(dt, st.cfl_dt(st.prepare_initial(init)));
  }
  const double steps = std::max(1.0, std::floor(base.t_end / dt));

  std::vector<std::optional<State>> finals(eps_list.size());
  std::vector<std::string> fail(eps_list.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    SimParams p = base;
    p.eps = eps_list[k];
    p.fixed_dt = dt;
    p.t_end = (steps + 0.5) * dt;
    p.diag_every = 1 << 30;
    p.snapshot_every = 0;
    RunOptions opts;
    opts.poincare = cn;
    try {
      Trajectory traj = run(p, init, opts);
      if (traj.ok())
        finals[k] = std::move(traj.final_state);
      else
        fail[k] = "eps=" + std::to_string(eps_list[k]) + ": " + *traj.failure;
    } catch (const std::exception& e) {
      fail[k] = "eps=" + std::to_string(eps_list[k]) + ": " + e.what();
    }
  }
  for (const auto& f : fail)
    if (!f.empty()) rep.failures.push_back(f);
  if (finals.front()) rep.t_final = finals.front()->t;
  for (std::size_t k = 0; k + 1 < eps_list.size(); ++k)
    rep.distances.push_back(finals[k] && finals[k + 1] ? state_distance(*finals[k], *finals[k + 1])
                                                       : std::numeric_limits<double>::quiet_NaN());
  rep.cauchy = rep.failures.empty() && cauchy_trend(rep.distances, &rep.inversions);
  return rep;
}

// ---------------------------------------------------------------------------
// Running a scenario

namespace {

struct Context {
  const Scenario& s;
  const Trajectory& traj;
  const State& initial;
};

AssertionResult make_result(const Assertion& a, bool ok, double measured, double threshold, std::string detail) {
  AssertionResult r{a.name(), ok ? Verdict::pass : Verdict::fail, measured, threshold, std::move(detail)};
  if (a.report_only) {
    r.verdict = Verdict::skipped;
    r.detail = "reported only (" + std::string(ok ? "holds" : "does not hold") + "); " + r.detail;
  }
  return r;
}

AssertionResult skipped(const Assertion& a, std::string why) { return {a.name(), Verdict::skipped, 0.0, 0.0, std::move(why)}; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<double> summed(const DiagnosticsSeries& series, const std::vector<std::string>& cols) {
  std::vector<double> out(series.rows.size(), 0.0);
  for (const auto& c : cols) {
    const auto v = series.column(c);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += v[i];
  }
  return out;
}

double fit_start(const Trajectory& traj) {
  return traj.lyapunov.feasible() ? transient_end(traj.series, "lyapunov") : transient_end(traj.series, "l2_n_dev");
}

AssertionResult evaluate(const Assertion& a, const Context& ctx) {
  const auto& rows = ctx.traj.series.rows;
  const auto& lyap = ctx.traj.lyapunov;
  switch (a.kind) {
    case AssertionKind::run_completes:
      return make_result(a, ctx.traj.ok(), static_cast<double>(ctx.traj.steps), 0.0,
                         ctx.traj.ok() ? "t_final=" + fmt(ctx.traj.final_state.t) : *ctx.traj.failure);

    case AssertionKind::mass_conservation: {
      const double m0 = rows.front().mass_n;
      double drift = 0.0;
      for (const auto& r : rows) drift = std::max(drift, std::abs(r.mass_n - m0) / std::abs(m0));
      return make_result(a, drift <= a.tol, drift, a.tol, "max relative drift of mass_n");
    }

    case AssertionKind::c_mass_bound: {
      const double bound = std::max(rows.front().mass_n, rows.front().mass_c);
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& r : rows) worst = std::max(worst, r.mass_c - bound);
      return make_result(a, worst <= a.tol, worst, a.tol, "max of mass_c - max(mass_n0, mass_c0)");
    }

    case AssertionKind::steady_deviation: {
      double worst = 0.0;
      for (const auto& r : rows) worst = std::max({worst, r.n_inf_dev, r.c_inf_dev, r.u_inf});
      return make_result(a, worst <= a.tol, worst, a.tol, "max deviation from (n0, n0, 0)");
    }

    case AssertionKind::lyapunov_feasible:
      if (!lyap.feasible()) return skipped(a, "infeasible by design: " + lyap.reason);
      return make_result(a, true, lyap.config->kappa_pred, 0.0, "B=" + fmt(lyap.config->B) + " kappa_pred=" +
                                                                    fmt(lyap.config->kappa_pred));

    case AssertionKind::lyapunov_monotone: {
      if (!lyap.feasible()) return skipped(a, "Lyapunov config infeasible: " + lyap.reason);
      if (ctx.s.params.diag_every != 1) return make_result(a, false, 0.0, a.tol, "needs diagnostics every step");
      const LyapunovCalibration cal = calibrate_lyapunov_tolerance(ctx.s.params, ctx.initial, *lyap.config);
      const LyapunovCheck chk = check_lyapunov_monotone(ctx.traj.series, *lyap.config, cal.tol_disc);
      return make_result(a, chk.checked > 0 && chk.fraction() >= a.tol, chk.fraction(), a.tol,
                         "steps=" + std::to_string(chk.checked) + " t_transient=" + fmt(chk.t_transient) +
                             " tol_disc=" + fmt(cal.tol_disc) + " worst_excess=" + fmt(chk.worst_excess));
    }

    case AssertionKind::decay_rate: {
      if (!lyap.feasible()) return skipped(a, "kappa_pred undefined: " + lyap.reason);
      const std::vector<std::string> cols{"l2_n_dev", "l2_c_dev"};
      const auto v = summed(ctx.traj.series, cols);
      const auto t = ctx.traj.series.column("t");
      const DecayFit fit = fit_decay_rate(t, v, {fit_start(ctx.traj), t.back()});
      const double need = a.tol * lyap.config->kappa_pred;
      return make_result(a, fit.r_squared >= 0.99 && fit.rate >= need, fit.rate, need,
                         "r2=" + fmt(fit.r_squared) + " rate/kappa_pred=" + fmt(fit.rate / lyap.config->kappa_pred));
    }

    case AssertionKind::steady_distance: {
      const DiagRow& r0 = rows.front();
      const DiagRow& r1 = rows.back();
      auto ratio = [](double a0, double a1) { return a0 > 0.0 ? a1 / a0 : (a1 > 1e-14 ? 1.0 : 0.0); };
      const double rn = ratio(r0.n_inf_dev, r1.n_inf_dev);
      const double rc = ratio(r0.c_inf_dev, r1.c_inf_dev);
      const double ru = ratio(r0.u_inf, r1.u_inf);
      const double worst = std::max({rn, rc, ru});
      return make_result(a, worst < a.tol, worst, a.tol, "final/initial n=" + fmt(rn) + " c=" + fmt(rc) + " u=" + fmt(ru));
    }

    case AssertionKind::grad_c_decay: {
      const auto t = ctx.traj.series.column("t");
      const FitWindow w{fit_start(ctx.traj), t.back()};
      const DecayFit f2 = fit_decay_rate(t, ctx.traj.series.column("grad_c_l2"), w);
      const DecayFit f4 = fit_decay_rate(t, ctx.traj.series.column("grad_c_l4"), w);
      const bool ok = f2.r_squared >= a.tol && f4.r_squared >= a.tol && f2.rate > 0.0 && f4.rate > 0.0;
      return make_result(a, ok, std::min(f2.r_squared, f4.r_squared), a.tol,
                         "l2 rate=" + fmt(f2.rate) + " r2=" + fmt(f2.r_squared) + "; l4 rate=" + fmt(f4.rate) +
                             " r2=" + fmt(f4.r_squared));
    }

    case AssertionKind::u_energy_decay: {
      const double lambda = stokes_eigenvalue(ctx.s.params.grid);
      const auto t = ctx.traj.series.column("t");
      const DecayFit fit =
          fit_decay_rate(t, ctx.traj.series.column("l2_u"), {transient_end(ctx.traj.series, "l2_u"), t.back()});
      const double dev = std::abs(fit.rate / (2.0 * lambda) - 1.0);
      return make_result(a, dev <= a.tol && fit.r_squared >= 0.99, dev, a.tol,
                         "rate=" + fmt(fit.rate) + " 2*lambda_stokes=" + fmt(2.0 * lambda) + " r2=" + fmt(fit.r_squared));
    }

    case AssertionKind::energy_identity_dt: {
      const EnergyHalving h = energy_identity_halving(ctx.s.params, ctx.initial);
      const double ratio = h.ratio();
      return make_result(a, ratio >= 1.5 && ratio <= 2.5, ratio, 2.0,
                         "residual(dt)=" + fmt(h.residual_dt) + " residual(dt/2)=" + fmt(h.residual_half));
    }
  }
  return skipped(a, "unknown assertion");
}

}  // namespace

VerdictReport run_scenario(const Scenario& s) {
  VerdictReport rep;
  rep.scenario = s.name;
  DiagnosticsSeries probe;
  for (const Assertion& a : s.assertions)
    for (const auto& c : a.columns)
      if (!probe.has_column(c)) throw ValidationError("scenario " + s.name + ": unknown column '" + c + "'");

  const State initial = make_initial(s.params.grid, s.initial);
  const Trajectory traj = run(s.params, initial);
  rep.echo = echo_params(s.params, traj.poincare, traj.lyapunov);
  rep.echo.emplace_back("initial", to_string(s.initial.kind));
  rep.echo.emplace_back("amplitude", format_double(s.initial.amplitude));
  rep.echo.emplace_back("seed", std::to_string(s.initial.seed));
  rep.run_failure = traj.failure;
  rep.series = traj.series;
  rep.steps = traj.steps;

  const Context ctx{s, traj, initial};
  for (const Assertion& a : s.assertions) {
    if (!traj.ok() && a.kind != AssertionKind::run_completes) {
      rep.results.push_back({a.name(), a.report_only ? Verdict::skipped : Verdict::fail, 0.0, a.tol,
                             "run aborted: " + *traj.failure});
      continue;
    }
    try {
      rep.results.push_back(evaluate(a, ctx));
    } catch (const std::exception& e) {
      rep.results.push_back({a.name(), a.report_only ? Verdict::skipped : Verdict::fail, 0.0, a.tol,
                             std::string("evaluation failed: ") + e.what()});
    }
  }
  return rep;
}

std::vector<VerdictReport> run_scenarios(const std::vector<Scenario>& scenarios) {
  std::vector<VerdictReport> out(scenarios.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    try {
      out[i] = run_scenario(scenarios[i]);
    } catch (const std::exception& e) {
      out[i].scenario = scenarios[i].name;
      out[i].run_failure = e.what();
      out[i].results.push_back({"run_completes", Verdict::fail, 0.0, 0.0, e.what()});
    }
  }
  return out;
}

std::string format_report(const VerdictReport& r) {
  std::ostringstream os;
  os << "== scenario " << r.scenario << " ==\n";
  write_echo(os, r.echo);
  os << "# steps = " << r.steps << '\n';
  char line[512];
  std::snprintf(line, sizeof line, "%-20s %-8s %-14s %-14s %s\n", "assertion", "verdict", "measured", "threshold",
                "detail");
  os << line;
  for (const auto& a : r.results) {
    std::snprintf(line, sizeof line, "%-20s %-8s %-14.6g %-14.6g %s\n", a.name.c_str(), to_string(a.verdict).c_str(),
                  a.measured, a.threshold, a.detail.c_str());
    os << line;
  }
  for (const auto& a : r.results) {
    const std::string key = r.scenario + "." + a.name;
    os << key << ".verdict=" << to_string(a.verdict) << '\n';
    os << key << ".measured=" << format_double(a.measured) << '\n';
    os << key << ".threshold=" << format_double(a.threshold) << '\n';
  }
  os << r.scenario << ".passed=" << (r.passed() ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace ksns
