// Acceptance run: one PASS/FAIL line per criterion.
//
//   ksns_acceptance            all criteria
//   ksns_acceptance 3 4 10     a subset
//
// Exit status is nonzero iff a selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "ksns/csv.hpp"
#include "ksns/diagnostics.hpp"
#include "ksns/mms.hpp"
#include "ksns/parallel.hpp"
#include "ksns/scenarios.hpp"
#include "ksns/stepper.hpp"
#include "ksns/verify.hpp"
#include "ksns/weak_form.hpp"

using namespace ksns;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Grid square(int n) {
  const std::vector<double> L{1.0, 1.0};
  const std::vector<int> N{n, n};
  return make_grid(2, L, N);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const AssertionResult& need(const VerdictReport& r, const std::string& name) {
  const AssertionResult* a = r.find(name);
  if (!a) throw std::runtime_error("assertion " + name + " missing from " + r.scenario);
  return *a;
}

std::string verdict_detail(const AssertionResult& a) {
  std::ostringstream os;
  os << a.name << "=" << to_string(a.verdict) << " measured=" << a.measured << " threshold=" << a.threshold << " ("
     << a.detail << ")";
  return os.str();
}

// Criteria 1 and 2 share one fixed-step run of 10^4 steps.
struct BumpRun {
  Trajectory traj;
  double seconds = 0.0;
};

const BumpRun& bump_run() {
  static const BumpRun r = [] {
    const auto t0 = std::chrono::steady_clock::now();
    Scenario s = make_scenario("bump_n", square(64));
    SimParams p = s.params;
    const State init = make_initial(p.grid, s.initial);
    Stepper st(p);
    const double dt = st.cfl_dt(st.prepare_initial(init));
    p.fixed_dt = dt;
    p.t_end = (1e4 + 0.5) * dt;
    p.diag_every = 1;
    BumpRun out{run(p, init), 0.0};
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }();
  return r;
}

Outcome mass_conservation() {
  const BumpRun& r = bump_run();
  if (!r.traj.ok()) return {false, "run failed: " + *r.traj.failure};
  const auto m = r.traj.series.column("mass_n");
  double drift = 0.0;
  for (double v : m) drift = std::max(drift, std::abs(v - m.front()) / m.front());
  const bool ok = r.traj.steps == 10000 && drift <= 1e-10 && r.seconds <= 60.0;
  return {ok, "steps=" + std::to_string(r.traj.steps) + " max relative drift=" + fmt("%.3e", drift) +
                  " runtime=" + fmt("%.1fs", r.seconds)};
}

Outcome c_mass_bound() {
  const BumpRun& r = bump_run();
  if (!r.traj.ok()) return {false, "run failed: " + *r.traj.failure};
  const auto mn = r.traj.series.column("mass_n");
  const auto mc = r.traj.series.column("mass_c");
  const double cap = std::max(mn.front(), mc.front());
  double worst = -1e300;
  for (double v : mc) worst = std::max(worst, v - cap);
  return {worst <= 1e-10, "records=" + std::to_string(mc.size()) + " max(mass_c - cap)=" + fmt("%.3e", worst)};
}

// Criteria 3, 4 and 6 share the 64^2 random-perturbation scenario.
struct StabilizationRun {
  VerdictReport report;
  double seconds = 0.0;
};

const StabilizationRun& stabilization_run() {
  static const StabilizationRun r = [] {
    const auto t0 = std::chrono::steady_clock::now();
    StabilizationRun out{run_scenario(make_scenario("random_perturbation", square(64), 1)), 0.0};
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }();
  return r;
}

Outcome lyapunov_monotone() {
  const StabilizationRun& r = stabilization_run();
  const AssertionResult& a = need(r.report, "lyapunov_monotone");
  const bool ok = a.verdict == Verdict::pass && r.seconds <= 300.0;
  return {ok, verdict_detail(a) + " runtime=" + fmt("%.1fs", r.seconds)};
}

Outcome stabilization() {
  const StabilizationRun& r = stabilization_run();
  const AssertionResult& rate = need(r.report, "decay_rate");
  const AssertionResult& dist = need(r.report, "steady_distance");
  return {rate.verdict == Verdict::pass && dist.verdict == Verdict::pass,
          verdict_detail(rate) + "; " + verdict_detail(dist)};
}

Outcome grad_c_decay() {
  const AssertionResult& a = need(stabilization_run().report, "grad_c_decay");
  return {a.verdict == Verdict::pass, verdict_detail(a)};
}

Outcome u_energy() {
  const VerdictReport r = run_scenario(make_scenario("swirl", square(64)));
  const AssertionResult& decay = need(r, "u_energy_decay");
  const AssertionResult& halving = need(r, "energy_identity_dt");
  return {decay.verdict == Verdict::pass && halving.verdict == Verdict::pass,
          verdict_detail(decay) + "; " + verdict_detail(halving)};
}

Outcome poincare() {
  const double target = 1.0 / (std::numbers::pi * std::numbers::pi);
  const double c2 = poincare_constant(square(64));
  const std::vector<double> L{1.0, 1.0, 1.0};
  const std::vector<int> N{32, 32, 32};
  const double c3 = poincare_constant(make_grid(3, L, N));
  const double e2 = std::abs(c2 / target - 1), e3 = std::abs(c3 / target - 1);
  return {e2 <= 0.01 && e3 <= 0.03, "C_N(64^2)=" + fmt("%.6f", c2) + " rel.err=" + fmt("%.2e", e2) +
                                        "; C_N(32^3)=" + fmt("%.6f", c3) + " rel.err=" + fmt("%.2e", e3)};
}

WeakResidual weak_residual_at(int n) {
  Scenario s = make_scenario("bump_n", square(n));
  SimParams p = s.params;
  p.t_end = 0.05;
  p.diag_every = 1 << 30;
  WeakResidualAccumulator acc(p);
  RunOptions opts;
  opts.observer = [&](const State& before, const State& after, const StepInfo&) {
    if (acc.steps() == 0) acc.begin(before);
    acc.add_step(before, after);
  };
  const Trajectory t = run(p, make_initial(p.grid, s.initial), opts);
  if (!t.ok()) throw std::runtime_error("weak residual run failed: " + *t.failure);
  return acc.result();
}

Outcome weak_residual_ratio() {
  const WeakResidual a = weak_residual_at(32), b = weak_residual_at(64);
  const double rn = a.r_n / b.r_n, rc = a.r_c / b.r_c, ru = a.r_u / b.r_u;
  auto in = [](double r) { return r >= 1.4 && r <= 2.6; };
  std::ostringstream os;
  os << "r_n " << a.r_n << "->" << b.r_n << " (x" << rn << "), r_c " << a.r_c << "->" << b.r_c << " (x" << rc
     << "), r_u " << a.r_u << "->" << b.r_u << " (x" << ru << ")";
  return {in(rn) && in(rc) && in(ru), os.str()};
}

Outcome ladder() {
  Scenario s = make_scenario("bump_n", square(32));
  s.params.t_end = 0.05;
  const LadderReport r = epsilon_ladder(s.params, s.initial, {0.4, 0.2, 0.1, 0.05});
  std::ostringstream os;
  os << "t=" << r.t_final << " distances=";
  for (double d : r.distances) os << d << " ";
  os << "inversions=" << r.inversions;
  for (const auto& f : r.failures) os << " failure: " << f;
  return {r.cauchy, os.str()};
}

Outcome mms() {
  const ConvergenceReport diff = mms_convergence(make_mms_case(MmsKind::diffusion_only, 2), {16, 32, 64});
  const ConvergenceReport full = mms_convergence(make_mms_case(MmsKind::full_coupling, 2), {16, 32, 64});
  const double pd = diff.order(), pf = full.order();
  const bool ok = diff.failures.empty() && full.failures.empty() && diff.order_defined && full.order_defined &&
                  pd >= 1.8 && pd <= 2.2 && pf >= 0.9;
  auto describe = [](std::ostringstream& os, const char* name, const ConvergenceReport& r) {
    os << name << " errors=";
    for (const auto& e : r.errors) os << e.total() << " ";
    os << "successive orders=";
    for (double p : r.orders) os << p << " ";
    // end-to-end order over the whole range, printed for context only
    const double span = std::log(static_cast<double>(r.resolutions.back()) / r.resolutions.front());
    os << "(end-to-end " << std::log(r.errors.front().total() / r.errors.back().total()) / span << ")";
  };
  std::ostringstream os;
  describe(os, "diffusion_only", diff);
  os << "; ";
  describe(os, "full_coupling", full);
  return {ok, os.str()};
}

Outcome determinism() {
  const Grid g = square(32);
  Scenario s = make_scenario("random_perturbation", g, 7);
  s.params.t_end = 0.02;
  const State init = make_initial(g, s.initial);
  auto csv = [&](int threads) {
    parallel::set_threads(threads);
    std::ostringstream os;
    write_series_csv(os, run(s.params, init).series);
    return os.str();
  };
  const int before = parallel::max_threads();
  const std::string a = csv(1), b = csv(1), c = csv(4), d = csv(3);
  parallel::set_threads(before);
  const bool ok = a == b && a == c && a == d;
  return {ok, "bytes=" + std::to_string(a.size()) + (ok ? " identical for threads 1,1,4,3" : " outputs differ")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria = {
      {1, {"mass conservation (64^2 bump, 1e4 steps)", mass_conservation}},
      {2, {"c quasi-mass bound", c_mass_bound}},
      {3, {"Lyapunov monotonicity (64^2 random perturbation)", lyapunov_monotone}},
      {4, {"exponential stabilization", stabilization}},
      {5, {"u-energy decay and energy identity", u_energy}},
      {6, {"grad c decay", grad_c_decay}},
      {7, {"Poincare constant", poincare}},
      {8, {"weak-residual consistency 32 -> 64", weak_residual_ratio}},
      {9, {"epsilon ladder Cauchy trend", ladder}},
      {10, {"MMS convergence orders", mms}},
      {11, {"determinism across thread counts", determinism}},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
  if (selected.empty())
    for (const auto& [k, v] : criteria) selected.insert(k);

  int failures = 0;
  for (int k : selected) {
    const auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::printf("criterion %d: unknown\n", k);
      ++failures;
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s: %s [%.1fs] %s\n", k, o.pass ? "PASS" : "FAIL", it->second.first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
