#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ksns/diagnostics.hpp"
#include "ksns/error.hpp"
#include "ksns/poisson.hpp"
#include "ksns/scenarios.hpp"
#include "ksns/stepper.hpp"
#include "ksns/transport.hpp"
#include "ksns/weak_form.hpp"
#include "support.hpp"

using namespace ksns;
using std::numbers::pi;

namespace {

State steady(const Grid& g, double n0) {
  State s(g);
  s.n = ScalarField(g, n0);
  s.c = ScalarField(g, n0);
  return s;
}

SimParams bump_params(const Grid& g, double t_end) {
  SimParams p;
  p.grid = g;
  p.sensitivity = SensitivitySpec::make(SensitivityKind::scalar_saturating, 0.3, 1.0);
  p.t_end = t_end;
  p.snapshot_every = 1;
  return p;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("Poincare constant of boxes") {
  const double unit = poincare_constant(test::grid2(64));
  CHECK(unit == doctest::Approx(1 / (pi * pi)).epsilon(0.01));
  const double h = 1.0 / 64;
  CHECK(unit == doctest::Approx(1.0 / neumann_eigenvalue_1d(1, 64, h)).epsilon(1e-7));

  const double wide = poincare_constant(test::grid2(64, 2.0, 1.0));
  CHECK(wide == doctest::Approx(4 / (pi * pi)).epsilon(0.01));

  double prev = 1e300;
  std::vector<double> est;
  for (int n : {8, 16, 32, 64}) {
    const double cn = poincare_constant(test::grid2(n));
    CHECK(cn < prev);
    CHECK(cn > 1 / (pi * pi));
    est.push_back(cn);
    prev = cn;
  }
  // the error against the continuum value shrinks like h^2
  for (std::size_t i = 0; i + 1 < est.size(); ++i) {
    const double r = (est[i] - 1 / (pi * pi)) / (est[i + 1] - 1 / (pi * pi));
    CHECK(r == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("Lyapunov configuration") {
  const double cn = 1 / (pi * pi);
  const LyapunovFeasibility f = make_lyapunov_config(0.5, cn);
  REQUIRE(f.feasible());
  const LyapunovConfig& c = *f.config;
  CHECK(c.B == doctest::Approx((pi * pi / 2 + 8) / 2).epsilon(1e-12));
  CHECK(c.B == doctest::Approx(6.4674).epsilon(1e-4));
  CHECK(c.a1 == doctest::Approx(c.B / (2 * pi * pi) - 0.25));
  CHECK(c.a2 == doctest::Approx(1 - c.B / 8));
  CHECK(c.a1 > 0);
  CHECK(c.a2 > 0);
  CHECK(c.kappa_pred == doctest::Approx(std::min(2 * c.a1 / c.B, 2 * cn * c.a2)));

  CHECK_FALSE(make_lyapunov_config(2 * std::sqrt(cn), cn).feasible());
  CHECK_FALSE(make_lyapunov_config(3.0, cn).feasible());

  const LyapunovFeasibility tiny = make_lyapunov_config(1e-6, cn);
  REQUIRE(tiny.feasible());
  CHECK(tiny.config->B == doctest::Approx((0.5 / cn + 10 / cn) / 2));
  CHECK(tiny.config->a2 == doctest::Approx(1.0).epsilon(1e-6));

  for (double cs : {0.05, 0.2, 0.4, 0.6}) {
    const auto cfg = make_lyapunov_config(cs, cn);
    REQUIRE(cfg.feasible());
    CHECK(cfg.config->a1 > 0);
    CHECK(cfg.config->a2 > 0);
    CHECK(cfg.config->kappa_pred > 0);
  }
}

TEST_CASE("Lyapunov functional values") {
  const Grid g = test::grid2(16, 1.0, 2.0);
  const LyapunovConfig cfg = *make_lyapunov_config(0.3, poincare_constant(g)).config;
  CHECK(lyapunov(steady(g, 1.2), 1.2, cfg) == 0.0);

  State s = steady(g, 1.2);
  s.c = ScalarField(g, 1.5);
  CHECK(lyapunov(s, 1.2, cfg) == doctest::Approx(0.5 * 0.09 * 2.0).epsilon(1e-13));

  s.n = test::random_scalar(g, 1, 0.5, 2.0);
  s.c = test::random_scalar(g, 2, 0.5, 2.0);
  double dn = 0.0, dc = 0.0;
  for (std::size_t i = s.n.size(); i-- > 0;) {
    dn += (s.n[i] - 1.2) * (s.n[i] - 1.2);
    dc += (s.c[i] - 1.2) * (s.c[i] - 1.2);
  }
  const double expect = (0.5 * cfg.B * dn + 0.5 * dc) * g.cell_volume;
  CHECK(lyapunov(s, 1.2, cfg) == doctest::Approx(expect).epsilon(1e-12));

  // zero exactly when the (n, c) distance to the steady state vanishes
  State only_u = steady(g, 1.2);
  only_u.u = test::random_vector(g, 3);
  CHECK(lyapunov(only_u, 1.2, cfg) == 0.0);
  const SteadyDistance d = steady_state_distance(only_u, 1.2);
  CHECK(d.n_inf == 0.0);
  CHECK(d.c_inf == 0.0);
  CHECK(d.u_inf > 0.0);
}

TEST_CASE("Lyapunov budget") {
  const Grid g = test::grid2(16);
  const LyapunovConfig cfg = *make_lyapunov_config(0.3, poincare_constant(g)).config;
  const LyapunovBudget z = lyapunov_budget(steady(g, 1.0), 1.0, cfg);
  CHECK(z.value == 0.0);
  CHECK(z.bound_rhs == 0.0);

  State s = steady(g, 1.0);
  s.c = test::sample(g, [](const Point& x) { return 1.0 + 0.1 * std::cos(pi * x[0]); });
  const LyapunovBudget b = lyapunov_budget(s, 1.0, cfg);
  CHECK(b.bound_rhs < 0.0);
  CHECK(b.bound_rhs == doctest::Approx(-cfg.a2 * grad_c_norms(s.c).l2_sq).epsilon(1e-13));
}

TEST_CASE("exponential fits") {
  std::vector<double> t, v, flat, scaled_v;
  for (int i = 0; i <= 40; ++i) {
    t.push_back(0.05 * i);
    v.push_back(std::exp(-2.0 * t.back()));
    flat.push_back(3.0);
    scaled_v.push_back(17.0 * v.back());
  }
  const DecayFit f = fit_decay_rate(t, v, {});
  CHECK(f.rate == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(fit_decay_rate(t, flat, {}).rate) <= 1e-14);
  CHECK(fit_decay_rate(t, scaled_v, {}).rate == doctest::Approx(f.rate).epsilon(1e-12));
  CHECK_THROWS_AS(fit_decay_rate(t, v, {1.9, 2.0}), ValidationError);

  // ||c||^2 under c' = -c, integrated with the scheme's own update
  const Grid g = test::grid2(8);
  ScalarField c(g, 1.0);
  const ScalarField zero(g, 0.0);
  std::vector<double> tc, nc;
  const double dt = 1e-3;
  for (int k = 0; k <= 500; ++k) {
    if (k % 10 == 0) {
      tc.push_back(k * dt);
      nc.push_back(inner(c, c));
    }
    c = step_c(c, zero, VectorField(g), dt);
  }
  CHECK(fit_decay_rate(tc, nc, {}).rate == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("grad c norms") {
  const Grid g = test::grid2(64);
  const GradCNorms z = grad_c_norms(ScalarField(g, 4.0));
  CHECK(z.l2_sq == 0.0);
  CHECK(z.l4_4 == 0.0);

  // c = x: interior cells see a unit gradient on both x-faces; the two wall
  // columns see one zero-flux face, so |grad c|^2 = 1/2 there.
  const ScalarField cx = test::sample(g, [](const Point& x) { return x[0]; });
  const GradCNorms n = grad_c_norms(cx);
  CHECK(n.l2_sq == doctest::Approx(63.0 / 64).epsilon(1e-12));
  CHECK(n.l4_4 == doctest::Approx(62.5 / 64).epsilon(1e-12));
  CHECK(n.l2_sq == doctest::Approx(1.0).epsilon(0.02));
  CHECK(n.l4_4 == doctest::Approx(1.0).epsilon(0.03));

  for (unsigned seed = 1; seed < 6; ++seed) {
    const GradCNorms r = grad_c_norms(test::random_scalar(g, seed));
    CHECK(r.l4_4 <= r.max_sq * r.l2_sq * (1 + 1e-14));
  }
}

TEST_CASE("steady state distance") {
  const Grid g = test::grid2(16);
  const SteadyDistance z = steady_state_distance(steady(g, 2.0), 2.0);
  CHECK(z.n_inf == 0.0);
  CHECK(z.c_inf == 0.0);
  CHECK(z.u_inf == 0.0);

  State s = steady(g, 2.0);
  s.n[g.cell_index(5, 7, 0)] += 0.125;
  CHECK(steady_state_distance(s, 2.0).n_inf == doctest::Approx(0.125));
}

TEST_CASE("weak residuals: steady trajectory and spatially constant test function") {
  const Grid g = test::grid2(16);
  const SimParams p = bump_params(g, 0.01);
  const Trajectory still = run(p, steady(g, 1.0));
  REQUIRE(still.snapshots.size() >= 3);
  const WeakResidual r0 = weak_residual(still, p);
  CHECK(r0.r_n <= 1e-10);
  CHECK(r0.r_c <= 1e-10);
  CHECK(r0.r_u <= 1e-10);

  const Trajectory bump = run(p, make_initial(g, {InitialKind::bump_n, 1.0, 1}));
  REQUIRE(bump.ok());
  const WeakResidual rc = weak_residual(bump, p, {true});
  CHECK(rc.r_n <= 1e-10);
  const WeakResidual rg = weak_residual(bump, p);
  CHECK(rg.r_n > 1e-12);
}

TEST_CASE("transient end") {
  DiagnosticsSeries s;
  for (int i = 0; i < 20; ++i) {
    DiagRow r;
    r.t = 0.1 * i;
    r.lyapunov = std::exp(-r.t);
    s.rows.push_back(r);
  }
  CHECK(transient_end(s) == doctest::Approx(0.7));
}

}
