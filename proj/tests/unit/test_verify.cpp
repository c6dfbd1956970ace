#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "ksns/diagnostics.hpp"
#include "ksns/mms.hpp"
#include "ksns/verify.hpp"
#include "support.hpp"

using namespace ksns;

namespace {

// Fourth-order central difference.
double deriv(const std::function<double(double)>& f, double x, double h = 1e-3) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

double partial(const std::function<double(const Point&)>& f, const Point& x, int d) {
  return deriv([&](double s) {
    Point y = x;
    y[d] = s;
    return f(y);
  }, x[d]);
}

struct Residuals {
  double n, c;
  Point u;
};

// The strong-form residual of the regularised system evaluated numerically
// from the manufactured fields (Yosida off, linear potential along the last axis).
Residuals numeric_forcing(const MmsCase& mc, const Grid& g, const Point& x, double t) {
  const int dim = mc.dim;
  const RegularizationParams reg = make_regularization(mc.eps, g);
  const Tensor M = orientation(mc.sensitivity, dim);
  auto n = [&](const Point& y) { return mc.n_exact(y, t); };
  auto c = [&](const Point& y) { return mc.c_exact(y, t); };

  Residuals r{};
  const double nt = deriv([&](double s) { return mc.n_exact(x, s); }, t);
  const double ct = deriv([&](double s) { return mc.c_exact(x, s); }, t);
  double lap_n = 0.0, lap_c = 0.0, adv_n = 0.0, adv_c = 0.0, div_j = 0.0;
  for (int d = 0; d < dim; ++d) {
    const double ud = mc.u_exact(d, x, t);
    adv_n += ud * partial(n, x, d);
    adv_c += ud * partial(c, x, d);
    lap_n += partial([&](const Point& y) { return partial(n, y, d); }, x, d);
    lap_c += partial([&](const Point& y) { return partial(c, y, d); }, x, d);
    if (mc.sensitivity.cs > 0.0) {
      auto J = [&](const Point& y) {
        const double ny = n(y);
        double s = 0.0;
        for (int j = 0; j < dim; ++j) s += M(d, j) * partial(c, y, j);
        return ny * f_eps(ny, mc.eps) * mc.sensitivity.magnitude(ny) * cutoff_rho(y, g, reg) * s;
      };
      div_j += partial(J, x, d);
    }
  }
  r.n = nt + adv_n - lap_n + div_j;
  r.c = ct + adv_c - lap_c + c(x) - n(x);
  for (int d = 0; d < dim; ++d) {
    auto ud = [&](const Point& y) { return mc.u_exact(d, y, t); };
    double conv = 0.0, lap = 0.0;
    for (int j = 0; j < dim; ++j) {
      conv += mc.u_exact(j, x, t) * partial(ud, x, j);
      lap += partial([&](const Point& y) { return partial(ud, y, j); }, x, j);
    }
    const double grad_phi = mc.phi.kind == PhiKind::linear && d == dim - 1 ? mc.phi.strength : 0.0;
    r.u[d] = deriv([&](double s) { return mc.u_exact(d, x, s); }, t) + mc.kappa * conv - lap - n(x) * grad_phi;
  }
  return r;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("steady-state scenario passes with tiny deviations") {
  const Grid g = test::grid2(16);
  const VerdictReport r = run_scenario(make_scenario("steady_state", g));
  CHECK(r.passed());
  CHECK_FALSE(r.run_failure.has_value());
  const AssertionResult* dev = r.find("steady_deviation");
  REQUIRE(dev != nullptr);
  CHECK(dev->verdict == Verdict::pass);
  CHECK(dev->measured <= 1e-12);
}

TEST_CASE("infeasible sensitivity skips the Lyapunov assertions but completes") {
  const Grid g = test::grid2(16);
  Scenario s = make_scenario("infeasible_cs", g);
  s.params.t_end = 0.02;
  const VerdictReport r = run_scenario(s);
  CHECK(r.passed());
  CHECK(r.find("lyapunov_feasible")->verdict == Verdict::skipped);
  CHECK(r.find("run_completes")->verdict == Verdict::pass);
}

TEST_CASE("scenario reports are reproducible") {
  const Grid g = test::grid2(16);
  Scenario s = make_scenario("random_perturbation", g, 3);
  s.params.t_end = 0.01;
  s.assertions.resize(3);
  const VerdictReport a = run_scenario(s);
  const VerdictReport b = run_scenario(s);
  CHECK(format_report(a) == format_report(b));
}

TEST_CASE("Cauchy trend rule") {
  int inv = -1;
  CHECK(cauchy_trend({}, &inv));
  CHECK(inv == 0);
  CHECK(cauchy_trend({3.0, 2.0, 1.0}));
  CHECK(cauchy_trend({3.0, 3.2, 1.0}, &inv));
  CHECK(inv == 1);
  CHECK_FALSE(cauchy_trend({3.0, 3.5, 1.0}));
  CHECK_FALSE(cauchy_trend({3.0, 3.1, 3.15}));
}

TEST_CASE("epsilon ladder: single rung and inactive regularisation") {
  const Grid g = test::grid2(16);
  Scenario base = make_scenario("bump_n", g);
  base.params.t_end = 0.005;
  const LadderReport one = epsilon_ladder(base.params, base.initial, {0.5});
  CHECK(one.cauchy);
  CHECK(one.distances.empty());
  CHECK(one.failures.empty());

  SimParams linear = base.params;
  linear.sensitivity.cs = 0.0;
  linear.kappa = 0.0;
  const LadderReport flat = epsilon_ladder(linear, base.initial, {0.4, 0.2, 0.1});
  REQUIRE(flat.distances.size() == 2);
  for (double d : flat.distances) CHECK(d <= 1e-12);
}

TEST_CASE("manufactured forcing agrees with numerical differentiation") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (MmsKind kind : {MmsKind::diffusion_only, MmsKind::full_coupling, MmsKind::exact_steady}) {
    for (int dim : {2, 3}) {
      const MmsCase mc = make_mms_case(kind, dim);
      const Grid g = dim == 2 ? test::grid2(16) : test::grid3(8);
      const Forcing f = mms_forcing(mc, g);
      const double delta = make_regularization(mc.eps, g).delta;
      int checked = 0;
      while (checked < 40) {
        Point x{0.5, 0.5, 0.5};
        for (int d = 0; d < dim; ++d) x[d] = 0.02 + 0.96 * u01(rng);
        // keep the stencil away from the kinks of the wall-distance cutoff
        bool near_kink = false;
        int in_layer = 0;
        for (int d = 0; d < dim; ++d) {
          const double w = std::min(x[d], 1.0 - x[d]);
          near_kink |= std::abs(w - delta) < 0.01;
          in_layer += w < delta + 0.01;
        }
        if (near_kink || in_layer > 1) continue;
        const double t = 0.05 * u01(rng);
        const Residuals r = numeric_forcing(mc, g, x, t);
        CHECK(f.n(x, t) == doctest::Approx(r.n).epsilon(1e-6).scale(1.0));
        CHECK(f.c(x, t) == doctest::Approx(r.c).epsilon(1e-6).scale(1.0));
        for (int d = 0; d < dim; ++d) CHECK(f.u(d, x, t) == doctest::Approx(r.u[d]).epsilon(1e-6).scale(1.0));
        ++checked;
      }
    }
  }
}

TEST_CASE("manufactured velocity is solenoidal") {
  for (int dim : {2, 3}) {
    const MmsCase mc = make_mms_case(MmsKind::full_coupling, dim);
    for (const Point& x : {Point{0.3, 0.6, 0.2}, Point{0.71, 0.14, 0.5}}) {
      double div = 0.0;
      for (int d = 0; d < dim; ++d) div += partial([&](const Point& y) { return mc.u_exact(d, y, 0.02); }, x, d);
      CHECK(std::abs(div) <= 1e-8);
    }
  }
}

TEST_CASE("exact-steady MMS case: machine-level errors and undefined order") {
  const ConvergenceReport r = mms_convergence(make_mms_case(MmsKind::exact_steady, 2), {8, 16, 32});
  CHECK(r.failures.empty());
  for (const MmsErrors& e : r.errors) CHECK(e.total() <= 1e-12);
  CHECK_FALSE(r.order_defined);
  CHECK_THROWS(mms_convergence(make_mms_case(MmsKind::exact_steady, 2), {8, 16}));
}

}
