#include <doctest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

#include "ksns/error.hpp"
#include "ksns/fluid.hpp"
#include "ksns/reference.hpp"
#include "ksns/transport.hpp"
#include "support.hpp"

using namespace ksns;

namespace {

ChemotacticFlux chemo_for(const Grid& g, double cs) {
  return ChemotacticFlux(g, SensitivitySpec::make(SensitivityKind::scalar_saturating, cs, 1.0),
                         make_regularization(0.1, g));
}

VectorField swirl(const Grid& g, double amp) {
  return curl_of_stream(g, [&](const Point& x) {
    return amp * std::pow(std::sin(3.14159265358979 * x[0]) * std::sin(3.14159265358979 * x[1]), 2);
  });
}

}  // namespace

TEST_SUITE("reaction_transport") {

TEST_CASE("constant state is a fixed point of the n update") {
  const Grid g = test::grid2(16);
  const ScalarField n(g, 2.0), c(g, 0.7);
  const ScalarField next = step_n(n, c, VectorField(g), chemo_for(g, 0.5), 1e-4);
  CHECK(next.values == n.values);
}

TEST_CASE("n update conserves mass with a solenoidal velocity") {
  const Grid g = test::grid2(32);
  const ScalarField n = test::random_scalar(g, 1, 0.5, 2.0);
  const ScalarField c = test::random_scalar(g, 2, 0.0, 1.0);
  const VectorField u = swirl(g, 0.5);
  const double dt = 0.2 * g.spacing[0] * g.spacing[0] / 4;
  const ScalarField next = step_n(n, c, u, chemo_for(g, 0.4), dt);
  CHECK(std::abs(integrate(next) - integrate(n)) <= 1e-12 * integrate(n));
}

TEST_CASE("pure diffusion of a Gaussian matches a dense propagator of the same stencil") {
  const int N = 48;
  const std::vector<double> L{1.0, 0.25};
  const std::vector<int> cells{N, 4};
  const Grid g = make_grid(2, L, cells);
  const double h = g.spacing[0];
  const double dt = 0.2 * h * h;
  const int steps = 100;

  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    if (i > 0) lap(i, i - 1) += 1.0, lap(i, i) -= 1.0;
    if (i < N - 1) lap(i, i + 1) += 1.0, lap(i, i) -= 1.0;
  }
  lap /= h * h;
  Eigen::VectorXd n0(N);
  for (int i = 0; i < N; ++i) {
    const double x = (i + 0.5) * h;
    n0(i) = std::exp(-std::pow((x - 0.4) / 0.1, 2));
  }

  ScalarField n(g);
  for (std::size_t idx = 0; idx < n.size(); ++idx) n[idx] = n0(g.cell_coords(idx)[0]);
  const ScalarField zero(g, 0.0);
  const ChemotacticFlux chemo = chemo_for(g, 0.5);
  for (int k = 0; k < steps; ++k) n = step_n(n, zero, VectorField(g), chemo, dt);

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
  Eigen::MatrixXd euler = I;
  for (int k = 0; k < steps; ++k) euler = (I + dt * lap) * euler;
  const Eigen::VectorXd discrete = euler * n0;
  const Eigen::MatrixXd expo = (steps * dt * lap).exp();
  const Eigen::VectorXd exact = expo * n0;

  double err_discrete = 0.0, err_exact = 0.0;
  for (std::size_t idx = 0; idx < n.size(); ++idx) {
    const int i = g.cell_coords(idx)[0];
    err_discrete = std::max(err_discrete, std::abs(n[idx] - discrete(i)));
    err_exact = std::max(err_exact, std::abs(n[idx] - exact(i)));
  }
  CHECK(err_discrete <= 1e-8);
  // Explicit Euler against the semi-discrete heat kernel: first order in dt.
  CHECK(err_exact <= 0.5 * steps * dt * dt * (lap * lap * n0).cwiseAbs().maxCoeff());
}

TEST_CASE("c update: balance, pure decay, parallel equals reference") {
  const Grid g = test::grid2(16);
  const ScalarField k(g, 1.7);
  CHECK(step_c(k, k, VectorField(g), 1e-4).values == k.values);

  ScalarField c(g, 2.0);
  const ScalarField zero(g, 0.0);
  const double dt = 1e-4;
  for (int s = 0; s < 10; ++s) c = step_c(c, zero, VectorField(g), dt);
  for (double v : c.values) CHECK(v == doctest::Approx(2.0 * std::pow(1 - dt, 10)).epsilon(1e-14));

  const ScalarField n = test::random_scalar(g, 3, 0.0, 2.0);
  const ScalarField cr = test::random_scalar(g, 4, 0.0, 2.0);
  const VectorField u = swirl(g, 0.3);
  const double dt2 = 0.1 * g.spacing[0] * g.spacing[0];
  CHECK(test::max_diff(step_c(cr, n, u, dt2).values, reference::step_c(cr, n, u, dt2).values) <= 1e-13);
  const ChemotacticFlux chemo = chemo_for(g, 0.5);
  CHECK(test::max_diff(step_n(n, cr, u, chemo, dt2).values,
                       reference::step_n(n, cr, u, chemo.spec(), chemo.regularization(), dt2).values) <= 1e-13);
}

TEST_CASE("the updates reject invalid input") {
  const Grid g = test::grid2(16);
  ScalarField n(g, 1.0);
  const ScalarField c = test::random_scalar(g, 5);
  CHECK_THROWS_AS(step_n(n, c, VectorField(g), chemo_for(g, 0.5), 1.0), CflViolation);
  n[3] = -0.5;
  CHECK_THROWS(step_n(n, c, VectorField(g), chemo_for(g, 0.5), 1e-4));
}

TEST_CASE("dissipation integrals") {
  const Grid g = test::grid2(32);
  const Dissipation z = dissipation_integrals(ScalarField(g, 1.0), ScalarField(g, 2.0), VectorField(g), 1.0);
  CHECK(z.d_n == 0.0);
  CHECK(z.d_c == 0.0);
  CHECK(z.d_u == 0.0);

  const ScalarField n = test::random_scalar(g, 8, 0.5, 1.5);
  const Dissipation d = dissipation_integrals(n, n, VectorField(g), 1.0);
  CHECK(d.d_n == doctest::Approx(norm2_sq(gradient_cc(n))).epsilon(1e-14));

  // c = x: every interior x-face carries a unit gradient, the two wall faces
  // carry zero flux, so the discrete integral is (N-1)/N and tends to 1.
  for (int N : {16, 64}) {
    const Grid gn = test::grid2(N);
    const ScalarField cx = test::sample(gn, [](const Point& x) { return x[0]; });
    const double dc = dissipation_integrals(ScalarField(gn, 1.0), cx, VectorField(gn), 1.0).d_c;
    CHECK(dc == doctest::Approx(static_cast<double>(N - 1) / N).epsilon(1e-12));
  }
}

}
