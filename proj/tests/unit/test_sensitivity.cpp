#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "ksns/reference.hpp"
#include "ksns/sensitivity.hpp"
#include "support.hpp"

using namespace ksns;
using std::numbers::pi;

namespace {

Eigen::MatrixXd to_eigen(const Tensor& t) {
  Eigen::MatrixXd m(t.dim, t.dim);
  for (int r = 0; r < t.dim; ++r)
    for (int c = 0; c < t.dim; ++c) m(r, c) = t(r, c);
  return m;
}

double spectral_norm(const Tensor& t) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(to_eigen(t)).singularValues()(0);
}

}  // namespace

TEST_SUITE("sensitivity") {

TEST_CASE("f_eps values") {
  CHECK(f_eps(0.0, 0.3) == 1.0);
  CHECK(f_eps(0.0, 5.0) == 1.0);
  CHECK(f_eps(7.0, 0.0) == 1.0);
  CHECK(f_eps(1.0, 1.0) == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("cutoff is zero on walls, one inside, and widens as eps grows") {
  const Grid g = test::grid2(32);
  const RegularizationParams reg = make_regularization(0.1, g);
  CHECK(reg.delta == doctest::Approx(0.1));
  CHECK(cutoff_rho({0.0, 0.5, 0.5}, g, reg) == 0.0);
  CHECK(cutoff_rho({0.3, 1.0, 0.5}, g, reg) == 0.0);
  CHECK(cutoff_rho({0.5, 0.5, 0.5}, g, reg) == 1.0);

  const Point mid{0.05, 0.5, 0.5};
  const double r = cutoff_rho(mid, g, reg);
  CHECK(r > 0.0);
  CHECK(r < 1.0);
  const RegularizationParams half = make_regularization(0.05, g);
  for (double x : {0.01, 0.03, 0.05, 0.07, 0.09}) {
    const Point p{x, 0.5, 0.5};
    CHECK(cutoff_rho(p, g, half) >= cutoff_rho(p, g, reg));
  }
  CHECK(make_regularization(0.9, g).delta == doctest::Approx(0.25));
}

TEST_CASE("eval_S_eps special cases") {
  const Grid g = test::grid2(16);
  const RegularizationParams reg = make_regularization(0.1, g);
  const Point centre{0.5, 0.5, 0.5};

  const auto scalar = SensitivitySpec::make(SensitivityKind::scalar_saturating, 0.7, 1.0);
  const Tensor s0 = eval_S_eps(scalar, reg, g, centre, 0.0, 1.0);
  CHECK(s0(0, 0) == doctest::Approx(0.7));
  CHECK(s0(1, 1) == doctest::Approx(0.7));
  CHECK(s0(0, 1) == 0.0);
  CHECK(s0(1, 0) == 0.0);

  const Tensor wall = eval_S_eps(scalar, reg, g, {0.0, 0.4, 0.5}, 2.0, 1.0);
  for (double v : wall.m) CHECK(v == 0.0);

  const auto rot = SensitivitySpec::make(SensitivityKind::rotational, 0.7, 1.0, pi / 2);
  const Tensor s1 = eval_S_eps(rot, reg, g, centre, 1.0, 0.0);
  CHECK(s1(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(s1(0, 1) == doctest::Approx(-0.35));
  CHECK(s1(1, 0) == doctest::Approx(0.35));
  CHECK(spectral_norm(s1) == doctest::Approx(0.35).epsilon(1e-14));
}

TEST_CASE("sampled bound certificate in the spectral norm") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> un(0.0, 1000.0), ux(0.0, 1.0), uth(0.0, 2 * pi);
  for (int dim : {2, 3}) {
    const Grid g = dim == 2 ? test::grid2(16) : test::grid3(8);
    const RegularizationParams reg = make_regularization(0.1, g);
    for (int trial = 0; trial < 2000; ++trial) {
      const SensitivityKind kind = trial % 3 == 0 ? SensitivityKind::scalar_saturating
                                   : trial % 3 == 1 ? SensitivityKind::rotational
                                                    : SensitivityKind::user_table;
      const double alpha = 1.0 + (trial % 4) * 0.5;
      std::vector<std::pair<double, double>> table;
      if (kind == SensitivityKind::user_table) table = {{0.0, 2.0}, {1.0, 0.5}, {10.0, 0.3}, {1000.0, 0.0}};
      const auto spec = SensitivitySpec::make(kind, 0.9, alpha, uth(rng), table);
      const Point x{ux(rng), ux(rng), dim == 3 ? ux(rng) : 0.5};
      const double n = un(rng);
      const Tensor S = eval_S_eps(spec, reg, g, x, n, un(rng));
      const double norm = spectral_norm(S);
      CHECK(norm <= spec.bound(n) + 1e-12);
      CHECK(n * f_eps(n, reg.eps) * norm <= 0.9 + 1e-12);
    }
  }
}

TEST_CASE("chemotactic flux: zero cases, linearity in c, and hand assembly") {
  const Grid g = test::grid2(24);
  const auto spec = SensitivitySpec::make(SensitivityKind::scalar_saturating, 0.6, 1.0);
  const RegularizationParams reg = make_regularization(0.1, g);
  const ChemotacticFlux chemo(g, spec, reg);

  const ScalarField n = test::sample(g, [](const Point& x) { return 1.0 + std::sin(3 * x[0]) * 0.5 + x[1]; });
  const ScalarField c = test::sample(g, [](const Point& x) { return x[0] * x[0] + 0.2; });

  const VectorField zc = chemo(n, ScalarField(g, 2.0));
  const VectorField zn = chemo(ScalarField(g, 0.0), c);
  for (int d = 0; d < 2; ++d) {
    for (double v : zc.comp[d]) CHECK(v == 0.0);
    for (double v : zn.comp[d]) CHECK(v == 0.0);
  }

  ScalarField c2 = c;
  for (double& v : c2.values) v *= 2.0;
  const VectorField J = chemo(n, c);
  const VectorField J2 = chemo(n, c2);
  for (std::size_t i = 0; i < J.comp[0].size(); ++i) CHECK(J2.comp[0][i] == doctest::Approx(2.0 * J.comp[0][i]));

  // c depends on x only and increases, so the drift points in +x and the
  // upwind cell of each x-face is its left neighbour.
  for (std::size_t idx = 0; idx < J.comp[0].size(); ++idx) {
    const Index3 f = g.face_coords(0, idx);
    double expect = 0.0;
    if (!g.is_boundary_face(0, f)) {
      const double nl = n[g.cell_index(f[0] - 1, f[1], f[2])];
      const double dc = (c[g.cell_index(f[0], f[1], f[2])] - c[g.cell_index(f[0] - 1, f[1], f[2])]) / g.spacing[0];
      const double rho = cutoff_rho(g.face_center(0, f), g, reg);
      expect = rho * nl * 0.6 / (1.0 + nl) * f_eps(nl, reg.eps) * dc;
    }
    CHECK(J.comp[0][idx] == doctest::Approx(expect).epsilon(1e-13));
  }
  for (double v : J.comp[1]) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("parallel flux matches the serial reference for rotational sensitivity") {
  for (const Grid& g : {test::grid2(20), test::grid3(10)}) {
    const auto spec = SensitivitySpec::make(SensitivityKind::rotational, 0.4, 1.5, 1.1);
    const RegularizationParams reg = make_regularization(0.15, g);
    const ScalarField n = test::random_scalar(g, 3, 0.0, 3.0);
    const ScalarField c = test::random_scalar(g, 4, 0.0, 2.0);
    const VectorField a = ChemotacticFlux(g, spec, reg)(n, c);
    const VectorField b = reference::chemotactic_flux(n, c, spec, reg);
    CHECK(test::max_diff(a, b) <= 1e-13);
  }
}

}
