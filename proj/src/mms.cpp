#include "ksns/mms.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ksns/error.hpp"
#include "ksns/stepper.hpp"

namespace ksns {

std::string to_string(MmsKind kind) {
  switch (kind) {
    case MmsKind::diffusion_only: return "diffusion_only";
    case MmsKind::full_coupling: return "full_coupling";
    case MmsKind::exact_steady: return "exact_steady";
  }
  return "?";
}

MmsKind mms_kind_from_string(const std::string& s) {
  if (s == "diffusion_only") return MmsKind::diffusion_only;
  if (s == "full_coupling") return MmsKind::full_coupling;
  if (s == "exact_steady") return MmsKind::exact_steady;
  throw ValidationError("unknown MMS case '" + s + "'");
}

namespace {

constexpr double pi = std::numbers::pi;

// prod_d cos(pi k_d x_d) with its gradient and Hessian.
struct CosProduct {
  double value = 0.0;
  Point grad{};
  std::array<std::array<double, 3>, 3> hess{};
};

CosProduct cos_product(int dim, const Index3& k, const Point& x) {
  double cs[3], sn[3], w[3];
  for (int d = 0; d < dim; ++d) {
    w[d] = pi * k[d];
    cs[d] = std::cos(w[d] * x[d]);
    sn[d] = std::sin(w[d] * x[d]);
  }
  auto prod_except = [&](int i, int j) {
    double v = 1.0;
    for (int d = 0; d < dim; ++d)
      if (d != i && d != j) v *= cs[d];
    return v;
  };
  CosProduct out;
  out.value = prod_except(-1, -1);
  for (int i = 0; i < dim; ++i) {
    out.grad[i] = -w[i] * sn[i] * prod_except(i, -1);
    for (int j = 0; j < dim; ++j)
      out.hess[i][j] = i == j ? -w[i] * w[i] * out.value : w[i] * w[j] * sn[i] * sn[j] * prod_except(i, j);
  }
  return out;
}

// S(s) = sin^2(pi s) and its first three derivatives.
struct Sin2 {
  double v, d1, d2, d3;
};

Sin2 sin2(double s) {
  const double a = std::sin(pi * s), c2 = std::cos(2.0 * pi * s), s2 = std::sin(2.0 * pi * s);
  return {a * a, pi * s2, 2.0 * pi * pi * c2, -4.0 * pi * pi * pi * s2};
}

// Spatial profile of u* = curl(psi), psi = S(x) S(y) [S(z)], with first
// derivatives and Laplacian of each component.
struct Swirl {
  Point u{};
  std::array<Point, 3> du{};  // du[i][j] = d u_i / d x_j
  Point lap{};
};

Swirl swirl(int dim, const Point& x) {
  const Sin2 X = sin2(x[0]), Y = sin2(x[1]);
  const Sin2 Z = dim == 3 ? sin2(x[2]) : Sin2{1.0, 0.0, 0.0, 0.0};
  Swirl s;
  s.u[0] = X.v * Y.d1 * Z.v;
  s.u[1] = -X.d1 * Y.v * Z.v;
  s.du[0] = {X.d1 * Y.d1 * Z.v, X.v * Y.d2 * Z.v, X.v * Y.d1 * Z.d1};
  s.du[1] = {-X.d2 * Y.v * Z.v, -X.d1 * Y.d1 * Z.v, -X.d1 * Y.v * Z.d1};
  s.lap[0] = X.d2 * Y.d1 * Z.v + X.v * Y.d3 * Z.v + X.v * Y.d1 * Z.d2;
  s.lap[1] = -X.d3 * Y.v * Z.v - X.d1 * Y.d2 * Z.v - X.d1 * Y.v * Z.d2;
  return s;
}

const Index3 kN{1, 1, 1};
const Index3 kC{2, 1, 1};

Point grad_phi(const PhiSpec& phi, int dim, const Point& x) {
  Point g{};
  if (phi.kind == PhiKind::linear) {
    g[dim - 1] = phi.strength;
  } else if (phi.kind == PhiKind::cosine) {
    const CosProduct p = cos_product(dim, {1, 1, 1}, x);
    for (int d = 0; d < dim; ++d) g[d] = phi.strength * p.grad[d];
  }
  return g;
}

}  // namespace

double MmsCase::n_exact(const Point& x, double t) const {
  return 1.0 + a * std::exp(-t) * cos_product(dim, kN, x).value;
}

double MmsCase::c_exact(const Point& x, double t) const {
  return 1.0 + b * std::exp(-t) * cos_product(dim, kC, x).value;
}

double MmsCase::u_exact(int d, const Point& x, double t) const {
  if (U == 0.0) return 0.0;
  return U * std::exp(-t) * swirl(dim, x).u[d];
}

double MmsErrors::total() const { return std::sqrt(n * n + c * c + u * u); }

MmsCase make_mms_case(MmsKind kind, int dim) {
  if (dim != 2 && dim != 3) throw ValidationError("MMS: dim must be 2 or 3");
  MmsCase mc;
  mc.kind = kind;
  mc.name = to_string(kind);
  mc.dim = dim;
  switch (kind) {
    case MmsKind::exact_steady:
      mc.sensitivity = SensitivitySpec::make(SensitivityKind::scalar_saturating, 0.5, 1.0);
      break;
    case MmsKind::diffusion_only:
      mc.a = 0.3;
      mc.b = 0.3;
      mc.sensitivity = SensitivitySpec::make(SensitivityKind::scalar_saturating, 0.0, 1.0);
      mc.kappa = 0.0;
      mc.phi = {PhiKind::none, 0.0};
      break;
    case MmsKind::full_coupling:
      mc.a = 0.3;
      mc.b = 0.3;
      mc.U = 0.2;
      mc.sensitivity = SensitivitySpec::make(SensitivityKind::rotational, 0.5, 1.0, pi / 4.0);
      mc.kappa = 1.0;
      mc.phi = {PhiKind::linear, 1.0};
      break;
  }
  return mc;
}

Forcing mms_forcing(const MmsCase& mc, const Grid& grid) {
  const RegularizationParams reg = make_regularization(mc.eps, grid);
  const Tensor M = orientation(mc.sensitivity, mc.dim);
  const int dim = mc.dim;
  Forcing f;

  f.n = [mc, reg, M, grid, dim](const Point& x, double t) {
    const double e = std::exp(-t);
    const CosProduct pn = cos_product(dim, kN, x), pc = cos_product(dim, kC, x);
    const double n = 1.0 + mc.a * e * pn.value;
    Point gn{}, gc{}, u{};
    for (int d = 0; d < dim; ++d) {
      gn[d] = mc.a * e * pn.grad[d];
      gc[d] = mc.b * e * pc.grad[d];
      u[d] = mc.u_exact(d, x, t);
    }
    double lap_n = 0.0, adv = 0.0;
    for (int d = 0; d < dim; ++d) {
      lap_n += mc.a * e * pn.hess[d][d];
      adv += u[d] * gn[d];
    }
    double div_j = 0.0;
    if (mc.sensitivity.cs > 0.0) {
      // J = h(n) rho(x) M grad c with h(n) = n F_eps(n) s(n).
      const double F = f_eps(n, mc.eps);
      const double dF = -3.0 * mc.eps * std::pow(1.0 + mc.eps * n, -4.0);
      const double s = mc.sensitivity.magnitude(n);
      const double ds = -mc.sensitivity.alpha * mc.sensitivity.cs * std::pow(1.0 + n, -mc.sensitivity.alpha - 1.0);
      const double h = n * F * s;
      const double dh = F * s + n * dF * s + n * F * ds;
      const double rho = cutoff_rho(x, grid, reg);
      const Point grho = cutoff_rho_gradient(x, grid, reg);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          const double hess_c = mc.b * e * pc.hess[i][j];
          div_j += M(i, j) * ((dh * gn[i] * rho + h * grho[i]) * gc[j] + h * rho * hess_c);
        }
    }
    const double n_t = -mc.a * e * pn.value;
    return n_t + adv - lap_n + div_j;
  };

  f.c = [mc, dim](const Point& x, double t) {
    const double e = std::exp(-t);
    const CosProduct pn = cos_product(dim, kN, x), pc = cos_product(dim, kC, x);
    const double n = 1.0 + mc.a * e * pn.value;
    const double c = 1.0 + mc.b * e * pc.value;
    double lap_c = 0.0, adv = 0.0;
    for (int d = 0; d < dim; ++d) {
      lap_c += mc.b * e * pc.hess[d][d];
      adv += mc.u_exact(d, x, t) * mc.b * e * pc.grad[d];
    }
    const double c_t = -mc.b * e * pc.value;
    return c_t + adv - lap_c + c - n;
  };

  f.u = [mc, dim](int d, const Point& x, double t) {
    const double e = std::exp(-t);
    const double n = mc.n_exact(x, t);
    const Point gphi = grad_phi(mc.phi, dim, x);
    double out = -n * gphi[d];
    if (mc.U != 0.0) {
      const Swirl s = swirl(dim, x);
      const double g = mc.U * e;
      double conv = 0.0;
      for (int j = 0; j < dim; ++j) conv += s.u[j] * s.du[d][j];
      out += -g * s.u[d] + mc.kappa * g * g * conv - g * s.lap[d];
    }
    return out;
  };
  return f;
}

SimParams mms_params(const MmsCase& mc, const Grid& grid) {
  if (grid.dim != mc.dim) throw ValidationError("MMS: grid dimension differs from the case");
  SimParams p;
  p.grid = grid;
  p.sensitivity = mc.sensitivity;
  p.eps = mc.eps;
  p.yosida_eps = 0.0;
  p.kappa = mc.kappa;
  p.phi = mc.phi;
  p.cfl = mc.cfl;
  const double h = grid.min_spacing();
  const double dt_max = mc.cfl * h * h / (2.0 * grid.dim);
  const double steps = std::ceil(mc.t_end / dt_max);
  p.fixed_dt = mc.t_end / steps;
  p.t_end = mc.t_end;
  p.diag_every = 1 << 30;
  p.forcing = mms_forcing(mc, grid);
  return p;
}

State mms_initial(const MmsCase& mc, const Grid& grid) {
  State s(grid);
  for (std::size_t idx = 0; idx < s.n.size(); ++idx) {
    const Point x = grid.cell_center(grid.cell_coords(idx));
    s.n[idx] = mc.n_exact(x, 0.0);
    s.c[idx] = mc.c_exact(x, 0.0);
  }
  for (int d = 0; d < grid.dim; ++d)
    for (std::size_t idx = 0; idx < s.u.comp[d].size(); ++idx) {
      const Index3 f = grid.face_coords(d, idx);
      if (!grid.is_boundary_face(d, f)) s.u.comp[d][idx] = mc.u_exact(d, grid.face_center(d, f), 0.0);
    }
  return s;
}

MmsErrors mms_errors(const MmsCase& mc, const State& s) {
  const Grid& g = s.n.grid;
  MmsErrors e;
  for (std::size_t idx = 0; idx < s.n.size(); ++idx) {
    const Point x = g.cell_center(g.cell_coords(idx));
    const double dn = s.n[idx] - mc.n_exact(x, s.t);
    const double dc = s.c[idx] - mc.c_exact(x, s.t);
    e.n += dn * dn;
    e.c += dc * dc;
  }
  for (int d = 0; d < g.dim; ++d)
    for (std::size_t idx = 0; idx < s.u.comp[d].size(); ++idx) {
      const Index3 f = g.face_coords(d, idx);
      if (g.is_boundary_face(d, f)) continue;
      const double du = s.u.comp[d][idx] - mc.u_exact(d, g.face_center(d, f), s.t);
      e.u += du * du;
    }
  e.n = std::sqrt(e.n * g.cell_volume);
  e.c = std::sqrt(e.c * g.cell_volume);
  e.u = std::sqrt(e.u * g.cell_volume);
  return e;
}

double ConvergenceReport::order() const {
  if (!order_defined || orders.empty()) return std::numeric_limits<double>::quiet_NaN();
  return orders.back();
}

ConvergenceReport mms_convergence(const MmsCase& mc, const std::vector<int>& resolutions) {
  if (resolutions.size() < 3) throw ValidationError("mms_convergence: need at least 3 resolutions");
  for (std::size_t i = 1; i < resolutions.size(); ++i)
    if (resolutions[i] <= resolutions[i - 1]) throw ValidationError("mms_convergence: resolutions must increase");
  ConvergenceReport rep;
  rep.name = mc.name;
  rep.resolutions = resolutions;
  rep.errors.resize(resolutions.size());
  std::vector<std::string> fail(resolutions.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    try {
      const Point ext{1.0, 1.0, 1.0};
      const Index3 cells{resolutions[i], resolutions[i], resolutions[i]};
      const Grid g = make_grid(mc.dim, std::span(ext.data(), mc.dim), std::span(cells.data(), mc.dim));
      RunOptions opts;
      opts.poincare = 1.0;  // the Lyapunov set-up is irrelevant here
      const Trajectory traj = run(mms_params(mc, g), mms_initial(mc, g), opts);
      if (!traj.ok()) throw SimulationAbort(*traj.failure);
      rep.errors[i] = mms_errors(mc, traj.final_state);
    } catch (const std::exception& e) {
      fail[i] = "N=" + std::to_string(resolutions[i]) + ": " + e.what();
      rep.errors[i] = {std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0};
    }
  }
  for (const auto& f : fail)
    if (!f.empty()) rep.failures.push_back(f);

  for (const MmsErrors& e : rep.errors)
    if (!(e.total() > 1e-13)) rep.order_defined = false;
  for (std::size_t i = 1; i < resolutions.size(); ++i) {
    const double e0 = rep.errors[i - 1].total(), e1 = rep.errors[i].total();
    if (!(e1 < e0)) rep.monotone = false;
    const double ratio = static_cast<double>(resolutions[i]) / resolutions[i - 1];
    rep.orders.push_back(std::log(e0 / e1) / std::log(ratio));
  }
  return rep;
}

}  // namespace ksns
