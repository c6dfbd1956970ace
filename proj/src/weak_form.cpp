#include "ksns/weak_form.hpp"

#include <cmath>
#include <numbers>

#include "ksns/error.hpp"
#include "ksns/parallel.hpp"
#include "ksns/stepper.hpp"

namespace ksns {
namespace {

double p_poly(double s) { return s * s * (3.0 - 2.0 * s); }
double q_poly(double s) { return 16.0 * s * s * (1.0 - s) * (1.0 - s); }

double eta(double t, double t0, double T) {
  if (T <= t0) return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * (t - t0) / (T - t0));
  return c * c;
}

double face_inner(const std::array<std::vector<double>, 3>& a, const VectorField& b, const Grid& g) {
  double s = 0.0;
  for (int d = 0; d < g.dim; ++d) {
    const auto& x = a[d];
    const auto& y = b.comp[d];
    s += parallel::sum(x.size(), [&](std::size_t i) { return x[i] * y[i]; });
  }
  return s * g.cell_volume;
}

}  // namespace

VectorField convection_centered(const VectorField& a, const VectorField& u) {
  require_same_grid(a.grid, u.grid, "convection_centered");
  const Grid& g = u.grid;
  VectorField out(g);
  for (int d = 0; d < g.dim; ++d) {
    const auto& ud = u.comp[d];
    const Index3 shape = g.face_shape(d);
    auto& dst = out.comp[d];
    parallel::for_each_index(ud.size(), [&](std::size_t idx) {
      const Index3 f = g.face_coords(d, idx);
      if (g.is_boundary_face(d, f)) return;
      const double centre = ud[idx];
      double s = 0.0;
      for (int e = 0; e < g.dim; ++e) {
        const double ae = e == d ? a.comp[d][idx] : tangential_average(g, a, d, f, e);
        const std::size_t st = g.face_stride(d, e);
        const double lo = f[e] > 0 ? ud[idx - st] : -centre;
        const double hi = f[e] < shape[e] - 1 ? ud[idx + st] : -centre;
        s += ae * (hi - lo) / (2.0 * g.spacing[e]);
      }
      dst[idx] = s;
    });
  }
  return out;
}

WeakResidualAccumulator::WeakResidualAccumulator(const SimParams& params, TestFunctionSpec spec)
    : params_(params),
      spec_(spec),
      psi_(params.grid),
      grad_psi_(params.grid),
      chemo_(params.grid, params.sensitivity, make_regularization(params.eps, params.grid)),
      fluid_(make_fluid_params(params.kappa, params.effective_yosida_eps(), make_phi(params.grid, params.phi))),
      solver_(std::make_unique<PoissonSolver>(params.grid)) {
  const Grid& g = params_.grid;
  auto psi_at = [&](const Point& x) {
    if (spec_.spatially_constant) return 1.0;
    double v = 1.0;
    for (int d = 0; d < g.dim; ++d) v *= p_poly(x[d] / g.extents[d]);
    return v;
  };
  for (std::size_t idx = 0; idx < psi_.size(); ++idx) psi_[idx] = psi_at(g.cell_center(g.cell_coords(idx)));
  grad_psi_ = gradient_cc(psi_);
  test_u_ = curl_of_stream(g, [&](const Point& x) {
    double v = 1.0;
    for (int d = 0; d < g.dim; ++d) v *= q_poly(x[d] / g.extents[d]);
    return v;
  });
}

WeakResidualAccumulator::~WeakResidualAccumulator() = default;

void WeakResidualAccumulator::begin(const State& s0) {
  require_same_grid(s0.n.grid, params_.grid, "weak residual");
  t_start_ = s0.t;
  pn0_ = inner(s0.n, psi_);
  pc0_ = inner(s0.c, psi_);
  pu0_ = inner(s0.u, test_u_);
  records_.clear();
  started_ = true;
}

void WeakResidualAccumulator::add_step(const State& before, const State& after) {
  if (!started_) throw ValidationError("weak residual: begin() must be called first");
  const Grid& g = params_.grid;
  Record r{};
  r.t0 = before.t;
  r.t1 = after.t;
  r.pn1 = inner(after.n, psi_);
  r.pc1 = inner(after.c, psi_);
  r.pu1 = inner(after.u, test_u_);

  const VectorField gn = gradient_cc(before.n);
  const VectorField gc = gradient_cc(before.c);
  const VectorField grad_c = gc;
  std::array<std::vector<double>, 3> flux_n, flux_c;
  for (int d = 0; d < g.dim; ++d) {
    const std::vector<double> nf = face_average(before.n, d);
    const std::vector<double> cf = face_average(before.c, d);
    const std::vector<double> w =
        chemo_.inactive() ? std::vector<double>(nf.size(), 0.0) : chemo_.drift_direction(grad_c, d);
    const auto& ud = before.u.comp[d];
    flux_n[d].resize(nf.size());
    flux_c[d].resize(nf.size());
    const auto& spec = chemo_.spec();
    const double eps = chemo_.regularization().eps;
    parallel::for_each_index(nf.size(), [&](std::size_t i) {
      const double n = std::max(nf[i], 0.0);
      const double j = w[i] == 0.0 ? 0.0 : n * f_eps(n, eps) * spec.magnitude(n) * w[i];
      flux_n[d][i] = gn.comp[d][i] - j - nf[i] * ud[i];
      flux_c[d][i] = gc.comp[d][i] - cf[i] * ud[i];
    });
  }
  r.gn = face_inner(flux_n, grad_psi_, g);
  r.gc = face_inner(flux_c, grad_psi_, g) + inner(axpy(-1.0, before.n, before.c), psi_);

  VectorField momentum = vector_laplacian_noslip(before.u);
  if (params_.kappa != 0.0) {
    const VectorField a = yosida_apply(before.u, fluid_.yosida_eps, *solver_);
    momentum = axpy(-params_.kappa, convection_centered(a, before.u), momentum);
  }
  momentum = axpy(1.0, buoyancy(after.n, fluid_), momentum);
  r.gu = -inner(momentum, test_u_);
  records_.push_back(r);
}

WeakResidual WeakResidualAccumulator::result() const {
  if (!started_) throw ValidationError("weak residual: no data");
  const double T = records_.empty() ? t_start_ : records_.back().t1;
  WeakResidual out;
  double rn = -pn0_ * eta(t_start_, t_start_, T);
  double rc = -pc0_ * eta(t_start_, t_start_, T);
  double ru = -pu0_ * eta(t_start_, t_start_, T);
  for (const Record& r : records_) {
    const double e0 = eta(r.t0, t_start_, T);
    const double de = eta(r.t1, t_start_, T) - e0;
    const double dt = r.t1 - r.t0;
    rn += -r.pn1 * de + dt * e0 * r.gn;
    rc += -r.pc1 * de + dt * e0 * r.gc;
    ru += -r.pu1 * de + dt * e0 * r.gu;
  }
  out.r_n = std::abs(rn);
  out.r_c = std::abs(rc);
  out.r_u = std::abs(ru);
  return out;
}

WeakResidual weak_residual(const Trajectory& traj, const SimParams& params, TestFunctionSpec spec) {
  if (traj.snapshots.size() < 3) throw ValidationError("weak_residual: need at least 3 snapshots");
  WeakResidualAccumulator acc(params, spec);
  acc.begin(traj.snapshots.front());
  for (std::size_t k = 0; k + 1 < traj.snapshots.size(); ++k) acc.add_step(traj.snapshots[k], traj.snapshots[k + 1]);
  return acc.result();
}

}  // namespace ksns
