#include "ksns/sensitivity.hpp"

#include <algorithm>
#include <cmath>

#include "ksns/error.hpp"
#include "ksns/parallel.hpp"

namespace ksns {

std::string to_string(SensitivityKind kind) {
  switch (kind) {
    case SensitivityKind::scalar_saturating: return "scalar_saturating";
    case SensitivityKind::rotational: return "rotational";
    case SensitivityKind::user_table: return "user_table";
  }
  return "?";
}

SensitivityKind sensitivity_kind_from_string(const std::string& s) {
  if (s == "scalar_saturating") return SensitivityKind::scalar_saturating;
  if (s == "rotational") return SensitivityKind::rotational;
  if (s == "user_table") return SensitivityKind::user_table;
  throw ValidationError("unknown sensitivity kind '" + s + "'");
}

SensitivitySpec SensitivitySpec::make(SensitivityKind kind, double cs, double alpha, double theta,
                                      std::vector<std::pair<double, double>> table) {
  if (!(cs >= 0.0) || !std::isfinite(cs)) throw ValidationError("sensitivity: C_S must be finite and >= 0");
  if (!(alpha >= 1.0) || !std::isfinite(alpha))
    throw ValidationError("sensitivity: alpha must satisfy alpha >= 1 for global solvability");
  if (!std::isfinite(theta)) throw ValidationError("sensitivity: theta must be finite");
  if (kind == SensitivityKind::user_table) {
    if (table.size() < 2) throw ValidationError("sensitivity: user_table needs at least two nodes");
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (table[i].first < 0.0 || table[i].second < 0.0)
        throw ValidationError("sensitivity: user_table nodes must be nonnegative");
      if (i > 0 && !(table[i].first > table[i - 1].first))
        throw ValidationError("sensitivity: user_table n-values must be strictly increasing");
    }
  } else if (!table.empty()) {
    throw ValidationError("sensitivity: table data only allowed for kind user_table");
  }
  SensitivitySpec s;
  s.kind = kind;
  s.cs = cs;
  s.alpha = alpha;
  s.theta = kind == SensitivityKind::scalar_saturating ? 0.0 : theta;
  s.table = std::move(table);
  return s;
}

double SensitivitySpec::bound(double n) const {
  return alpha == 1.0 ? cs / (1.0 + n) : cs * std::pow(1.0 + n, -alpha);
}

double SensitivitySpec::magnitude(double n) const {
  if (kind != SensitivityKind::user_table) return bound(n);
  double v;
  if (n <= table.front().first) {
    v = table.front().second;
  } else if (n >= table.back().first) {
    v = table.back().second;
  } else {
    const auto it = std::upper_bound(table.begin(), table.end(), n,
                                     [](double x, const auto& node) { return x < node.first; });
    const auto& [n1, s1] = *it;
    const auto& [n0, s0] = *(it - 1);
    v = s0 + (s1 - s0) * (n - n0) / (n1 - n0);
  }
  return std::min(v, bound(n));
}

Tensor orientation(const SensitivitySpec& spec, int dim) {
  Tensor t;
  t.dim = dim;
  const double ct = std::cos(spec.theta);
  const double st = std::sin(spec.theta);
  t(0, 0) = ct;
  t(0, 1) = -st;
  t(1, 0) = st;
  t(1, 1) = ct;
  if (dim == 3) t(2, 2) = 1.0;
  return t;
}

RegularizationParams make_regularization(double eps, const Grid& grid) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("regularization: eps must lie in (0, 1]");
  const double lmin = grid.min_extent();
  return {eps, std::min(eps * lmin, 0.25 * lmin)};
}

double f_eps(double s, double eps) {
  if (s < 0.0) throw ValidationError("f_eps: argument must be nonnegative");
  const double b = 1.0 + eps * s;
  return 1.0 / (b * b * b);
}

namespace {

struct WallDistance {
  double dist;
  int axis;
  double sign;  // +1 when distance grows with x_axis
};

WallDistance wall_distance(const Point& x, const Grid& grid) {
  WallDistance w{grid.extents[0], 0, 1.0};
  bool first = true;
  for (int d = 0; d < grid.dim; ++d) {
    const double lo = x[d];
    const double hi = grid.extents[d] - x[d];
    if (lo < -1e-12 * grid.extents[d] || hi < -1e-12 * grid.extents[d])
      throw ValidationError("cutoff_rho: point outside the domain");
    if (first || lo < w.dist) w = {std::max(lo, 0.0), d, 1.0}, first = false;
    if (hi < w.dist) w = {std::max(hi, 0.0), d, -1.0};
  }
  return w;
}

}  // namespace

double cutoff_rho(const Point& x, const Grid& grid, const RegularizationParams& reg) {
  const double s = std::clamp(wall_distance(x, grid).dist / reg.delta, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

Point cutoff_rho_gradient(const Point& x, const Grid& grid, const RegularizationParams& reg) {
  const WallDistance w = wall_distance(x, grid);
  Point g{0.0, 0.0, 0.0};
  const double s = w.dist / reg.delta;
  if (s <= 0.0 || s >= 1.0) return g;
  g[w.axis] = w.sign * 6.0 * s * (1.0 - s) / reg.delta;
  return g;
}

Tensor eval_S_eps(const SensitivitySpec& spec, const RegularizationParams& reg, const Grid& grid,
                  const Point& x, double n, double c) {
  if (n < 0.0 || c < 0.0) throw ValidationError("eval_S_eps: n and c must be nonnegative");
  if (!std::isfinite(n) || !std::isfinite(c)) throw ValidationError("eval_S_eps: non-finite input");
  Tensor t = orientation(spec, grid.dim);
  const double scale = cutoff_rho(x, grid, reg) * spec.magnitude(n);
  for (double& v : t.m) v *= scale;
  return t;
}

double tangential_average(const Grid& g, const VectorField& grad, int d, const Index3& face, int e) {
  // The axis-d face sits between cells face-e_d and face; average the e-faces of both.
  Index3 lo_cell = face;
  lo_cell[d] -= 1;
  const std::size_t se = g.face_stride(e, e);
  const std::size_t a = g.face_index(e, lo_cell[0], lo_cell[1], lo_cell[2]);
  const std::size_t b = g.face_index(e, face[0], face[1], face[2]);
  const auto& ge = grad.comp[e];
  return 0.25 * (ge[a] + ge[a + se] + ge[b] + ge[b + se]);
}

ChemotacticFlux::ChemotacticFlux(const Grid& grid, SensitivitySpec spec, RegularizationParams reg)
    : grid_(grid), spec_(std::move(spec)), reg_(reg), orient_(orientation(spec_, grid.dim)) {
  for (int d = 0; d < grid_.dim; ++d) {
    auto& rho = face_rho_[d];
    rho.resize(grid_.face_count(d));
    for (std::size_t idx = 0; idx < rho.size(); ++idx) {
      const Index3 f = grid_.face_coords(d, idx);
      rho[idx] = grid_.is_boundary_face(d, f) ? 0.0 : cutoff_rho(grid_.face_center(d, f), grid_, reg_);
    }
  }
}

std::vector<double> ChemotacticFlux::drift_direction(const VectorField& grad_c, int d) const {
  const Grid& g = grid_;
  std::vector<double> w(g.face_count(d), 0.0);
  const auto& rho = face_rho_[d];
  parallel::for_each_index(w.size(), [&](std::size_t idx) {
    if (rho[idx] == 0.0) return;
    const Index3 f = g.face_coords(d, idx);
    double s = orient_(d, d) * grad_c.comp[d][idx];
    for (int e = 0; e < g.dim; ++e) {
      if (e == d || orient_(d, e) == 0.0) continue;
      s += orient_(d, e) * tangential_average(g, grad_c, d, f, e);
    }
    w[idx] = rho[idx] * s;
  });
  return w;
}

VectorField ChemotacticFlux::operator()(const ScalarField& n, const ScalarField& c) const {
  require_same_grid(n.grid, c.grid, "chemotactic_flux");
  require_same_grid(n.grid, grid_, "chemotactic_flux");
  VectorField J(grid_);
  if (inactive()) return J;
  const VectorField grad_c = gradient_cc(c);
  for (int d = 0; d < grid_.dim; ++d) {
    const std::vector<double> w = drift_direction(grad_c, d);
    const std::size_t stride = grid_.cell_stride(d);
    auto& out = J.comp[d];
    parallel::for_each_index(out.size(), [&](std::size_t idx) {
      if (w[idx] == 0.0) return;
      const Index3 f = grid_.face_coords(d, idx);
      const std::size_t hi = grid_.cell_index(f[0], f[1], f[2]);
      const double nu = std::max(w[idx] > 0.0 ? n.values[hi - stride] : n.values[hi], 0.0);
      out[idx] = nu * f_eps(nu, reg_.eps) * spec_.magnitude(nu) * w[idx];
    });
  }
  return J;
}

double ChemotacticFlux::max_drift_speed(const ScalarField& n, const ScalarField& c) const {
  if (inactive()) return 0.0;
  const VectorField grad_c = gradient_cc(c);
  double m = 0.0;
  for (int d = 0; d < grid_.dim; ++d) {
    const std::vector<double> w = drift_direction(grad_c, d);
    const std::size_t stride = grid_.cell_stride(d);
    m = std::max(m, parallel::max(w.size(), [&](std::size_t idx) {
      if (w[idx] == 0.0) return 0.0;
      const Index3 f = grid_.face_coords(d, idx);
      const std::size_t hi = grid_.cell_index(f[0], f[1], f[2]);
      const double nu = std::max(w[idx] > 0.0 ? n.values[hi - stride] : n.values[hi], 0.0);
      return std::abs(f_eps(nu, reg_.eps) * spec_.magnitude(nu) * w[idx]);
    }));
  }
  return m;
}

VectorField chemotactic_flux(const ScalarField& n, const ScalarField& c, const SensitivitySpec& spec,
                             const RegularizationParams& reg) {
  return ChemotacticFlux(n.grid, spec, reg)(n, c);
}

}  // namespace ksns
