#include "ksns/reference.hpp"

#include <algorithm>

namespace ksns::reference {

namespace {

struct Cells {
  const Grid& g;
  int nx, ny, nz;
  explicit Cells(const Grid& grid) : g(grid), nx(grid.cells[0]), ny(grid.cells[1]), nz(grid.cells[2]) {}
  std::size_t at(int i, int j, int k) const { return (static_cast<std::size_t>(k) * ny + j) * nx + i; }
};

Index3 shift(Index3 p, int d, int by) {
  p[d] += by;
  return p;
}

}  // namespace

VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid;
  const Cells c(g);
  VectorField out(g);
  for (int d = 0; d < g.dim; ++d) {
    const Index3 s = g.face_shape(d);
    for (int k = 0; k < s[2]; ++k)
      for (int j = 0; j < s[1]; ++j)
        for (int i = 0; i < s[0]; ++i) {
          const Index3 p{i, j, k};
          if (p[d] == 0 || p[d] == g.cells[d]) continue;
          const Index3 lo = shift(p, d, -1);
          out.comp[d][g.face_index(d, i, j, k)] =
              (f.values[c.at(p[0], p[1], p[2])] - f.values[c.at(lo[0], lo[1], lo[2])]) / g.spacing[d];
        }
  }
  return out;
}

ScalarField divergence(const VectorField& F) {
  const Grid& g = F.grid;
  const Cells c(g);
  ScalarField out(g);
  for (int k = 0; k < c.nz; ++k)
    for (int j = 0; j < c.ny; ++j)
      for (int i = 0; i < c.nx; ++i) {
        double s = 0.0;
        for (int d = 0; d < g.dim; ++d) {
          const Index3 hi = shift({i, j, k}, d, 1);
          s += (F.comp[d][g.face_index(d, hi[0], hi[1], hi[2])] - F.comp[d][g.face_index(d, i, j, k)]) / g.spacing[d];
        }
        out.values[c.at(i, j, k)] = s;
      }
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid;
  const Cells c(g);
  ScalarField out(g);
  for (int k = 0; k < c.nz; ++k)
    for (int j = 0; j < c.ny; ++j)
      for (int i = 0; i < c.nx; ++i) {
        const double centre = f.values[c.at(i, j, k)];
        double s = 0.0;
        for (int d = 0; d < g.dim; ++d) {
          const double inv_h2 = 1.0 / (g.spacing[d] * g.spacing[d]);
          for (int side : {-1, 1}) {
            const Index3 nb = shift({i, j, k}, d, side);
            // mirrored ghost: the wall term drops out
            if (nb[d] < 0 || nb[d] >= g.cells[d]) continue;
            s += (f.values[c.at(nb[0], nb[1], nb[2])] - centre) * inv_h2;
          }
        }
        out.values[c.at(i, j, k)] = s;
      }
  return out;
}

VectorField vector_laplacian(const VectorField& u) {
  const Grid& g = u.grid;
  VectorField out(g);
  for (int d = 0; d < g.dim; ++d) {
    const Index3 s = g.face_shape(d);
    for (int k = 0; k < s[2]; ++k)
      for (int j = 0; j < s[1]; ++j)
        for (int i = 0; i < s[0]; ++i) {
          const Index3 p{i, j, k};
          if (p[d] == 0 || p[d] == g.cells[d]) continue;
          const double centre = u.comp[d][g.face_index(d, i, j, k)];
          double acc = 0.0;
          for (int e = 0; e < g.dim; ++e) {
            const double inv_h2 = 1.0 / (g.spacing[e] * g.spacing[e]);
            for (int side : {-1, 1}) {
              const Index3 nb = shift(p, e, side);
              double v;
              if (nb[e] < 0 || nb[e] >= s[e])
                v = -centre;  // across a wall: odd reflection gives zero at the wall
              else
                v = u.comp[d][g.face_index(d, nb[0], nb[1], nb[2])];
              acc += (v - centre) * inv_h2;
            }
          }
          out.comp[d][g.face_index(d, i, j, k)] = acc;
        }
  }
  return out;
}

VectorField advective_flux(const ScalarField& q, const VectorField& u) {
  const Grid& g = q.grid;
  const Cells c(g);
  VectorField out(g);
  for (int d = 0; d < g.dim; ++d) {
    const Index3 s = g.face_shape(d);
    for (int k = 0; k < s[2]; ++k)
      for (int j = 0; j < s[1]; ++j)
        for (int i = 0; i < s[0]; ++i) {
          const Index3 p{i, j, k};
          if (p[d] == 0 || p[d] == g.cells[d]) continue;
          const std::size_t fi = g.face_index(d, i, j, k);
          const double a = u.comp[d][fi];
          const Index3 up = a > 0.0 ? shift(p, d, -1) : p;
          out.comp[d][fi] = a * q.values[c.at(up[0], up[1], up[2])];
        }
  }
  return out;
}

VectorField chemotactic_flux(const ScalarField& n, const ScalarField& c, const SensitivitySpec& spec,
                             const RegularizationParams& reg) {
  const Grid& g = n.grid;
  const Cells cells(g);
  VectorField out(g);
  if (spec.cs == 0.0) return out;
  const VectorField gc = gradient(c);
  const Tensor M = orientation(spec, g.dim);
  for (int d = 0; d < g.dim; ++d) {
    const Index3 s = g.face_shape(d);
    for (int k = 0; k < s[2]; ++k)
      for (int j = 0; j < s[1]; ++j)
        for (int i = 0; i < s[0]; ++i) {
          const Index3 p{i, j, k};
          if (p[d] == 0 || p[d] == g.cells[d]) continue;
          const double rho = cutoff_rho(g.face_center(d, p), g, reg);
          if (rho == 0.0) continue;
          double w = M(d, d) * gc.comp[d][g.face_index(d, i, j, k)];
          for (int e = 0; e < g.dim; ++e) {
            if (e == d || M(d, e) == 0.0) continue;
            // grad_e c averaged over the four e-faces of the two cells sharing this face
            const Index3 a = shift(p, d, -1);
            const auto ge = [&](const Index3& q) { return gc.comp[e][g.face_index(e, q[0], q[1], q[2])]; };
            const double avg = 0.25 * (ge(a) + ge(shift(a, e, 1)) + ge(p) + ge(shift(p, e, 1)));
            w += M(d, e) * avg;
          }
          w *= rho;
          if (w == 0.0) continue;
          const Index3 up = w > 0.0 ? shift(p, d, -1) : p;
          const double nu = std::max(n.values[cells.at(up[0], up[1], up[2])], 0.0);
          out.comp[d][g.face_index(d, i, j, k)] = nu * f_eps(nu, reg.eps) * spec.magnitude(nu) * w;
        }
  }
  return out;
}

ScalarField step_n(const ScalarField& n, const ScalarField& c, const VectorField& u, const SensitivitySpec& spec,
                   const RegularizationParams& reg, double dt) {
  const VectorField gn = gradient(n);
  const VectorField J = reference::chemotactic_flux(n, c, spec, reg);
  const VectorField A = reference::advective_flux(n, u);
  VectorField flux(n.grid);
  for (int d = 0; d < n.grid.dim; ++d)
    for (std::size_t f = 0; f < flux.comp[d].size(); ++f) flux.comp[d][f] = gn.comp[d][f] - J.comp[d][f] - A.comp[d][f];
  const ScalarField div = divergence(flux);
  ScalarField out(n.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = n.values[i] + dt * div.values[i];
  return out;
}

ScalarField step_c(const ScalarField& c, const ScalarField& n, const VectorField& u, double dt) {
  const ScalarField lap = laplacian(c);
  const ScalarField adv = divergence(reference::advective_flux(c, u));
  ScalarField out(c.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = c.values[i] + dt * (lap.values[i] - adv.values[i] - c.values[i] + n.values[i]);
  return out;
}

double integrate(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid.cell_volume;
}

}  // namespace ksns::reference
