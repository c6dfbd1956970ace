#include "ksns/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ksns/error.hpp"
#include "ksns/parallel.hpp"

namespace ksns {

double Grid::min_spacing() const {
  double h = spacing[0];
  for (int d = 1; d < dim; ++d) h = std::min(h, spacing[d]);
  return h;
}

double Grid::min_extent() const {
  double l = extents[0];
  for (int d = 1; d < dim; ++d) l = std::min(l, extents[d]);
  return l;
}

Point Grid::cell_center(const Index3& c) const {
  Point p{0.0, 0.0, 0.0};
  for (int d = 0; d < dim; ++d) p[d] = (c[d] + 0.5) * spacing[d];
  return p;
}

Point Grid::face_center(int d, const Index3& f) const {
  Point p = cell_center(f);
  p[d] = f[d] * spacing[d];
  return p;
}

Point Grid::node(const Index3& v) const {
  Point p{0.0, 0.0, 0.0};
  for (int d = 0; d < dim; ++d) p[d] = v[d] * spacing[d];
  return p;
}

Grid make_grid(int dim, std::span<const double> extents, std::span<const int> cells) {
  if (dim != 2 && dim != 3) throw ValidationError("grid: dim must be 2 or 3, got " + std::to_string(dim));
  if (extents.size() != static_cast<std::size_t>(dim) || cells.size() != static_cast<std::size_t>(dim))
    throw ValidationError("grid: expected " + std::to_string(dim) + " extents and cell counts");
  Grid g;
  g.dim = dim;
  g.cell_volume = 1.0;
  for (int d = 0; d < dim; ++d) {
    if (!(extents[d] > 0.0) || !std::isfinite(extents[d]))
      throw ValidationError("grid: extent along axis " + std::to_string(d) + " must be positive");
    if (cells[d] < 4)
      throw ValidationError("grid: need at least 4 cells along axis " + std::to_string(d) + ", got " +
                            std::to_string(cells[d]));
    g.cells[d] = cells[d];
    g.extents[d] = extents[d];
    g.spacing[d] = extents[d] / cells[d];
    g.cell_volume *= g.spacing[d];
  }
  return g;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw ValidationError(std::string(what) + ": fields live on different grids");
}

namespace {

// Calls body(j, k, row_offset) for every x-row of an array with the given
// shape. Rows are independent, so the inner loops stay contiguous and free of
// index decoding.
template <class F>
void for_each_row(const Index3& shape, F&& body) {
  const std::size_t rows = static_cast<std::size_t>(shape[1]) * shape[2];
  parallel::for_each_index(rows, [&](std::size_t r) {
    const int j = static_cast<int>(r % shape[1]);
    const int k = static_cast<int>(r / shape[1]);
    body(j, k, r * static_cast<std::size_t>(shape[0]));
  });
}

}  // namespace

VectorField gradient_cc(const ScalarField& f) {
  const Grid& g = f.grid;
  VectorField out(g);
  for (int d = 0; d < g.dim; ++d) {
    const double inv_h = 1.0 / g.spacing[d];
    const std::size_t stride = g.cell_stride(d);
    const Index3 shape = g.face_shape(d);
    const double* src = f.values.data();
    double* dst = out.comp[d].data();
    for_each_row(shape, [&](int j, int k, std::size_t row) {
      double* o = dst + row;
      if (d == 0) {
        const double* c = src + g.cell_index(0, j, k);
        o[0] = 0.0;
        for (int i = 1; i < shape[0] - 1; ++i) o[i] = (c[i] - c[i - 1]) * inv_h;
        o[shape[0] - 1] = 0.0;
        return;
      }
      const int along = d == 1 ? j : k;
      if (along == 0 || along == g.cells[d]) {
        for (int i = 0; i < shape[0]; ++i) o[i] = 0.0;
        return;
      }
      const double* hi = src + g.cell_index(0, j, k);
      const double* lo = hi - stride;
      for (int i = 0; i < shape[0]; ++i) o[i] = (hi[i] - lo[i]) * inv_h;
    });
  }
  return out;
}

ScalarField divergence_fc(const VectorField& F) {
  const Grid& g = F.grid;
  ScalarField out(g);
  const int nx = g.cells[0];
  for_each_row(g.cells, [&](int j, int k, std::size_t row) {
    double* o = out.values.data() + row;
    for (int i = 0; i < nx; ++i) o[i] = 0.0;
    for (int d = 0; d < g.dim; ++d) {
      const double h = g.spacing[d];
      const double* lo = F.comp[d].data() + g.face_index(d, 0, j, k);
      const double* hi = lo + g.face_stride(d, d);
      for (int i = 0; i < nx; ++i) o[i] += (hi[i] - lo[i]) / h;
    }
  });
  return out;
}

// Same arithmetic as divergence_fc(gradient_cc(f)), without the face array.
ScalarField laplacian_neumann(const ScalarField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  const int nx = g.cells[0];
  for_each_row(g.cells, [&](int j, int k, std::size_t row) {
    const double* c = f.values.data() + row;
    double* o = out.values.data() + row;
    for (int i = 0; i < nx; ++i) o[i] = 0.0;
    for (int d = 0; d < g.dim; ++d) {
      const double inv_h = 1.0 / g.spacing[d];
      const double h = g.spacing[d];
      const std::size_t st = g.cell_stride(d);
      const int pos = d == 0 ? -1 : (d == 1 ? j : k);
      const bool has_lo = d == 0 || pos > 0, has_hi = d == 0 || pos < g.cells[d] - 1;
      for (int i = 0; i < nx; ++i) {
        const bool lo_ok = d == 0 ? i > 0 : has_lo;
        const bool hi_ok = d == 0 ? i < nx - 1 : has_hi;
        const double flux_lo = lo_ok ? (c[i] - c[i - static_cast<std::ptrdiff_t>(st)]) * inv_h : 0.0;
        const double flux_hi = hi_ok ? (c[i + st] - c[i]) * inv_h : 0.0;
        o[i] += (flux_hi - flux_lo) / h;
      }
    }
  });
  return out;
}

void vector_laplacian_noslip_component(const Grid& g, int d, std::span<const double> u, std::span<double> out) {
  const Index3 shape = g.face_shape(d);
  const double* src = u.data();
  double* dst = out.data();
  for_each_row(shape, [&](int j, int k, std::size_t row) {
    double* o = dst + row;
    const Index3 at{0, j, k};
    if (d != 0 && g.is_boundary_face(d, at)) {
      for (int i = 0; i < shape[0]; ++i) o[i] = 0.0;
      return;
    }
    const double* c = src + row;
    const int i0 = d == 0 ? 1 : 0;
    const int i1 = d == 0 ? shape[0] - 1 : shape[0];
    for (int i = 0; i < shape[0]; ++i) o[i] = 0.0;
    // x direction. Along the component's own axis the wall neighbours are
    // the zero boundary faces; across it they are ghosts with value -centre.
    {
      const double inv_h2 = 1.0 / (g.spacing[0] * g.spacing[0]);
      for (int i = i0; i < i1; ++i) {
        const double lo = i > 0 ? c[i - 1] : -c[i];
        const double hi = i < shape[0] - 1 ? c[i + 1] : -c[i];
        o[i] += (hi - 2.0 * c[i] + lo) * inv_h2;
      }
    }
    for (int e = 1; e < g.dim; ++e) {
      const std::size_t st = g.face_stride(d, e);
      const double inv_h2 = 1.0 / (g.spacing[e] * g.spacing[e]);
      const int pos = e == 1 ? j : k;
      const bool has_lo = pos > 0, has_hi = pos < shape[e] - 1;
      for (int i = i0; i < i1; ++i) {
        const double lo = has_lo ? c[i - st] : -c[i];
        const double hi = has_hi ? c[i + st] : -c[i];
        o[i] += (hi - 2.0 * c[i] + lo) * inv_h2;
      }
    }
  });
}

VectorField vector_laplacian_noslip(const VectorField& u) {
  const Grid& g = u.grid;
  VectorField out(g);
  for (int d = 0; d < g.dim; ++d) vector_laplacian_noslip_component(g, d, u.comp[d], out.comp[d]);
  return out;
}

void zero_boundary_faces(VectorField& u) {
  const Grid& g = u.grid;
  for (int d = 0; d < g.dim; ++d) {
    const Index3 shape = g.face_shape(d);
    double* dst = u.comp[d].data();
    for_each_row(shape, [&](int j, int k, std::size_t row) {
      double* o = dst + row;
      if (d == 0) {
        o[0] = 0.0;
        o[shape[0] - 1] = 0.0;
      } else if (g.is_boundary_face(d, Index3{0, j, k})) {
        for (int i = 0; i < shape[0]; ++i) o[i] = 0.0;
      }
    });
  }
}

double integrate(const ScalarField& f) {
  return parallel::sum(f.size(), [&](std::size_t i) { return f.values[i]; }) * f.grid.cell_volume;
}

double inner(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "inner");
  return parallel::sum(a.size(), [&](std::size_t i) { return a.values[i] * b.values[i]; }) *
         a.grid.cell_volume;
}

double inner(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid, b.grid, "inner");
  double s = 0.0;
  for (int d = 0; d < a.dim(); ++d) {
    const auto& x = a.comp[d];
    const auto& y = b.comp[d];
    s += parallel::sum(x.size(), [&](std::size_t i) { return x[i] * y[i]; });
  }
  return s * a.grid.cell_volume;
}

double norm2_sq(const VectorField& u) { return inner(u, u); }

double max_abs(const ScalarField& f) {
  return parallel::max(f.size(), [&](std::size_t i) { return std::abs(f.values[i]); });
}

double max_abs(const VectorField& u) {
  double m = 0.0;
  for (int d = 0; d < u.dim(); ++d) {
    const auto& x = u.comp[d];
    m = std::max(m, parallel::max(x.size(), [&](std::size_t i) { return std::abs(x[i]); }));
  }
  return m;
}

double mean(const ScalarField& f) { return integrate(f) / f.grid.total_volume(); }

bool all_finite(const ScalarField& f) {
  return std::all_of(f.values.begin(), f.values.end(), [](double v) { return std::isfinite(v); });
}

bool all_finite(const VectorField& u) {
  for (int d = 0; d < u.dim(); ++d)
    if (!std::all_of(u.comp[d].begin(), u.comp[d].end(), [](double v) { return std::isfinite(v); }))
      return false;
  return true;
}

double boundary_flux(const VectorField& F) {
  const Grid& g = F.grid;
  double s = 0.0;
  for (int d = 0; d < g.dim; ++d) {
    const double area = g.cell_volume / g.spacing[d];
    const auto& comp = F.comp[d];
    for (std::size_t idx = 0; idx < comp.size(); ++idx) {
      const Index3 f = g.face_coords(d, idx);
      if (f[d] == 0) s -= comp[idx] * area;
      else if (f[d] == g.cells[d]) s += comp[idx] * area;
    }
  }
  return s;
}

ScalarField axpy(double a, const ScalarField& x, const ScalarField& y) {
  require_same_grid(x.grid, y.grid, "axpy");
  ScalarField out(x.grid);
  parallel::for_each_index(x.size(), [&](std::size_t i) { out.values[i] = a * x.values[i] + y.values[i]; });
  return out;
}

VectorField axpy(double a, const VectorField& x, const VectorField& y) {
  require_same_grid(x.grid, y.grid, "axpy");
  VectorField out(x.grid);
  for (int d = 0; d < x.dim(); ++d) {
    auto& o = out.comp[d];
    const auto& xs = x.comp[d];
    const auto& ys = y.comp[d];
    parallel::for_each_index(o.size(), [&](std::size_t i) { o[i] = a * xs[i] + ys[i]; });
  }
  return out;
}

VectorField scaled(double a, const VectorField& x) {
  VectorField out(x.grid);
  for (int d = 0; d < x.dim(); ++d) {
    auto& o = out.comp[d];
    const auto& xs = x.comp[d];
    parallel::for_each_index(o.size(), [&](std::size_t i) { o[i] = a * xs[i]; });
  }
  return out;
}

std::vector<double> face_average(const ScalarField& f, int d) {
  const Grid& g = f.grid;
  std::vector<double> out(g.face_count(d));
  const std::size_t stride = g.cell_stride(d);
  parallel::for_each_index(out.size(), [&](std::size_t idx) {
    Index3 fc = g.face_coords(d, idx);
    if (fc[d] == 0) {
      out[idx] = f.values[g.cell_index(fc[0], fc[1], fc[2])];
    } else if (fc[d] == g.cells[d]) {
      fc[d] -= 1;
      out[idx] = f.values[g.cell_index(fc[0], fc[1], fc[2])];
    } else {
      const std::size_t hi = g.cell_index(fc[0], fc[1], fc[2]);
      out[idx] = 0.5 * (f.values[hi] + f.values[hi - stride]);
    }
  });
  return out;
}

}  // namespace ksns
