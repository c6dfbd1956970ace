#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace ksns {

using Point = std::array<double, 3>;
using Index3 = std::array<int, 3>;

/// Uniform Cartesian grid on the box [0,L_0] x ... x [0,L_{dim-1}].
///
/// Scalars live at cell centres, vector components on the faces normal to
/// their own axis (MAC layout). Unused trailing axes of a 2D grid have one
/// cell of unit length so that all index arithmetic is three dimensional.
/// Linear indices are x-fastest.
struct Grid {
  int dim = 2;
  Index3 cells{1, 1, 1};
  Point extents{1.0, 1.0, 1.0};
  Point spacing{1.0, 1.0, 1.0};
  double cell_volume = 1.0;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(cells[0]) * cells[1] * cells[2];
  }
  double total_volume() const {
    double v = 1.0;
    for (int d = 0; d < dim; ++d) v *= extents[d];
    return v;
  }
  double min_spacing() const;
  double min_extent() const;

  std::size_t cell_index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(cells[0]) * (static_cast<std::size_t>(j) +
                                                 static_cast<std::size_t>(cells[1]) * k);
  }
  Index3 cell_coords(std::size_t idx) const {
    const int i = static_cast<int>(idx % cells[0]);
    const std::size_t rest = idx / cells[0];
    return {i, static_cast<int>(rest % cells[1]), static_cast<int>(rest / cells[1])};
  }
  /// Linear distance between neighbouring cells along axis d.
  std::size_t cell_stride(int d) const {
    return d == 0 ? 1 : (d == 1 ? static_cast<std::size_t>(cells[0])
                                : static_cast<std::size_t>(cells[0]) * cells[1]);
  }

  /// Shape of the face array holding the axis-d component.
  Index3 face_shape(int d) const {
    Index3 s = cells;
    s[d] += 1;
    return s;
  }
  std::size_t face_count(int d) const {
    const Index3 s = face_shape(d);
    return static_cast<std::size_t>(s[0]) * s[1] * s[2];
  }
  std::size_t face_index(int d, int i, int j, int k) const {
    const Index3 s = face_shape(d);
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(s[0]) * (static_cast<std::size_t>(j) +
                                             static_cast<std::size_t>(s[1]) * k);
  }
  Index3 face_coords(int d, std::size_t idx) const {
    const Index3 s = face_shape(d);
    const int i = static_cast<int>(idx % s[0]);
    const std::size_t rest = idx / s[0];
    return {i, static_cast<int>(rest % s[1]), static_cast<int>(rest / s[1])};
  }
  std::size_t face_stride(int d, int axis) const {
    const Index3 s = face_shape(d);
    return axis == 0 ? 1 : (axis == 1 ? static_cast<std::size_t>(s[0])
                                      : static_cast<std::size_t>(s[0]) * s[1]);
  }
  bool is_boundary_face(int d, const Index3& f) const { return f[d] == 0 || f[d] == cells[d]; }

  Point cell_center(const Index3& c) const;
  Point face_center(int d, const Index3& f) const;
  /// Grid node (cell corner) position, used for stream functions.
  Point node(const Index3& v) const;

  bool operator==(const Grid&) const = default;
};

/// Validated grid constructor; throws ValidationError on bad input.
Grid make_grid(int dim, std::span<const double> extents, std::span<const int> cells);

/// Cell-centred scalar.
struct ScalarField {
  Grid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), values(g.cell_count(), fill) {}

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

/// Face-staggered vector field; component d is normal to axis d.
struct VectorField {
  Grid grid;
  std::array<std::vector<double>, 3> comp;

  VectorField() = default;
  explicit VectorField(const Grid& g, double fill = 0.0) : grid(g) {
    for (int d = 0; d < g.dim; ++d) comp[d].assign(g.face_count(d), fill);
  }
  int dim() const { return grid.dim; }
};

// Conservative operators. Boundary faces are zero-flux (homogeneous Neumann).
VectorField gradient_cc(const ScalarField& f);
ScalarField divergence_fc(const VectorField& F);
ScalarField laplacian_neumann(const ScalarField& f);

/// Componentwise Laplacian of a face velocity with no-slip walls: normal
/// components vanish on their boundary faces, tangential ones use the
/// odd ghost reflection u_ghost = -u. Boundary-normal faces of the result are 0.
VectorField vector_laplacian_noslip(const VectorField& u);
/// The axis-d component of vector_laplacian_noslip, written into out.
void vector_laplacian_noslip_component(const Grid& g, int d, std::span<const double> u, std::span<double> out);

/// Sets every wall-normal face value to zero.
void zero_boundary_faces(VectorField& u);

// Volume-weighted inner products and norms. Faces carry the cell volume.
double integrate(const ScalarField& f);
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);
double norm2_sq(const VectorField& u);
double max_abs(const ScalarField& f);
double max_abs(const VectorField& u);
double mean(const ScalarField& f);
bool all_finite(const ScalarField& f);
bool all_finite(const VectorField& u);

/// Boundary flux sum: sum over wall faces of F.nu * face area.
double boundary_flux(const VectorField& F);

// Elementwise helpers.
ScalarField axpy(double a, const ScalarField& x, const ScalarField& y);  // a*x + y
VectorField axpy(double a, const VectorField& x, const VectorField& y);
VectorField scaled(double a, const VectorField& x);

/// Arithmetic-mean value of a cell field on the faces normal to axis d
/// (interior faces only; wall faces copy the adjacent cell).
std::vector<double> face_average(const ScalarField& f, int d);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace ksns
