#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "ksns/grid.hpp"

namespace ksns {

enum class SensitivityKind { scalar_saturating, rotational, user_table };

std::string to_string(SensitivityKind kind);
SensitivityKind sensitivity_kind_from_string(const std::string& s);

/// Chemotactic sensitivity S(x,n,c) = s(n) M with |S| <= C_S (1+n)^-alpha.
///
/// scalar_saturating: s(n) = C_S (1+n)^-alpha, M = I.
/// rotational:        s(n) = C_S (1+n)^-alpha, M = planar rotation by theta
///                    (about the z axis in 3D).
/// user_table:        s(n) linearly interpolated from (n, s) nodes, clipped
///                    to the bound C_S (1+n)^-alpha; M = rotation by theta.
struct SensitivitySpec {
  SensitivityKind kind = SensitivityKind::scalar_saturating;
  double cs = 0.5;
  double alpha = 1.0;
  double theta = 0.0;
  std::vector<std::pair<double, double>> table;

  static SensitivitySpec make(SensitivityKind kind, double cs, double alpha, double theta = 0.0,
                              std::vector<std::pair<double, double>> table = {});

  /// The scalar factor s(n) >= 0.
  double magnitude(double n) const;
  /// The bound C_S (1+n)^-alpha.
  double bound(double n) const;
};

struct Tensor {
  int dim = 2;
  std::array<double, 9> m{};  // row-major 3x3, only the leading dim x dim block is used

  double operator()(int r, int c) const { return m[3 * r + c]; }
  double& operator()(int r, int c) { return m[3 * r + c]; }
};

/// Orientation factor M (rotation by theta, identity for scalar kinds).
Tensor orientation(const SensitivitySpec& spec, int dim);

struct RegularizationParams {
  double eps = 0.1;
  double delta = 0.1;  // width of the wall layer where the cutoff ramps from 0 to 1
};

/// delta(eps) = min(eps * min L, min L / 4).
RegularizationParams make_regularization(double eps, const Grid& grid);

/// 1 / (1 + eps s)^3.
double f_eps(double s, double eps);

/// Smoothstep of the wall distance: 0 on the walls, 1 at distance >= delta.
double cutoff_rho(const Point& x, const Grid& grid, const RegularizationParams& reg);

/// Derivative of cutoff_rho along each axis (piecewise; uses the nearest wall).
Point cutoff_rho_gradient(const Point& x, const Grid& grid, const RegularizationParams& reg);

/// S_eps(x,n,c) = rho_eps(x) S(x,n,c).
Tensor eval_S_eps(const SensitivitySpec& spec, const RegularizationParams& reg, const Grid& grid,
                  const Point& x, double n, double c);

/// Face fluxes J = n F_eps(n) S_eps grad c with n upwinded along the drift
/// direction. Caches the cutoff at every face, so build one per run.
class ChemotacticFlux {
 public:
  ChemotacticFlux(const Grid& grid, SensitivitySpec spec, RegularizationParams reg);

  VectorField operator()(const ScalarField& n, const ScalarField& c) const;
  /// Largest |F_eps(n) S_eps grad c| over faces, for the time-step bound.
  double max_drift_speed(const ScalarField& n, const ScalarField& c) const;

  const SensitivitySpec& spec() const { return spec_; }
  const RegularizationParams& regularization() const { return reg_; }
  const Grid& grid() const { return grid_; }
  bool inactive() const { return spec_.cs == 0.0; }

  /// Drift direction rho_f (M grad c)_d at every axis-d face. grad c
  /// tangential components are averaged from the four neighbouring faces.
  std::vector<double> drift_direction(const VectorField& grad_c, int d) const;

 private:
  Grid grid_;
  SensitivitySpec spec_;
  RegularizationParams reg_;
  Tensor orient_;
  std::array<std::vector<double>, 3> face_rho_;
};

VectorField chemotactic_flux(const ScalarField& n, const ScalarField& c, const SensitivitySpec& spec,
                             const RegularizationParams& reg);

/// Tangential gradient component e averaged onto an axis-d face.
double tangential_average(const Grid& g, const VectorField& grad, int d, const Index3& face, int e);

}  // namespace ksns
