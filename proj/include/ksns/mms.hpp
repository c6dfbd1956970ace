#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ksns/state.hpp"

namespace ksns {

enum class MmsKind { diffusion_only, full_coupling, exact_steady };

std::string to_string(MmsKind kind);
MmsKind mms_kind_from_string(const std::string& s);

/// Manufactured solutions on the unit box [0,1]^dim:
///   n* = 1 + a e^-t prod_d cos(pi k_d x_d),   k = (1, 1, 1)
///   c* = 1 + b e^-t prod_d cos(pi m_d x_d),   m = (2, 1, 1)
///   u* = U e^-t curl(prod_d sin^2(pi x_d)),   P* = 0
/// diffusion_only uses u* = 0, C_S = 0 and no gravity; exact_steady sets
/// a = b = U = 0. The Yosida smoothing is switched off (its continuum
/// counterpart has no closed form), so the convecting velocity is u itself.
struct MmsCase {
  std::string name;
  MmsKind kind = MmsKind::exact_steady;
  int dim = 2;
  double a = 0.0, b = 0.0, U = 0.0;
  SensitivitySpec sensitivity;
  double eps = 0.1;
  double kappa = 1.0;
  PhiSpec phi;
  double t_end = 0.1;
  double cfl = 0.4;

  double n_exact(const Point& x, double t) const;
  double c_exact(const Point& x, double t) const;
  double u_exact(int d, const Point& x, double t) const;
};

MmsCase make_mms_case(MmsKind kind, int dim = 2);

/// Closed-form forcing that makes (n*, c*, u*) an exact solution of the
/// regularised system on `grid` (the cutoff rho depends on the box).
Forcing mms_forcing(const MmsCase& mc, const Grid& grid);

/// Simulation parameters for one resolution, with a fixed step dividing t_end.
SimParams mms_params(const MmsCase& mc, const Grid& grid);
State mms_initial(const MmsCase& mc, const Grid& grid);

struct MmsErrors {
  double n = 0.0, c = 0.0, u = 0.0;
  double total() const;
};

/// Discrete L2 distances from the manufactured solution at s.t.
MmsErrors mms_errors(const MmsCase& mc, const State& s);

struct ConvergenceReport {
  std::string name;
  std::vector<int> resolutions;
  std::vector<MmsErrors> errors;
  std::vector<double> orders;  // between successive resolutions, from the total error
  bool order_defined = true;   // false when all errors are at round-off level
  bool monotone = true;        // errors strictly decrease with refinement
  std::vector<std::string> failures;

  /// Order from the finest pair (NaN when undefined).
  double order() const;
};

/// Runs the case on unit boxes with N cells per axis for each N in resolutions.
ConvergenceReport mms_convergence(const MmsCase& mc, const std::vector<int>& resolutions);

}  // namespace ksns
