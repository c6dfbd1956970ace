#pragma once

#include <functional>
#include <optional>
#include <string>

#include "ksns/grid.hpp"
#include "ksns/sensitivity.hpp"

namespace ksns {

enum class PhiKind { none, linear, cosine };

std::string to_string(PhiKind kind);
PhiKind phi_kind_from_string(const std::string& s);

/// Gravitational potential: linear is strength * x_{dim-1}; cosine is
/// strength * prod_d cos(pi x_d / L_d).
struct PhiSpec {
  PhiKind kind = PhiKind::linear;
  double strength = 1.0;
};

ScalarField make_phi(const Grid& grid, const PhiSpec& spec);

/// Optional body forces added to the right-hand sides, evaluated explicitly
/// at the start of each step (used by manufactured-solution runs).
struct Forcing {
  std::function<double(const Point&, double)> n;
  std::function<double(const Point&, double)> c;
  std::function<double(int, const Point&, double)> u;
};

struct SimParams {
  Grid grid;
  SensitivitySpec sensitivity;
  double eps = 0.1;                       // regularisation parameter
  std::optional<double> yosida_eps;       // defaults to eps
  double kappa = 1.0;
  PhiSpec phi;
  double t_end = 1.0;
  double cfl = 0.4;
  std::optional<double> fixed_dt;         // bypasses the adaptive step when set
  int diag_every = 1;
  int snapshot_every = 0;                 // 0 keeps no in-memory snapshots
  std::optional<Forcing> forcing;

  double effective_yosida_eps() const { return yosida_eps.value_or(eps); }
  void validate() const;
};

struct State {
  double t = 0.0;
  ScalarField n;
  ScalarField c;
  VectorField u;
  ScalarField pressure;

  explicit State(const Grid& g) : n(g), c(g), u(g), pressure(g) {}
  State() = default;
};

}  // namespace ksns
