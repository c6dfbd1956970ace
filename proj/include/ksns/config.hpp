#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ksns/scenarios.hpp"
#include "ksns/state.hpp"

namespace ksns {

/// A batch run as written in a config file:
///
///   [grid]     dim, cells, extents
///   [physics]  eps, yosida_eps, kappa, sensitivity, cs, alpha, theta, table, phi, phi_strength
///   [run]      T, cfl, dt, scenario, amplitude, seed, csv_every, snapshot_every, out
///
/// Required: dim, cells, extents, T, scenario. Lists are comma separated;
/// table is "n:s,n:s,...". '#' starts a comment.
struct RunConfig {
  int dim = 2;
  std::vector<int> cells;
  std::vector<double> extents;

  double eps = 0.1;
  std::optional<double> yosida_eps;
  double kappa = 1.0;
  SensitivityKind sensitivity = SensitivityKind::scalar_saturating;
  double cs = 0.3;
  double alpha = 1.0;
  double theta = 0.0;
  std::vector<std::pair<double, double>> table;
  PhiKind phi = PhiKind::linear;
  double phi_strength = 1.0;

  double t_end = 1.0;
  double cfl = 0.4;
  std::optional<double> fixed_dt;
  InitialKind scenario = InitialKind::steady;
  std::optional<double> amplitude;  // defaults per scenario
  std::uint64_t seed = 1;
  int csv_every = 1;
  int snapshot_every = 0;
  std::string out_dir = "out";

  bool operator==(const RunConfig&) const = default;

  Grid grid() const;
  SimParams sim_params() const;
  InitialSpec initial() const;
};

/// Throws ValidationError naming the line for unknown keys, malformed or
/// out-of-range values, and the first missing required key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Every field written explicitly (defaults included) in full precision;
/// parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

}  // namespace ksns
