#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ksns/state.hpp"
#include "ksns/transport.hpp"

namespace ksns {

/// 1/lambda_1 for the smallest nonzero eigenvalue of the discrete Neumann
/// Laplacian, by inverse iteration on the zero-mean subspace.
double poincare_constant(const Grid& grid, double rel_tol = 1e-8);

/// Weight B and the coefficients of the dissipation inequality
///   dL/dt <= -a1 |n - n0|^2 - a2 |grad c|^2,   L = (B/2)|n - n0|^2 + (1/2)|c - n0|^2,
/// with a1 = B C_N / 2 - 1/4 and a2 = 1 - B C_S^2 / 2.
struct LyapunovConfig {
  double B = 0.0;
  double poincare = 0.0;
  double cs = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double kappa_pred = 0.0;  // min(2 a1 / B, 2 C_N a2)
};

struct LyapunovFeasibility {
  std::optional<LyapunovConfig> config;
  std::string reason;
  bool feasible() const { return config.has_value(); }
};

/// Feasible iff C_S < 2 sqrt(C_N); B is the midpoint of (1/(2 C_N), 2/C_S^2),
/// the upper end capped at 10/C_N.
LyapunovFeasibility make_lyapunov_config(double cs, double poincare);

double lyapunov(const State& s, double n_bar0, const LyapunovConfig& cfg);

struct LyapunovBudget {
  double value = 0.0;
  double bound_rhs = 0.0;  // -a1 |n - n0|^2 - a2 |grad c|^2
};
LyapunovBudget lyapunov_budget(const State& s, double n_bar0, const LyapunovConfig& cfg);

struct GradCNorms {
  double l2_sq = 0.0;
  double l4_4 = 0.0;
  double max_sq = 0.0;  // max over cells of |grad c|^2
};
/// Cell |grad c|^2 is the mean of the squared face gradients on both sides of
/// each axis, so l2_sq equals the face sum D_c.
GradCNorms grad_c_norms(const ScalarField& c);

struct SteadyDistance {
  double n_inf = 0.0;
  double c_inf = 0.0;
  double u_inf = 0.0;
};
SteadyDistance steady_state_distance(const State& s, double n_bar0);

struct DecayFit {
  double rate = 0.0;  // negated log-slope
  double r_squared = 0.0;
  double intercept = 0.0;
  std::size_t samples = 0;
};

struct FitWindow {
  double t_begin = 0.0;
  double t_end = 1e300;
};

/// Least-squares fit of log(values) against t over samples with t in the
/// window. Needs >= 10 samples and strictly positive values there.
DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> values, FitWindow window);

/// One row of the time series; column order matches the CSV.
struct DiagRow {
  double t = 0.0;
  double mass_n = 0.0;
  double mass_c = 0.0;
  double l2_n_dev = 0.0;
  double l2_c_dev = 0.0;
  double l2_u = 0.0;
  double grad_c_l2 = 0.0;
  double grad_c_l4 = 0.0;
  double lyapunov = 0.0;
  double d_n = 0.0;
  double d_c = 0.0;
  double d_u = 0.0;
  double n_inf_dev = 0.0;
  double c_inf_dev = 0.0;
  double u_inf = 0.0;
  double dt = 0.0;
  double poisson_iters = 0.0;
};

inline constexpr std::array<std::string_view, 17> kDiagColumns = {
    "t",        "mass_n",    "mass_c", "l2_n_dev", "l2_c_dev",  "l2_u",      "grad_c_l2", "grad_c_l4", "lyapunov",
    "D_n",      "D_c",       "D_u",    "n_inf_dev", "c_inf_dev", "u_inf",    "dt",        "poisson_iters"};

double column_value(const DiagRow& row, std::string_view column);

struct DiagnosticsSeries {
  std::vector<DiagRow> rows;

  std::size_t size() const { return rows.size(); }
  std::vector<double> column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

/// Evaluates every column at one state. The lyapunov column is NaN when cfg is empty.
DiagRow measure(const State& s, double n_bar0, const std::optional<LyapunovConfig>& cfg, double alpha);

/// First time the Lyapunov column drops below half its initial value
/// (the start of the decay-fit window); returns the last time if never.
double transient_end(const DiagnosticsSeries& series, std::string_view column = "lyapunov");

}  // namespace ksns
