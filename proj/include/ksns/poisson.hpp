#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ksns/grid.hpp"

namespace ksns {

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;  // final relative residual ||b - A x|| / ||b||
};

/// Preconditioned conjugate gradients on plain vectors. `apply` must be SPD on
/// the subspace the iterates live in. Returns stats; throws SolverError when
/// the tolerance is not met within max_iter.
SolveStats conjugate_gradient(const std::function<void(std::span<const double>, std::span<double>)>& apply,
                              const std::function<void(std::span<const double>, std::span<double>)>& precondition,
                              std::span<const double> b, std::span<double> x, double tol, int max_iter,
                              const char* what);

/// Linear solves on the MAC grid: the Neumann pressure Poisson problem and the
/// componentwise no-slip Helmholtz problems (I - eps Lap_h) v = f.
///
/// Both are solved by PCG. The default preconditioner diagonalises the
/// constant-coefficient stencil with fast cosine/sine transforms, so CG
/// converges in one or two iterations; Jacobi is kept for cross-checking.
/// Owns scratch buffers and transform plans: one instance per simulation.
class PoissonSolver {
 public:
  enum class Preconditioner { spectral, jacobi };

  explicit PoissonSolver(const Grid& grid, double tol = 1e-10, int max_iter = 2000,
                         Preconditioner pc = Preconditioner::spectral);
  ~PoissonSolver();
  PoissonSolver(PoissonSolver&&) noexcept;
  PoissonSolver& operator=(PoissonSolver&&) noexcept;
  PoissonSolver(const PoissonSolver&) = delete;
  PoissonSolver& operator=(const PoissonSolver&) = delete;

  /// Solves Lap_h p = rhs - mean(rhs) with zero-flux walls; returns the
  /// zero-mean solution.
  ScalarField solve_neumann(const ScalarField& rhs);

  /// Solves (I - eps Lap_h) v = rhs for velocity component d with no-slip
  /// walls. Wall-normal faces of rhs are ignored and zero in the result.
  std::vector<double> solve_helmholtz(int d, const std::vector<double>& rhs, double eps);

  const SolveStats& last_stats() const { return last_; }
  int total_iterations() const { return total_iterations_; }
  const Grid& grid() const { return grid_; }
  double tolerance() const { return tol_; }

 private:
  struct Plans;

  Grid grid_;
  double tol_;
  int max_iter_;
  Preconditioner pc_;
  SolveStats last_;
  int total_iterations_ = 0;
  std::unique_ptr<Plans> plans_;
};

/// Eigenvalues (positive) of -Lap_h with zero-flux walls along one axis: (2-2cos(pi k/N))/h^2.
double neumann_eigenvalue_1d(int k, int n, double h);

}  // namespace ksns
