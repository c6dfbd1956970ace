#include "ksns/poisson.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "ksns/error.hpp"
#include "ksns/parallel.hpp"

namespace ksns {

double neumann_eigenvalue_1d(int k, int n, double h) {
  return (2.0 - 2.0 * std::cos(std::numbers::pi * k / n)) / (h * h);
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return parallel::sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

// The FFTW planner is not re-entrant; fftw_execute is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    if (!p) return;
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

/// Forward/backward real-to-real transform pair over an x-fastest box.
struct Transform {
  Index3 shape{1, 1, 1};
  std::vector<double> buffer;
  std::vector<double> inv_eig;  // 1/eigenvalue of the operator per mode, 0 for the null mode
  Plan forward;
  Plan backward;

  void init(int dim, const Index3& s, const std::array<fftw_r2r_kind, 3>& fwd,
            const std::array<fftw_r2r_kind, 3>& bwd) {
    shape = s;
    buffer.assign(static_cast<std::size_t>(s[0]) * s[1] * s[2], 0.0);
    // FFTW is row-major (last index fastest); reverse the axes.
    int n[3];
    fftw_r2r_kind kf[3], kb[3];
    for (int d = 0; d < dim; ++d) {
      n[d] = s[dim - 1 - d];
      kf[d] = fwd[dim - 1 - d];
      kb[d] = bwd[dim - 1 - d];
    }
    {
      std::lock_guard lock(planner_mutex());
      forward.reset(fftw_plan_r2r(dim, n, buffer.data(), buffer.data(), kf, FFTW_ESTIMATE));
      backward.reset(fftw_plan_r2r(dim, n, buffer.data(), buffer.data(), kb, FFTW_ESTIMATE));
    }
    if (!forward || !backward) throw SolverError("fftw plan creation failed", 0, 0.0);
  }

  void apply(std::span<const double> in, std::span<double> out) {
    std::copy(in.begin(), in.end(), buffer.begin());
    fftw_execute(forward.get());
    for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] *= inv_eig[i];
    fftw_execute(backward.get());
    std::copy(buffer.begin(), buffer.end(), out.begin());
  }
};

}  // namespace

struct PoissonSolver::Plans {
  Transform neumann;
  std::array<Transform, 3> helmholtz;
  std::array<double, 3> helmholtz_eps{-1.0, -1.0, -1.0};
  std::array<std::vector<double>, 3> helmholtz_eig;  // Laplacian eigenvalues, eps applied lazily
  std::array<double, 3> helmholtz_norm{1.0, 1.0, 1.0};
};

SolveStats conjugate_gradient(const std::function<void(std::span<const double>, std::span<double>)>& apply,
                              const std::function<void(std::span<const double>, std::span<double>)>& precondition,
                              std::span<const double> b, std::span<double> x, double tol, int max_iter,
                              const char* what) {
  const std::size_t n = b.size();
  const double bnorm = std::sqrt(dot(b, b));
  SolveStats stats;
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return stats;
  }
  std::vector<double> r(n), z(n), p(n), Ap(n);
  apply(x, Ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
  double rnorm = std::sqrt(dot(r, r));
  if (rnorm <= tol * bnorm) {
    stats.residual = rnorm / bnorm;
    return stats;
  }
  precondition(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    apply(p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) throw SolverError(std::string(what) + ": operator not positive definite", it, rnorm / bnorm);
    const double alpha = rz / pAp;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    rnorm = std::sqrt(dot(r, r));
    stats.iterations = it;
    stats.residual = rnorm / bnorm;
    if (rnorm <= tol * bnorm) return stats;
    precondition(r, z);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw SolverError(std::string(what) + ": CG did not converge", stats.iterations, stats.residual);
}

PoissonSolver::PoissonSolver(const Grid& grid, double tol, int max_iter, Preconditioner pc)
    : grid_(grid), tol_(tol), max_iter_(max_iter), pc_(pc), plans_(std::make_unique<Plans>()) {
  const int dim = grid_.dim;
  // Neumann: DCT-II forward, DCT-III backward, normalisation prod(2N).
  {
    auto& t = plans_->neumann;
    std::array<fftw_r2r_kind, 3> f{FFTW_REDFT10, FFTW_REDFT10, FFTW_REDFT10};
    std::array<fftw_r2r_kind, 3> b{FFTW_REDFT01, FFTW_REDFT01, FFTW_REDFT01};
    t.init(dim, grid_.cells, f, b);
    double norm = 1.0;
    for (int d = 0; d < dim; ++d) norm *= 2.0 * grid_.cells[d];
    t.inv_eig.assign(t.buffer.size(), 0.0);
    for (std::size_t idx = 0; idx < t.inv_eig.size(); ++idx) {
      const Index3 k = grid_.cell_coords(idx);
      double lam = 0.0;
      for (int d = 0; d < dim; ++d) lam += neumann_eigenvalue_1d(k[d], grid_.cells[d], grid_.spacing[d]);
      t.inv_eig[idx] = lam > 0.0 ? 1.0 / (lam * norm) : 0.0;
    }
  }
  // No-slip component d: DST-I on interior faces along d, DST-II/III across.
  for (int d = 0; d < dim; ++d) {
    auto& t = plans_->helmholtz[d];
    Index3 shape = grid_.cells;
    shape[d] -= 1;
    std::array<fftw_r2r_kind, 3> f{FFTW_RODFT10, FFTW_RODFT10, FFTW_RODFT10};
    std::array<fftw_r2r_kind, 3> b{FFTW_RODFT01, FFTW_RODFT01, FFTW_RODFT01};
    f[d] = FFTW_RODFT00;
    b[d] = FFTW_RODFT00;
    t.init(dim, shape, f, b);
    double norm = 1.0;
    for (int e = 0; e < dim; ++e) norm *= 2.0 * grid_.cells[e];
    plans_->helmholtz_norm[d] = norm;
    auto& eig = plans_->helmholtz_eig[d];
    eig.assign(t.buffer.size(), 0.0);
    for (std::size_t idx = 0; idx < eig.size(); ++idx) {
      Index3 k{static_cast<int>(idx % shape[0]), static_cast<int>((idx / shape[0]) % shape[1]),
               static_cast<int>(idx / (static_cast<std::size_t>(shape[0]) * shape[1]))};
      double lam = 0.0;
      for (int e = 0; e < dim; ++e) lam += neumann_eigenvalue_1d(k[e] + 1, grid_.cells[e], grid_.spacing[e]);
      eig[idx] = lam;
    }
    t.inv_eig.assign(eig.size(), 0.0);
  }
}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

ScalarField PoissonSolver::solve_neumann(const ScalarField& rhs) {
  require_same_grid(rhs.grid, grid_, "solve_neumann");
  const std::size_t n = rhs.size();
  const double m = parallel::sum(n, [&](std::size_t i) { return rhs.values[i]; }) / static_cast<double>(n);
  // Solve -Lap p = -(rhs - mean): SPD on the zero-mean subspace.
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = m - rhs.values[i];

  ScalarField work(grid_);
  auto apply = [&](std::span<const double> x, std::span<double> y) {
    std::copy(x.begin(), x.end(), work.values.begin());
    const ScalarField lap = laplacian_neumann(work);
    for (std::size_t i = 0; i < n; ++i) y[i] = -lap.values[i];
  };
  std::vector<double> diag;
  if (pc_ == Preconditioner::jacobi) {
    diag.resize(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
      const Index3 c = grid_.cell_coords(idx);
      double s = 0.0;
      for (int d = 0; d < grid_.dim; ++d) {
        const double w = 1.0 / (grid_.spacing[d] * grid_.spacing[d]);
        s += (c[d] > 0 ? w : 0.0) + (c[d] < grid_.cells[d] - 1 ? w : 0.0);
      }
      diag[idx] = s;
    }
  }
  auto precondition = [&](std::span<const double> r, std::span<double> z) {
    if (pc_ == Preconditioner::spectral) {
      plans_->neumann.apply(r, z);
    } else {
      // P D^-1 P with P the zero-mean projector; residuals are already zero mean.
      for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
      const double zm = parallel::sum(n, [&](std::size_t i) { return z[i]; }) / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) z[i] -= zm;
    }
  };
  ScalarField p(grid_);
  last_ = conjugate_gradient(apply, precondition, b, p.values, tol_, max_iter_, "pressure Poisson");
  total_iterations_ += last_.iterations;
  const double pm = parallel::sum(n, [&](std::size_t i) { return p.values[i]; }) / static_cast<double>(n);
  for (double& v : p.values) v -= pm;
  return p;
}

std::vector<double> PoissonSolver::solve_helmholtz(int d, const std::vector<double>& rhs, double eps) {
  if (d < 0 || d >= grid_.dim) throw ValidationError("solve_helmholtz: bad component");
  if (rhs.size() != grid_.face_count(d)) throw ValidationError("solve_helmholtz: size mismatch");
  if (eps < 0.0) throw ValidationError("solve_helmholtz: eps must be >= 0");
  auto& t = plans_->helmholtz[d];
  if (plans_->helmholtz_eps[d] != eps) {
    const auto& eig = plans_->helmholtz_eig[d];
    for (std::size_t i = 0; i < eig.size(); ++i)
      t.inv_eig[i] = 1.0 / ((1.0 + eps * eig[i]) * plans_->helmholtz_norm[d]);
    plans_->helmholtz_eps[d] = eps;
  }

  const Index3 shape = t.shape;
  const std::size_t n = t.buffer.size();
  // Packed interior index -> face index.
  auto face_of = [&](std::size_t idx) {
    const int i = static_cast<int>(idx % shape[0]);
    const int j = static_cast<int>((idx / shape[0]) % shape[1]);
    const int k = static_cast<int>(idx / (static_cast<std::size_t>(shape[0]) * shape[1]));
    Index3 f{i, j, k};
    f[d] += 1;
    return grid_.face_index(d, f[0], f[1], f[2]);
  };
  std::vector<std::size_t> map(n);
  for (std::size_t i = 0; i < n; ++i) map[i] = face_of(i);

  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = rhs[map[i]];

  std::vector<double> work(grid_.face_count(d), 0.0), lap(work.size());
  auto apply = [&](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < n; ++i) work[map[i]] = x[i];
    vector_laplacian_noslip_component(grid_, d, work, lap);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - eps * lap[map[i]];
  };
  std::vector<double> diag;
  if (pc_ == Preconditioner::jacobi) {
    diag.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Index3 f = grid_.face_coords(d, map[i]);
      double s = 0.0;
      for (int e = 0; e < grid_.dim; ++e) {
        const double w = 1.0 / (grid_.spacing[e] * grid_.spacing[e]);
        if (e == d) {
          s += 2.0 * w;
        } else {
          s += 2.0 * w + (f[e] == 0 ? w : 0.0) + (f[e] == grid_.cells[e] - 1 ? w : 0.0);
        }
      }
      diag[i] = 1.0 + eps * s;
    }
  }
  auto precondition = [&](std::span<const double> r, std::span<double> z) {
    if (pc_ == Preconditioner::spectral) {
      t.apply(r, z);
    } else {
      for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    }
  };
  std::vector<double> x(n, 0.0);
  last_ = conjugate_gradient(apply, precondition, b, x, tol_, max_iter_, "velocity Helmholtz");
  total_iterations_ += last_.iterations;
  std::vector<double> out(grid_.face_count(d), 0.0);
  for (std::size_t i = 0; i < n; ++i) out[map[i]] = x[i];
  return out;
}

}  // namespace ksns
