#pragma once

#include <memory>
#include <vector>

#include "ksns/fluid.hpp"
#include "ksns/poisson.hpp"
#include "ksns/sensitivity.hpp"
#include "ksns/state.hpp"

namespace ksns {

struct Trajectory;

/// Test functions phi(x,t) = psi(x) eta(t) with
///   psi(x) = prod_d p(x_d/L_d), p(s) = s^2 (3 - 2 s)    (or psi = 1),
///   eta(t) = cos^2(pi t / (2 T)) on [0, T], T the last recorded time,
/// and for the momentum identity the discrete curl of the stream function
///   Psi(x) = prod_d q(x_d/L_d), q(s) = 16 s^2 (1 - s)^2,
/// which is exactly solenoidal on the MAC grid and vanishes on the walls.
struct TestFunctionSpec {
  bool spatially_constant = false;
};

struct WeakResidual {
  double r_n = 0.0;
  double r_c = 0.0;
  double r_u = 0.0;
};

/// Streams the space-time quadrature of the three integral identities over
/// consecutive states. Face states in the flux integrals are arithmetic means
/// and the convection is centred (the scheme upwinds both), so the residual
/// isolates the first-order consistency error of the upwinding. Test-function
/// gradients use the discrete gradient, which makes the diffusion terms exact.
/// Forcing terms of manufactured runs are not included.
class WeakResidualAccumulator {
 public:
  WeakResidualAccumulator(const SimParams& params, TestFunctionSpec spec = {});
  ~WeakResidualAccumulator();

  void begin(const State& s0);
  void add_step(const State& before, const State& after);
  std::size_t steps() const { return records_.size(); }
  /// Evaluates the residuals with eta supported on [t_0, last time].
  WeakResidual result() const;

 private:
  struct Record {
    double t0, t1;
    double pn1, pc1, pu1;  // <n_{k+1}, psi>, <c_{k+1}, psi>, <u_{k+1}, Psi>
    double gn, gc, gu;     // flux/reaction/forcing integrands at step k
  };

  SimParams params_;
  TestFunctionSpec spec_;
  ScalarField psi_;
  VectorField grad_psi_;
  VectorField test_u_;
  ChemotacticFlux chemo_;
  FluidParams fluid_;
  std::unique_ptr<PoissonSolver> solver_;
  double t_start_ = 0.0;
  double pn0_ = 0.0, pc0_ = 0.0, pu0_ = 0.0;
  bool started_ = false;
  std::vector<Record> records_;
};

/// Batch form over the snapshots kept in a trajectory (needs >= 3).
WeakResidual weak_residual(const Trajectory& traj, const SimParams& params, TestFunctionSpec spec = {});

/// Centred-difference advective convection (a . grad) u on the faces of u.
VectorField convection_centered(const VectorField& a, const VectorField& u);

}  // namespace ksns
