#pragma once

#include "ksns/grid.hpp"
#include "ksns/sensitivity.hpp"

// Serial, loop-nest versions of the field kernels. They are written
// independently of the parallel implementations (explicit (i,j,k) loops,
// stencil Laplacians, per-face cutoff evaluation) and serve as oracles in
// the tests and as the baseline in the benchmark.
namespace ksns::reference {

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& F);
/// Direct 2*dim+1 point stencil with mirrored ghosts at the walls.
ScalarField laplacian(const ScalarField& f);
/// Componentwise stencil with odd ghosts across walls and zero normal faces.
VectorField vector_laplacian(const VectorField& u);
VectorField advective_flux(const ScalarField& q, const VectorField& u);
VectorField chemotactic_flux(const ScalarField& n, const ScalarField& c, const SensitivitySpec& spec,
                             const RegularizationParams& reg);

ScalarField step_n(const ScalarField& n, const ScalarField& c, const VectorField& u, const SensitivitySpec& spec,
                   const RegularizationParams& reg, double dt);
ScalarField step_c(const ScalarField& c, const ScalarField& n, const VectorField& u, double dt);

/// Left-to-right sum of f * cell volume.
double integrate(const ScalarField& f);

}  // namespace ksns::reference
