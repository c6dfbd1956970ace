#pragma once

#include "ksns/grid.hpp"
#include "ksns/sensitivity.hpp"

namespace ksns {

/// Face flux q u with q taken from the upwind cell of each face.
VectorField advective_flux(const ScalarField& q, const VectorField& u);

/// Largest dt for which the explicit diffusion + upwind update stays
/// monotone: dt (sum_d 2/h_d^2 + sum_d max|a_d| / h_d) <= 1.
double monotone_dt_limit(const Grid& g, double max_speed);

/// n_next = n + dt div(grad n - J_chemo - n u) (+ dt source).
/// Conserves sum(n) to roundoff; rejects negative input and CFL violations.
ScalarField step_n(const ScalarField& n, const ScalarField& c, const VectorField& u, const ChemotacticFlux& chemo,
                   double dt, const ScalarField* source = nullptr);

/// c_next = c + dt [div(grad c - c u) - c + n] (+ dt source).
ScalarField step_c(const ScalarField& c, const ScalarField& n, const VectorField& u, double dt,
                   const ScalarField* source = nullptr);

struct Dissipation {
  double d_n = 0.0;  // sum n_f^(2 alpha - 2) |grad n|^2 vol, n_f the face mean
  double d_c = 0.0;  // sum |grad c|^2 vol
  double d_u = 0.0;  // sum |grad u|^2 vol
};

Dissipation dissipation_integrals(const ScalarField& n, const ScalarField& c, const VectorField& u, double alpha);

}  // namespace ksns
