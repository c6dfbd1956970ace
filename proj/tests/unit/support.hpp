#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "ksns/grid.hpp"

namespace test {

inline ksns::Grid grid2(int n, double lx = 1.0, double ly = 1.0) {
  const std::vector<double> L{lx, ly};
  const std::vector<int> N{n, n};
  return ksns::make_grid(2, L, N);
}

inline ksns::Grid grid3(int n) {
  const std::vector<double> L{1.0, 1.0, 1.0};
  const std::vector<int> N{n, n, n};
  return ksns::make_grid(3, L, N);
}

inline ksns::ScalarField sample(const ksns::Grid& g, const std::function<double(const ksns::Point&)>& f) {
  ksns::ScalarField out(g);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = f(g.cell_center(g.cell_coords(i)));
  return out;
}

inline ksns::ScalarField random_scalar(const ksns::Grid& g, unsigned seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  ksns::ScalarField out(g);
  for (double& v : out.values) v = dist(rng);
  return out;
}

/// Random face field with zero wall-normal faces.
inline ksns::VectorField random_vector(const ksns::Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ksns::VectorField out(g);
  for (int d = 0; d < g.dim; ++d)
    for (double& v : out.comp[d]) v = dist(rng);
  ksns::zero_boundary_faces(out);
  return out;
}

inline double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_diff(const ksns::VectorField& a, const ksns::VectorField& b) {
  double m = 0.0;
  for (int d = 0; d < a.grid.dim; ++d) m = std::max(m, max_diff(a.comp[d], b.comp[d]));
  return m;
}

}  // namespace test
