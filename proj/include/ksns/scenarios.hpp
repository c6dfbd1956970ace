#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ksns/state.hpp"

namespace ksns {

enum class InitialKind { steady, bump_n, random_perturbation, swirl };

std::string to_string(InitialKind kind);
InitialKind initial_kind_from_string(const std::string& s);

/// Built-in initial conditions. All are nonnegative in (n, c), have
/// discretely solenoidal no-slip velocity, and depend only on the grid,
/// the amplitude and (for random_perturbation) the seed.
///
///   steady               n = c = 1, u = 0
///   bump_n               n = 1 + A exp(-|x - x0|^2 / (2 sigma^2)), c = mean(n), u = 0
///   random_perturbation  n, c = 1 + zero-mean random cosine modes of total size A,
///                        u = curl of a random stream function of size A/4
///   swirl                n = c = 1, u = A curl(prod_d sin^2(pi x_d / L_d))
struct InitialSpec {
  InitialKind kind = InitialKind::steady;
  double amplitude = 0.0;
  std::uint64_t seed = 1;
};

double default_amplitude(InitialKind kind);
State make_initial(const Grid& grid, const InitialSpec& spec);

}  // namespace ksns
