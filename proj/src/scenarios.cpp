#include "ksns/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "ksns/error.hpp"
#include "ksns/fluid.hpp"

namespace ksns {

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::steady: return "steady";
    case InitialKind::bump_n: return "bump_n";
    case InitialKind::random_perturbation: return "random_perturbation";
    case InitialKind::swirl: return "swirl";
  }
  return "?";
}

InitialKind initial_kind_from_string(const std::string& s) {
  if (s == "steady") return InitialKind::steady;
  if (s == "bump_n") return InitialKind::bump_n;
  if (s == "random_perturbation") return InitialKind::random_perturbation;
  if (s == "swirl") return InitialKind::swirl;
  throw ValidationError("unknown initial condition '" + s + "'");
}

double default_amplitude(InitialKind kind) {
  switch (kind) {
    case InitialKind::steady: return 0.0;
    case InitialKind::bump_n: return 1.0;
    case InitialKind::random_perturbation: return 0.2;
    case InitialKind::swirl: return 0.1;
  }
  return 0.0;
}

namespace {

constexpr double pi = std::numbers::pi;

// Uniform in [-1, 1) from the raw generator bits, so the stream is fixed by
// the seed regardless of the standard library's distribution code.
double signed_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0; }

struct Mode {
  Index3 k;
  double coeff;
};

// Cosine modes with wavenumbers 0..3 per axis (excluding the constant one),
// scaled so that the sum of |coefficients| equals amp.
std::vector<Mode> random_modes(int dim, double amp, std::mt19937_64& rng) {
  std::vector<Mode> modes;
  const int kz_max = dim == 3 ? 3 : 0;
  for (int kz = 0; kz <= kz_max; ++kz)
    for (int ky = 0; ky <= 3; ++ky)
      for (int kx = 0; kx <= 3; ++kx) {
        if (kx == 0 && ky == 0 && kz == 0) continue;
        const double decay = 1.0 / (kx * kx + ky * ky + kz * kz);
        modes.push_back({{kx, ky, kz}, signed_unit(rng) * decay});
      }
  double total = 0.0;
  for (const Mode& m : modes) total += std::abs(m.coeff);
  for (Mode& m : modes) m.coeff *= amp / total;
  return modes;
}

double eval_modes(const std::vector<Mode>& modes, const Grid& g, const Point& x) {
  double s = 0.0;
  for (const Mode& m : modes) {
    double v = m.coeff;
    for (int d = 0; d < g.dim; ++d) v *= std::cos(pi * m.k[d] * x[d] / g.extents[d]);
    s += v;
  }
  return s;
}

double sin2_product(const Grid& g, const Point& x) {
  double v = 1.0;
  for (int d = 0; d < g.dim; ++d) {
    const double s = std::sin(pi * x[d] / g.extents[d]);
    v *= s * s;
  }
  return v;
}

}  // namespace

State make_initial(const Grid& g, const InitialSpec& spec) {
  if (!std::isfinite(spec.amplitude) || spec.amplitude < 0.0)
    throw ValidationError("initial amplitude must be finite and >= 0");
  State s(g);
  s.n.values.assign(g.cell_count(), 1.0);
  s.c.values.assign(g.cell_count(), 1.0);
  const double a = spec.amplitude;

  switch (spec.kind) {
    case InitialKind::steady:
      break;
    case InitialKind::bump_n: {
      const double sigma = 0.15 * g.min_extent();
      const Point x0{0.35 * g.extents[0], 0.6 * g.extents[1], 0.5 * g.extents[2]};
      for (std::size_t idx = 0; idx < s.n.size(); ++idx) {
        const Point x = g.cell_center(g.cell_coords(idx));
        double r2 = 0.0;
        for (int d = 0; d < g.dim; ++d) r2 += (x[d] - x0[d]) * (x[d] - x0[d]);
        s.n[idx] = 1.0 + a * std::exp(-r2 / (2.0 * sigma * sigma));
      }
      s.c.values.assign(g.cell_count(), mean(s.n));
      break;
    }
    case InitialKind::random_perturbation: {
      if (a >= 1.0) throw ValidationError("random_perturbation amplitude must be < 1 to keep n, c positive");
      std::mt19937_64 rng(spec.seed);
      const auto mn = random_modes(g.dim, a, rng);
      const auto mc = random_modes(g.dim, a, rng);
      const auto mu = random_modes(g.dim, 1.0, rng);
      for (std::size_t idx = 0; idx < s.n.size(); ++idx) {
        const Point x = g.cell_center(g.cell_coords(idx));
        s.n[idx] += eval_modes(mn, g, x);
        s.c[idx] += eval_modes(mc, g, x);
      }
      const double ua = 0.25 * a / std::numbers::pi;
      s.u = curl_of_stream(g, [&](const Point& x) {
        return ua * g.min_extent() * sin2_product(g, x) * eval_modes(mu, g, x);
      });
      break;
    }
    case InitialKind::swirl: {
      s.u = curl_of_stream(g, [&](const Point& x) { return a * g.min_extent() / pi * sin2_product(g, x); });
      break;
    }
  }
  return s;
}

}  // namespace ksns
