#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "bouncer/error.hpp"
#include "bouncer/potential.hpp"
#include "bouncer/tridiagonal.hpp"

namespace bouncer {

struct EigenState {
  int index;  // 1-based
  double energy;  // J
  std::vector<double> psi;  // m^-1/2, one sample per grid point
};

struct Spectrum {
  std::vector<EigenState> states;
  Grid grid;
  PotentialSpec spec;
};

/// Trapezoidal integral of uniformly spaced samples.
inline double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

inline double norm_squared(std::span<const double> psi, double h) {
  std::vector<double> sq(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) sq[i] = psi[i] * psi[i];
  return trapezoid(sq, h);
}

inline double overlap_integral(std::span<const double> a, std::span<const double> b, double h) {
  std::vector<double> prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
  return trapezoid(prod, h);
}

/// Strict sign changes between consecutive samples, skipping samples below
/// 1e-12 of the peak magnitude.
inline std::size_t count_nodes(std::span<const double> psi) {
  double peak = 0;
  for (double v : psi) peak = std::max(peak, std::abs(v));
  const double floor = 1e-12 * peak;
  std::size_t nodes = 0;
  int last_sign = 0;
  for (double v : psi) {
    if (std::abs(v) <= floor) continue;
    const int sign = v > 0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) ++nodes;
    last_sign = sign;
  }
  return nodes;
}

/// hbar^2 pi^2 n^2 / (2 m a^2).
inline double box_eigenvalue_analytic(int n, double width, const PhysicalConstants& c) {
  require(n >= 1, ErrorKind::InvalidArgument, "box eigenvalue index must be >= 1");
  require(width > 0, ErrorKind::InvalidArgument, "box width must be positive");
  const double kn = std::numbers::pi * n / width;
  return c.kinetic() * kn * kn;
}

/// Magnitudes of the first zeros of Ai.
inline constexpr std::array<double, 10> kAiryZeros = {
    2.33810741045977, 4.08794944413097, 5.52055982809552, 6.78670809007191,
    7.94413358711278, 9.02265085334098, 10.0401743415581, 11.0085243037333,
    11.9360155632363, 12.8287767528658};

/// eps0 |a_n| for the mirror-plus-gravity bouncer.
inline double gravity_eigenvalue_analytic(int n, const PhysicalConstants& c) {
  require(n >= 1 && n <= static_cast<int>(kAiryZeros.size()), ErrorKind::UnsupportedIndex,
          "gravity eigenvalue table covers n = 1..10, got n = " + std::to_string(n));
  return c.eps0() * kAiryZeros[static_cast<std::size_t>(n - 1)];
}

/// Airy-zero magnitude, tabulated up to n = 10, asymptotic beyond. Only
/// used for sizing grids.
inline double airy_zero_estimate(int n) {
  if (n >= 1 && n <= static_cast<int>(kAiryZeros.size())) {
    return kAiryZeros[static_cast<std::size_t>(n - 1)];
  }
  const double t = 3.0 * std::numbers::pi * (4.0 * n - 1.0) / 8.0;
  return std::cbrt(t * t);
}

struct GridPolicy {
  std::size_t n_points = 4000;
  /// z_max as a multiple of the highest requested state's turning height.
  double z_max_factor = 4.0;
};

/// Grid covering the classically allowed region of the lowest `n_states`.
inline Grid default_grid(const PotentialSpec& spec, const PhysicalConstants& c, int n_states,
                         const GridPolicy& policy = {}) {
  require(n_states >= 1, ErrorKind::InvalidArgument, "n_states must be >= 1");
  const double gravity_top = c.z0() * airy_zero_estimate(n_states);
  if (const auto* box = std::get_if<InfiniteBox>(&spec)) {
    return Grid(0.0, box->width, policy.n_points);
  }
  if (std::holds_alternative<GravityFloor>(spec)) {
    return Grid(0.0, policy.z_max_factor * gravity_top, policy.n_points);
  }
  if (const auto* ga = std::get_if<GravityWithAbsorber>(&spec)) {
    return Grid(0.0, policy.z_max_factor * std::max(gravity_top, ga->ceiling.z_wall),
                policy.n_points);
  }
  const auto& tab = std::get<Tabulated>(spec);
  require(tab.samples.size() >= 2, ErrorKind::InvalidArgument,
          "tabulated potential needs at least two samples");
  return Grid(tab.samples.front().z, tab.samples.back().z, policy.n_points);
}

/// Lowest `n_states` eigenpairs of -(hbar^2/2m) d^2/dz^2 + V(z) using the
/// three-point Laplacian on `grid`, with psi = 0 at both grid ends and at
/// every hard-wall sample.
inline Spectrum solve_spectrum(const PotentialSpec& spec, const PhysicalConstants& c,
                               const Grid& grid, int n_states) {
  require(n_states >= 1, ErrorKind::InvalidArgument, "n_states must be >= 1");
  validate(c);
  validate(spec);

  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const double hop = c.kinetic() / (h * h);  // energy unit of the scaled matrix

  std::vector<double> v(n);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = eval_potential(spec, c, grid[i]);
    if (i > 0 && i + 1 < n && !is_hard_wall(v[i])) active.push_back(i);
  }
  require(active.size() >= static_cast<std::size_t>(n_states), ErrorKind::DomainTruncation,
          "grid has fewer interior points than requested states");

  tridiag::SymmetricTridiagonal<double> t;
  t.diag.resize(active.size());
  t.off.assign(active.size() - 1, 0.0);
  for (std::size_t k = 0; k < active.size(); ++k) {
    t.diag[k] = 2.0 + v[active[k]] / hop;
    if (k + 1 < active.size() && active[k + 1] == active[k] + 1) t.off[k] = -1.0;
  }

  Spectrum out{{}, grid, spec};
  std::vector<std::vector<double>> vectors;
  for (int s = 0; s < n_states; ++s) {
    const double lambda = tridiag::bisect_eigenvalue(t, static_cast<std::size_t>(s));
    auto vec = tridiag::inverse_iteration<double>(t, lambda, vectors);

    std::vector<double> psi(n, 0.0);
    for (std::size_t k = 0; k < active.size(); ++k) psi[active[k]] = vec[k];
    const double nrm = std::sqrt(norm_squared(psi, h));
    double peak = 0;
    for (double x : psi) peak = std::max(peak, std::abs(x));
    double sign = 1.0;
    for (double x : psi) {
      if (std::abs(x) > 1e-6 * peak) {
        sign = x > 0 ? 1.0 : -1.0;
        break;
      }
    }
    for (double& x : psi) x *= sign / nrm;

    const double energy = lambda * hop;
    const std::size_t nodes = count_nodes(psi);
    if (nodes != static_cast<std::size_t>(s)) {
      throw Error(ErrorKind::SolverConsistency,
                  "state " + std::to_string(s + 1) + " has " + std::to_string(nodes) +
                      " nodes, expected " + std::to_string(s));
    }
    vectors.push_back(std::move(vec));
    out.states.push_back(EigenState{s + 1, energy, std::move(psi)});
  }

  if (is_unbounded(spec)) {
    // Highest classically allowed sample of the top state must sit well
    // below the artificial wall at z_max.
    const double e_top = out.states.back().energy;
    double turning = grid.z_min();
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_hard_wall(v[i]) && v[i] <= e_top) turning = grid[i];
    }
    const double limit = grid.z_min() + 0.8 * (grid.z_max() - grid.z_min());
    if (turning >= limit) {
      throw Error(ErrorKind::DomainTruncation,
                  "turning point of state " + std::to_string(n_states) + " at " +
                      std::to_string(to_um(turning)) + " um is within 20% of z_max = " +
                      std::to_string(to_um(grid.z_max())) + " um");
    }
  }
  return out;
}

inline Spectrum solve_spectrum(const PotentialSpec& spec, const PhysicalConstants& c,
                               int n_states, const GridPolicy& policy = {}) {
  return solve_spectrum(spec, c, default_grid(spec, c, n_states, policy), n_states);
}

}  // namespace bouncer
