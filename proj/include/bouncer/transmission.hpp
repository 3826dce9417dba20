#pragma once

// Geometric absorption calculus: the probability weight of a bound state
// inside the absorber, the per-length attenuation it implies, and the
// exponential count decay along the cavity.

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "bouncer/eigensolver.hpp"
#include "bouncer/error.hpp"
#include "bouncer/potential.hpp"

namespace bouncer {

struct ConstantDensity {
  double value = 0.3;
};

/// scale * (z / 1 um)^exponent.
struct PowerLawDensity {
  double scale;
  double exponent;
};

using EntranceDensity = std::variant<ConstantDensity, PowerLawDensity>;

inline double entrance_density(const EntranceDensity& model, double slit) {
  return std::visit(
      [slit](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantDensity>) {
          return m.value;
        } else {
          return m.scale * std::pow(to_um(slit), m.exponent);
        }
      },
      model);
}

struct AbsorberModel {
  double delta_x;        // m
  double cavity_length;  // m
  EntranceDensity n_max = ConstantDensity{};

  double n_max_at(double slit) const { return entrance_density(n_max, slit); }
};

inline void validate(const AbsorberModel& m) {
  require(m.delta_x > 0 && std::isfinite(m.delta_x), ErrorKind::InvalidArgument,
          "absorber delta_x must be positive");
  require(m.cavity_length > 0 && std::isfinite(m.cavity_length), ErrorKind::InvalidArgument,
          "cavity length must be positive");
  require(m.delta_x <= m.cavity_length, ErrorKind::InvalidArgument,
          "absorber delta_x must not exceed the cavity length");
  if (const auto* c = std::get_if<ConstantDensity>(&m.n_max)) {
    require(c->value >= 0, ErrorKind::InvalidArgument, "entrance density must be >= 0");
  } else {
    const auto& p = std::get<PowerLawDensity>(m.n_max);
    require(p.scale >= 0 && std::isfinite(p.exponent), ErrorKind::InvalidArgument,
            "power-law entrance density needs scale >= 0 and a finite exponent");
  }
}

struct OverlapResult {
  double slit;                 // m
  std::vector<double> areas;   // per state, in [0, 1]
  double combined = 0;         // population-weighted sum, 0 when no weights given
};

/// Trapezoidal weight of |psi|^2 on [z_boundary, z_max]. A boundary that
/// falls inside a cell contributes the linearly interpolated partial cell.
inline double absorber_overlap(const EigenState& state, const Grid& grid, double z_boundary) {
  if (!grid.contains(z_boundary)) {
    throw Error(ErrorKind::OutOfDomain,
                "absorber boundary " + std::to_string(to_um(z_boundary)) +
                    " um lies outside the grid");
  }
  require(state.psi.size() == grid.size(), ErrorKind::InvalidArgument,
          "state and grid sizes differ");
  if (z_boundary >= grid.z_max()) return 0.0;
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  auto density = [&](std::size_t i) { return state.psi[i] * state.psi[i]; };

  std::size_t cell = static_cast<std::size_t>(std::floor((z_boundary - grid.z_min()) / h));
  cell = std::min(cell, n - 2);
  double area = 0;
  {
    const double frac = std::clamp((z_boundary - grid[cell]) / h, 0.0, 1.0);
    const double d_lo = density(cell);
    const double d_hi = density(cell + 1);
    const double d_cut = d_lo + frac * (d_hi - d_lo);
    area += 0.5 * (d_cut + d_hi) * (1.0 - frac) * h;
  }
  for (std::size_t i = cell + 1; i + 1 < n; ++i) area += 0.5 * (density(i) + density(i + 1)) * h;
  return std::clamp(area, 0.0, 1.0);
}

/// Fraction absorbed over one step: 1 - exp(-k delta_x).
inline double absorption_fraction(double k, double delta_x) {
  require(k >= 0, ErrorKind::InvalidArgument, "attenuation k must be >= 0");
  require(delta_x > 0, ErrorKind::InvalidArgument, "delta_x must be positive");
  return -std::expm1(-k * delta_x);
}

/// N(x) = n_max exp(-k x).
inline double transmitted_count(double n_max, double k, double x) {
  require(n_max >= 0 && k >= 0 && x >= 0, ErrorKind::InvalidArgument,
          "transmitted_count needs n_max, k, x >= 0");
  return n_max * std::exp(-k * x);
}

/// k = -ln(n_out / n_max) / L.
inline double infer_k(double n_out, double n_max, double cavity_length) {
  require(cavity_length > 0, ErrorKind::InvalidArgument, "cavity length must be positive");
  if (n_out <= 0) {
    throw Error(ErrorKind::InfiniteAttenuation, "zero output count implies infinite attenuation");
  }
  if (n_out > n_max) {
    throw Error(ErrorKind::InconsistentData, "output count exceeds entrance density");
  }
  return -std::log(n_out / n_max) / cavity_length;
}

/// Inverse of absorption_fraction: k = -ln(1 - area) / delta_x.
inline double k_from_overlap(double area, double delta_x) {
  require(delta_x > 0, ErrorKind::InvalidArgument, "delta_x must be positive");
  require(area >= 0, ErrorKind::InvalidArgument, "overlap area must be >= 0");
  if (area >= 1) throw Error(ErrorKind::TotalAbsorption, "overlap area of 1 absorbs everything");
  return -std::log1p(-area) / delta_x;
}

}  // namespace bouncer
