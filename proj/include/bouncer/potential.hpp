#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "bouncer/error.hpp"

namespace bouncer {

// Internal units are SI throughout. peV, µm and cm only appear at I/O.

inline constexpr double kJoulePerPeV = 1.602176634e-31;
inline constexpr double kMetrePerMicron = 1e-6;
inline constexpr double kMetrePerCm = 1e-2;

inline constexpr double to_peV(double joule) { return joule / kJoulePerPeV; }
inline constexpr double from_peV(double peV) { return peV * kJoulePerPeV; }
inline constexpr double from_um(double um) { return um * kMetrePerMicron; }
inline constexpr double to_um(double m) { return m / kMetrePerMicron; }
inline constexpr double from_cm(double cm) { return cm * kMetrePerCm; }
inline constexpr double to_cm(double m) { return m / kMetrePerCm; }

/// Potential value that marks an impenetrable wall. The eigensolver turns
/// grid points carrying it into Dirichlet rows.
inline constexpr double kHardWall = std::numeric_limits<double>::infinity();

inline bool is_hard_wall(double v) { return std::isinf(v) && v > 0; }

struct PhysicalConstants {
  double hbar = 1.054571817e-34;  // J s
  double m_n = 1.674927498e-27;   // kg
  double g = 9.80665;             // m s^-2

  static constexpr double peV_per_J = 1.0 / kJoulePerPeV;

  /// Gravitational energy scale (hbar^2 m g^2 / 2)^(1/3).
  double eps0() const { return std::cbrt(hbar * hbar * m_n * g * g / 2.0); }

  /// Matching length scale (hbar^2 / (2 m^2 g))^(1/3); eps0 = m g z0.
  double z0() const { return std::cbrt(hbar * hbar / (2.0 * m_n * m_n * g)); }

  /// hbar^2 / (2 m), the kinetic prefactor.
  double kinetic() const { return hbar * hbar / (2.0 * m_n); }

  /// Classical height reached with energy `e` above the mirror.
  double turning_height(double e) const { return e / (m_n * g); }
};

inline void validate(const PhysicalConstants& c) {
  require(c.hbar > 0 && c.m_n > 0 && c.g > 0 && std::isfinite(c.hbar) &&
              std::isfinite(c.m_n) && std::isfinite(c.g),
          ErrorKind::InvalidArgument, "physical constants must be positive and finite");
}

/// Soft absorber ceiling: v0 / (1 + exp(-(z - z_wall) / diffuseness)).
struct WoodSaxonParams {
  double v0;           // J
  double z_wall;       // m
  double diffuseness;  // m

  double operator()(double z) const {
    // Written via exp of a non-positive argument in both branches so the
    // far tails neither overflow nor lose the 0/v0 limits.
    const double t = (z - z_wall) / diffuseness;
    if (t >= 0) return v0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return v0 * e / (1.0 + e);
  }
};

inline void validate(const WoodSaxonParams& ws) {
  require(ws.v0 > 0 && std::isfinite(ws.v0), ErrorKind::InvalidArgument,
          "Wood-Saxon v0 must be positive");
  require(ws.z_wall > 0 && std::isfinite(ws.z_wall), ErrorKind::InvalidArgument,
          "Wood-Saxon z_wall must be positive");
  require(ws.diffuseness > 0 && std::isfinite(ws.diffuseness), ErrorKind::InvalidArgument,
          "Wood-Saxon diffuseness must be positive");
}

struct InfiniteBox {
  double width;  // m
};

struct GravityFloor {};

struct GravityWithAbsorber {
  double slit;  // m
  WoodSaxonParams ceiling;
};

struct TabulatedSample {
  double z;  // m
  double v;  // J
};

struct Tabulated {
  std::vector<TabulatedSample> samples;
};

using PotentialSpec = std::variant<InfiniteBox, GravityFloor, GravityWithAbsorber, Tabulated>;

inline void validate(const PotentialSpec& spec) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, InfiniteBox>) {
          require(p.width > 0 && std::isfinite(p.width), ErrorKind::InvalidArgument,
                  "box width must be positive");
        } else if constexpr (std::is_same_v<T, GravityWithAbsorber>) {
          require(p.slit > 0 && std::isfinite(p.slit), ErrorKind::InvalidArgument,
                  "slit width must be positive");
          validate(p.ceiling);
        } else if constexpr (std::is_same_v<T, Tabulated>) {
          require(p.samples.size() >= 2, ErrorKind::InvalidArgument,
                  "tabulated potential needs at least two samples");
          for (std::size_t i = 1; i < p.samples.size(); ++i) {
            require(p.samples[i].z > p.samples[i - 1].z, ErrorKind::InvalidArgument,
                    "tabulated samples must be strictly increasing in z");
          }
        }
      },
      spec);
}

/// Potential energy in joules at height `z`; kHardWall outside the allowed
/// region of box and mirror configurations.
inline double eval_potential(const PotentialSpec& spec, const PhysicalConstants& c, double z) {
  require(std::isfinite(z), ErrorKind::InvalidArgument, "eval_potential: z must be finite");
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, InfiniteBox>) {
          return (z > 0 && z < p.width) ? 0.0 : kHardWall;
        } else if constexpr (std::is_same_v<T, GravityFloor>) {
          return z < 0 ? kHardWall : c.m_n * c.g * z;
        } else if constexpr (std::is_same_v<T, GravityWithAbsorber>) {
          return z < 0 ? kHardWall : c.m_n * c.g * z + p.ceiling(z);
        } else {
          const auto& s = p.samples;
          if (s.empty() || z < s.front().z || z > s.back().z) {
            throw Error(ErrorKind::OutOfDomain,
                        "tabulated potential queried outside its sample range at z = " +
                            std::to_string(z));
          }
          auto hi = std::upper_bound(s.begin(), s.end(), z,
                                     [](double q, const TabulatedSample& t) { return q < t.z; });
          if (hi == s.end()) return s.back().v;
          auto lo = hi - 1;
          const double w = (z - lo->z) / (hi->z - lo->z);
          return lo->v + w * (hi->v - lo->v);
        }
      },
      spec);
}

/// True for potentials that grow without bound (a finite grid truncates them).
inline bool is_unbounded(const PotentialSpec& spec) {
  return std::holds_alternative<GravityFloor>(spec) ||
         std::holds_alternative<GravityWithAbsorber>(spec);
}

class Grid {
 public:
  static constexpr std::size_t kMinPoints = 16;

  Grid(double z_min, double z_max, std::size_t n_points)
      : z_min_(z_min), z_max_(z_max), n_points_(n_points) {
    require(std::isfinite(z_min) && std::isfinite(z_max) && z_max > z_min,
            ErrorKind::InvalidArgument, "grid requires z_max > z_min");
    require(n_points >= kMinPoints, ErrorKind::InvalidArgument,
            "grid requires at least 16 points");
  }

  double z_min() const { return z_min_; }
  double z_max() const { return z_max_; }
  std::size_t size() const { return n_points_; }
  double spacing() const { return (z_max_ - z_min_) / static_cast<double>(n_points_ - 1); }

  double operator[](std::size_t i) const {
    return i + 1 == n_points_ ? z_max_ : z_min_ + static_cast<double>(i) * spacing();
  }

  std::vector<double> points() const {
    std::vector<double> z(n_points_);
    for (std::size_t i = 0; i < n_points_; ++i) z[i] = (*this)[i];
    return z;
  }

  bool contains(double z) const { return z >= z_min_ && z <= z_max_; }

 private:
  double z_min_;
  double z_max_;
  std::size_t n_points_;
};

}  // namespace bouncer
