#pragma once

// Throughput curves, mixed-state densities, slit scans and the two fits
// (level populations, threshold curve) against measured counts.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "bouncer/eigensolver.hpp"
#include "bouncer/error.hpp"
#include "bouncer/potential.hpp"
#include "bouncer/transmission.hpp"

namespace bouncer {

inline constexpr std::size_t kLevels = 4;

/// Convex weights of the four lowest states.
class PopulationWeights {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit PopulationWeights(const std::array<double, kLevels>& c) : c_(c) {
    double sum = 0;
    for (double v : c_) {
      require(v >= 0 && std::isfinite(v), ErrorKind::InvalidArgument,
              "population weights must be non-negative");
      sum += v;
    }
    require(std::abs(sum - 1.0) <= kSumTolerance, ErrorKind::InvalidArgument,
            "population weights must sum to 1");
  }

  /// Rescales non-negative raw weights onto the simplex.
  static PopulationWeights normalized(std::array<double, kLevels> raw) {
    double sum = 0;
    for (double& v : raw) {
      require(v >= 0 && std::isfinite(v), ErrorKind::InvalidArgument,
              "population weights must be non-negative");
      sum += v;
    }
    require(sum > 0, ErrorKind::InvalidArgument, "population weights must not all be zero");
    for (double& v : raw) v /= sum;
    return PopulationWeights(raw);
  }

  static PopulationWeights ground_state() { return PopulationWeights({1.0, 0.0, 0.0, 0.0}); }

  double operator[](std::size_t i) const { return c_[i]; }
  const std::array<double, kLevels>& values() const { return c_; }
  std::size_t size() const { return kLevels; }

 private:
  std::array<double, kLevels> c_;
};

struct DataRow {
  double z;        // m
  double n_out;
  double sigma = 1.0;
};

struct ExperimentalDataset {
  std::vector<DataRow> rows;
};

inline void validate(const ExperimentalDataset& d) {
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const auto& r = d.rows[i];
    require(std::isfinite(r.z) && std::isfinite(r.n_out), ErrorKind::InvalidArgument,
            "dataset values must be finite");
    require(r.n_out >= 0, ErrorKind::InvalidArgument, "dataset counts must be >= 0");
    require(r.sigma > 0 && std::isfinite(r.sigma), ErrorKind::InvalidArgument,
            "dataset uncertainties must be positive");
    if (i > 0) {
      require(r.z > d.rows[i - 1].z, ErrorKind::InvalidArgument,
              "dataset slit widths must be strictly increasing");
    }
  }
}

struct CurveParams {
  double scale;
  double z0;  // m
};

/// scale * z^1.5.
inline double classical_curve(double z, double scale) {
  require(z >= 0, ErrorKind::InvalidArgument, "slit width must be >= 0");
  return scale * z * std::sqrt(z);
}

/// scale * (z - z0)^1.5 above the threshold, exactly 0 at or below it.
inline double thresholded_curve(double z, double z0, double scale) {
  require(z >= 0 && z0 >= 0, ErrorKind::InvalidArgument, "slit width and z0 must be >= 0");
  if (z <= z0) return 0.0;
  const double d = z - z0;
  return scale * d * std::sqrt(d);
}

namespace detail {

inline std::vector<double> mixed_density_impl(const Spectrum& spectrum,
                                              const PopulationWeights& weights,
                                              int fourth_power) {
  if (spectrum.states.size() < weights.size()) {
    throw Error(ErrorKind::Arity, "mixed density needs " + std::to_string(weights.size()) +
                                      " states, spectrum has " +
                                      std::to_string(spectrum.states.size()));
  }
  std::vector<double> rho(spectrum.grid.size(), 0.0);
  for (std::size_t s = 0; s < weights.size(); ++s) {
    const auto& psi = spectrum.states[s].psi;
    const int power = s + 1 == kLevels ? fourth_power : 2;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      rho[i] += weights[s] * std::pow(std::abs(psi[i]), power);
    }
  }
  return rho;
}

}  // namespace detail

/// Pointwise sum C_i |psi_i|^2 over the four lowest states.
inline std::vector<double> mixed_density(const Spectrum& spectrum,
                                         const PopulationWeights& weights) {
  return detail::mixed_density_impl(spectrum, weights, 2);
}

/// Slit-tracking absorber: the Wood-Saxon midpoint sits at the slit width.
struct ScanSetup {
  PhysicalConstants constants{};
  double v0 = from_peV(1.5);
  double diffuseness = from_um(1.0);
  GridPolicy grid{};
  /// Overrides the policy's z_max when set.
  std::optional<double> z_max{};
  bool parallel = true;

  PotentialSpec potential_for(double slit) const {
    return GravityWithAbsorber{slit, WoodSaxonParams{v0, slit, diffuseness}};
  }
};

struct ScanRow {
  double slit;  // m
  std::array<double, kLevels> energy{};  // J
  std::array<double, kLevels> area{};
  std::array<double, kLevels> k{};  // 1/m
  double n_max = 0;
  double n_out = 0;

  /// exp(-k_i L) per state; N_out = n_max * sum C_i transmission_i.
  std::array<double, kLevels> transmission{};
};

struct ScanResult {
  std::vector<ScanRow> rows;
  /// Human-readable notes for rows breaking the expected monotonic trends.
  std::vector<std::string> warnings;
};

namespace detail {

inline ScanRow scan_row(const ScanSetup& setup, const AbsorberModel& absorber,
                        const PopulationWeights& weights, double slit) {
  try {
    const PotentialSpec spec = setup.potential_for(slit);
    Grid grid = default_grid(spec, setup.constants, static_cast<int>(kLevels), setup.grid);
    if (setup.z_max) grid = Grid(0.0, *setup.z_max, setup.grid.n_points);
    const Spectrum sp = solve_spectrum(spec, setup.constants, grid, static_cast<int>(kLevels));

    ScanRow row;
    row.slit = slit;
    row.n_max = absorber.n_max_at(slit);
    double sum = 0;
    for (std::size_t s = 0; s < kLevels; ++s) {
      row.energy[s] = sp.states[s].energy;
      row.area[s] = absorber_overlap(sp.states[s], sp.grid, slit);
      row.k[s] = k_from_overlap(row.area[s], absorber.delta_x);
      row.transmission[s] = std::exp(-row.k[s] * absorber.cavity_length);
      sum += weights[s] * row.transmission[s];
    }
    row.n_out = row.n_max * sum;
    return row;
  } catch (const Error& e) {
    throw Error(e.kind(), "slit " + std::to_string(to_um(slit)) + " um: " + e.what());
  }
}

}  // namespace detail

/// N_out(z) = N_max(z) sum_i C_i exp(-k_i(z) L) for each slit width, where
/// k_i follows from the overlap of state i with the region above the slit.
inline ScanResult predict_scan(const ScanSetup& setup, const AbsorberModel& absorber,
                               const PopulationWeights& weights,
                               const std::vector<double>& slits) {
  validate(absorber);
  require(!slits.empty(), ErrorKind::InvalidArgument, "slit list must not be empty");
  for (std::size_t i = 0; i < slits.size(); ++i) {
    require(slits[i] > 0, ErrorKind::InvalidArgument, "slit widths must be positive");
    if (i > 0) {
      require(slits[i] > slits[i - 1], ErrorKind::InvalidArgument,
              "slit widths must be increasing");
    }
  }

  ScanResult result;
  result.rows.resize(slits.size());
  if (setup.parallel && slits.size() > 1) {
    const std::size_t batch = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < slits.size(); start += batch) {
      const std::size_t stop = std::min(slits.size(), start + batch);
      std::vector<std::future<ScanRow>> jobs;
      for (std::size_t i = start; i < stop; ++i) {
        jobs.push_back(std::async(std::launch::async, detail::scan_row, std::cref(setup),
                                  std::cref(absorber), std::cref(weights), slits[i]));
      }
      // get() in slit order so the first failing slit is the one reported.
      for (std::size_t i = start; i < stop; ++i) result.rows[i] = jobs[i - start].get();
    }
  } else {
    for (std::size_t i = 0; i < slits.size(); ++i) {
      result.rows[i] = detail::scan_row(setup, absorber, weights, slits[i]);
    }
  }

  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& row = result.rows[i];
    for (std::size_t s = 1; s < kLevels; ++s) {
      if (!(row.area[s] > row.area[s - 1])) {
        result.warnings.push_back("slit " + std::to_string(to_um(row.slit)) + " um: A" +
                                  std::to_string(s + 1) + " <= A" + std::to_string(s));
      }
    }
    if (i > 0 && row.n_out < result.rows[i - 1].n_out) {
      result.warnings.push_back("slit " + std::to_string(to_um(row.slit)) +
                                " um: N_out decreased relative to the previous slit");
    }
  }
  return result;
}

/// Model counts at the dataset's slit widths for given populations.
using PopulationPredictor = std::function<std::vector<double>(const PopulationWeights&)>;

/// Runs the scan once and returns a predictor that re-weights the cached
/// per-state transmissions.
inline PopulationPredictor make_scan_predictor(const ScanSetup& setup,
                                               const AbsorberModel& absorber,
                                               const std::vector<double>& slits) {
  auto scan = predict_scan(setup, absorber, PopulationWeights::ground_state(), slits);
  return [rows = std::move(scan.rows)](const PopulationWeights& c) {
    std::vector<double> out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      double sum = 0;
      for (std::size_t s = 0; s < kLevels; ++s) sum += c[s] * rows[r].transmission[s];
      out[r] = rows[r].n_max * sum;
    }
    return out;
  };
}

struct PopulationFit {
  PopulationWeights weights;
  double residual;  // sum ((model - data) / sigma)^2
};

namespace detail {

inline void require_fittable(const ExperimentalDataset& data, std::size_t min_rows) {
  validate(data);
  if (data.rows.size() < min_rows) {
    throw Error(ErrorKind::UnfittableData, "fit needs at least " + std::to_string(min_rows) +
                                               " data rows, got " +
                                               std::to_string(data.rows.size()));
  }
  const bool all_zero =
      std::all_of(data.rows.begin(), data.rows.end(), [](const DataRow& r) { return r.n_out == 0; });
  if (all_zero) throw Error(ErrorKind::UnfittableData, "all measured counts are zero");
}

// Quadratic form of the weighted least-squares objective in C:
// f(c) = c'Qc - 2 b'c + y'Wy.
struct Quadratic {
  std::array<std::array<double, kLevels>, kLevels> q{};
  std::array<double, kLevels> b{};
  double yy = 0;

  double value(const std::array<double, kLevels>& c) const {
    double f = yy;
    for (std::size_t i = 0; i < kLevels; ++i) {
      f -= 2 * b[i] * c[i];
      for (std::size_t j = 0; j < kLevels; ++j) f += c[i] * q[i][j] * c[j];
    }
    return f;
  }

  std::array<double, kLevels> gradient(const std::array<double, kLevels>& c) const {
    std::array<double, kLevels> g{};
    for (std::size_t i = 0; i < kLevels; ++i) {
      g[i] = -2 * b[i];
      for (std::size_t j = 0; j < kLevels; ++j) g[i] += 2 * q[i][j] * c[j];
    }
    return g;
  }
};

// Pairwise mass transfer with exact line search keeps every iterate on the
// simplex.
inline std::array<double, kLevels> coordinate_descent(const Quadratic& f,
                                                      std::array<double, kLevels> c,
                                                      int max_sweeps = 200000) {
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0;
    for (std::size_t i = 0; i < kLevels; ++i) {
      for (std::size_t j = i + 1; j < kLevels; ++j) {
        const auto g = f.gradient(c);
        const double curvature = 2 * (f.q[i][i] + f.q[j][j] - 2 * f.q[i][j]);
        const double slope = g[i] - g[j];
        double t;
        if (curvature > 0) {
          t = -slope / curvature;
        } else {
          t = slope < 0 ? c[j] : -c[i];
        }
        t = std::clamp(t, -c[i], c[j]);
        c[i] += t;
        c[j] -= t;
        if (c[i] < 0) c[i] = 0;
        if (c[j] < 0) c[j] = 0;
        moved = std::max(moved, std::abs(t));
      }
    }
    if (moved < 1e-15) break;
  }
  return c;
}

}  // namespace detail

/// Least-squares level populations over the simplex {C_i >= 0, sum C_i = 1}.
/// The predictor must be affine in C (true for the scan model), so it is
/// sampled once per simplex vertex; minimisation is projected coordinate
/// descent from eight fixed starting points.
inline PopulationFit fit_populations(const ExperimentalDataset& data,
                                     const PopulationPredictor& predictor) {
  detail::require_fittable(data, kLevels);
  const std::size_t n = data.rows.size();

  std::array<std::vector<double>, kLevels> basis;
  for (std::size_t s = 0; s < kLevels; ++s) {
    std::array<double, kLevels> e{};
    e[s] = 1.0;
    basis[s] = predictor(PopulationWeights(e));
    require(basis[s].size() == n, ErrorKind::Arity,
            "predictor returned a different number of rows than the dataset");
  }

  detail::Quadratic f;
  for (std::size_t r = 0; r < n; ++r) {
    const double w = 1.0 / (data.rows[r].sigma * data.rows[r].sigma);
    const double y = data.rows[r].n_out;
    f.yy += w * y * y;
    for (std::size_t i = 0; i < kLevels; ++i) {
      f.b[i] += w * basis[i][r] * y;
      for (std::size_t j = 0; j < kLevels; ++j) f.q[i][j] += w * basis[i][r] * basis[j][r];
    }
  }

  static constexpr std::array<std::array<double, kLevels>, 8> kStarts = {{
      {1.0, 0.0, 0.0, 0.0},
      {0.0, 1.0, 0.0, 0.0},
      {0.0, 0.0, 1.0, 0.0},
      {0.0, 0.0, 0.0, 1.0},
      {0.25, 0.25, 0.25, 0.25},
      {0.5, 0.5, 0.0, 0.0},
      {0.0, 0.0, 0.5, 0.5},
      {0.4, 0.3, 0.2, 0.1},
  }};
  std::array<double, kLevels> best{};
  double best_value = std::numeric_limits<double>::infinity();
  for (const auto& start : kStarts) {
    const auto c = detail::coordinate_descent(f, start);
    const double v = f.value(c);
    if (v < best_value) {
      best_value = v;
      best = c;
    }
  }

  auto weights = PopulationWeights::normalized(best);
  const auto model = predictor(weights);
  double residual = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const double d = (model[r] - data.rows[r].n_out) / data.rows[r].sigma;
    residual += d * d;
  }
  return {weights, residual};
}

struct ThresholdFit {
  CurveParams params;
  double residual;
  double resolution;  // z0 scan step, m
};

/// Least-squares (scale, z0) for the thresholded curve: z0 is scanned on a
/// uniform grid over [z_lo, max z] and the scale solved in closed form at
/// each step. z_lo is the largest slit width below which every count is zero.
inline ThresholdFit fit_threshold_curve(const ExperimentalDataset& data,
                                        double resolution = from_um(0.01)) {
  detail::require_fittable(data, 3);
  require(resolution > 0, ErrorKind::InvalidArgument, "z0 scan resolution must be positive");
  const auto& rows = data.rows;

  double z_lo = 0;
  for (const auto& r : rows) {
    if (r.n_out != 0) break;
    z_lo = r.z;
  }
  const double z_hi = rows.back().z;

  ThresholdFit best{{0.0, z_lo}, std::numeric_limits<double>::infinity(), resolution};
  const auto steps = static_cast<std::size_t>(std::ceil((z_hi - z_lo) / resolution));
  for (std::size_t k = 0; k <= steps; ++k) {
    const double z0 = std::min(z_hi, z_lo + static_cast<double>(k) * resolution);
    double fy = 0;
    double ff = 0;
    for (const auto& r : rows) {
      const double w = 1.0 / (r.sigma * r.sigma);
      const double basis = thresholded_curve(r.z, z0, 1.0);
      fy += w * basis * r.n_out;
      ff += w * basis * basis;
    }
    const double scale = ff > 0 ? fy / ff : 0.0;
    double residual = 0;
    for (const auto& r : rows) {
      const double d = (thresholded_curve(r.z, z0, scale) - r.n_out) / r.sigma;
      residual += d * d;
    }
    if (residual < best.residual) best = {{scale, z0}, residual, resolution};
  }
  return best;
}

}  // namespace bouncer
