#pragma once

// Scenario orchestration for the command-line tool.

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "bouncer/analysis.hpp"
#include "bouncer/config.hpp"
#include "bouncer/dataset.hpp"
#include "bouncer/eigensolver.hpp"
#include "bouncer/error.hpp"
#include "bouncer/output.hpp"
#include "bouncer/transmission.hpp"

namespace bouncer {

inline const std::vector<std::string> kScanHeader = {
    "slit_um", "E1_peV",   "E2_peV",   "E3_peV",   "E4_peV",   "A1",    "A2",
    "A3",      "A4",       "k1_percm", "k2_percm", "k3_percm", "k4_percm", "N_out"};

inline CsvTable scan_table(const ScanResult& scan) {
  CsvTable t(kScanHeader);
  for (const auto& r : scan.rows) {
    std::vector<double> v{to_um(r.slit)};
    for (double e : r.energy) v.push_back(to_peV(e));
    for (double a : r.area) v.push_back(a);
    for (double k : r.k) v.push_back(k * kMetrePerCm);
    v.push_back(r.n_out);
    t.row(v);
  }
  return t;
}

/// The numbers behind the appendix comparison, recomputed from its inputs.
struct AppendixChain {
  double delta_x;             // m, -ln(1 - A) / k
  double delta_x_deviation;   // relative to the published delta_x
  double n_out;               // transmitted count over the cavity
  double k_roundtrip;         // infer_k applied to n_out, 1/m
  double k_roundtrip_error;   // relative
  double area_from_published_delta_x;  // 1 - exp(-k delta_x_published)
  double area_deviation;      // relative to the published A
};

inline AppendixChain appendix_chain(const AppendixReference& ref) {
  AppendixChain c{};
  c.delta_x = k_from_overlap(ref.area, 1.0) / ref.k;
  c.delta_x_deviation = (c.delta_x - ref.delta_x) / ref.delta_x;
  c.n_out = transmitted_count(ref.n_max, ref.k, ref.cavity_length);
  c.k_roundtrip = infer_k(c.n_out, ref.n_max, ref.cavity_length);
  c.k_roundtrip_error = std::abs(c.k_roundtrip - ref.k) / ref.k;
  c.area_from_published_delta_x = absorption_fraction(ref.k, ref.delta_x);
  c.area_deviation = (c.area_from_published_delta_x - ref.area) / ref.area;
  return c;
}

namespace detail {

inline Grid scenario_grid(const RunConfig& cfg, const PotentialSpec& spec) {
  Grid grid = default_grid(spec, cfg.constants, cfg.n_states, cfg.grid);
  if (cfg.z_max && is_unbounded(spec)) grid = Grid(0.0, *cfg.z_max, cfg.grid.n_points);
  return grid;
}

inline double closed_form_energy(const RunConfig& cfg, int n) {
  switch (cfg.potential.kind) {
    case PotentialKind::Box: return box_eigenvalue_analytic(n, cfg.potential.box_width, cfg.constants);
    case PotentialKind::Gravity:
      if (n <= static_cast<int>(kAiryZeros.size())) return gravity_eigenvalue_analytic(n, cfg.constants);
      break;
    default: break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline void run_spectrum(const RunConfig& cfg, ArtifactSet& files, std::ostream& out) {
  const PotentialSpec spec = cfg.potential_spec();
  const Spectrum sp = solve_spectrum(spec, cfg.constants, scenario_grid(cfg, spec), cfg.n_states);

  CsvTable table({"E_peV", "n", "reference_peV", "rel_deviation"});
  out << "n  E [peV]        reference [peV]\n";
  for (const auto& s : sp.states) {
    const double ref = closed_form_energy(cfg, s.index);
    const double dev = (s.energy - ref) / ref;
    table.row({to_peV(s.energy), static_cast<double>(s.index), to_peV(ref), dev});
    out << s.index << "  " << format_number(to_peV(s.energy)) << "  "
        << format_number(to_peV(ref)) << '\n';
  }
  files.add("spectrum.csv", table.str());

  std::vector<std::string> header{"z_um"};
  for (const auto& s : sp.states) header.push_back("psi" + std::to_string(s.index));
  CsvTable psi(header);
  const double to_sqrt_um = std::sqrt(kMetrePerMicron);
  for (std::size_t i = 0; i < sp.grid.size(); ++i) {
    std::vector<double> row{to_um(sp.grid[i])};
    for (const auto& s : sp.states) row.push_back(s.psi[i] * to_sqrt_um);
    psi.row(row);
  }
  files.add("wavefunctions.csv", psi.str());
}

inline void run_scan(const RunConfig& cfg, ArtifactSet& files, std::ostream& out,
                     std::ostream& err) {
  const ScanResult scan = predict_scan(cfg.scan_setup(), cfg.absorber, cfg.weights, cfg.slits);
  files.add("scan.csv", scan_table(scan).str());
  for (const auto& w : scan.warnings) err << "warning: " << w << '\n';

  PlotSeries model{"model N_out", "#1f4e9c", {}, false, true};
  for (const auto& r : scan.rows) model.points.emplace_back(to_um(r.slit), r.n_out);
  const auto& last = scan.rows.back();
  const double z_end = to_um(last.slit);
  const double z0 = to_um(cfg.constants.turning_height(gravity_eigenvalue_analytic(1, cfg.constants)));
  PlotSeries classical{"z^1.5", "#888888", {}, true, false};
  PlotSeries threshold{"(z - z0)^1.5", "#c0392b", {}, true, false};
  const double classical_scale = last.n_out / classical_curve(z_end, 1.0);
  const double threshold_norm = thresholded_curve(z_end, z0, 1.0);
  const double threshold_scale = threshold_norm > 0 ? last.n_out / threshold_norm : 0.0;
  const double z_start = to_um(scan.rows.front().slit);
  for (int i = 0; i <= 200; ++i) {
    const double z = z_start + (z_end - z_start) * i / 200.0;
    classical.points.emplace_back(z, classical_curve(z, classical_scale));
    threshold.points.emplace_back(z, thresholded_curve(z, z0, threshold_scale));
  }
  files.add("scan.svg", render_svg("Transmitted neutrons vs slit width", "slit width [um]",
                                   "N_out", {model, classical, threshold}));

  out << "slit [um]  A1  N_out\n";
  for (const auto& r : scan.rows) {
    out << format_number(to_um(r.slit)) << "  " << format_number(r.area[0]) << "  "
        << format_number(r.n_out) << '\n';
  }
}

inline void run_fit(const RunConfig& cfg, ArtifactSet& files, std::ostream& out) {
  const ExperimentalDataset data = load_dataset(*cfg.data_path);
  std::vector<double> z;
  for (const auto& r : data.rows) z.push_back(r.z);

  PlotSeries measured{"data", "#000000", {}, false, true};
  for (const auto& r : data.rows) measured.points.emplace_back(to_um(r.z), r.n_out);
  PlotSeries fitted{"fit", "#c0392b", {}, false, false};
  CsvTable params({"parameter", "value"});
  CsvTable curve({"slit_um", "n_out_data", "n_out_model"});

  if (cfg.fit_target == FitTarget::Populations) {
    const auto predictor = make_scan_predictor(cfg.scan_setup(), cfg.absorber, z);
    const PopulationFit fit = fit_populations(data, predictor);
    const auto model = predictor(fit.weights);
    for (std::size_t i = 0; i < kLevels; ++i) {
      params.row({"C" + std::to_string(i + 1), format_number(fit.weights[i])});
    }
    params.row({"residual", format_number(fit.residual)});
    for (std::size_t r = 0; r < data.rows.size(); ++r) {
      curve.row({to_um(z[r]), data.rows[r].n_out, model[r]});
      fitted.points.emplace_back(to_um(z[r]), model[r]);
    }
    out << "C = (" << format_number(fit.weights[0]) << ", " << format_number(fit.weights[1])
        << ", " << format_number(fit.weights[2]) << ", " << format_number(fit.weights[3])
        << ")  residual = " << format_number(fit.residual) << '\n';
  } else {
    const ThresholdFit fit = fit_threshold_curve(data, cfg.z0_resolution);
    // Scale reported per um^1.5 to match the um slit axis.
    const double scale_um = fit.params.scale * std::pow(kMetrePerMicron, 1.5);
    params.row({"scale_per_um1.5", format_number(scale_um)});
    params.row({"z0_um", format_number(to_um(fit.params.z0))});
    params.row({"residual", format_number(fit.residual)});
    params.row({"z0_resolution_um", format_number(to_um(fit.resolution))});
    for (const auto& r : data.rows) {
      curve.row({to_um(r.z), r.n_out, thresholded_curve(r.z, fit.params.z0, fit.params.scale)});
    }
    const double z_hi = data.rows.back().z;
    for (int i = 0; i <= 200; ++i) {
      const double zz = z_hi * i / 200.0;
      fitted.points.emplace_back(to_um(zz), thresholded_curve(zz, fit.params.z0, fit.params.scale));
    }
    out << "z0 = " << format_number(to_um(fit.params.z0)) << " um  scale = "
        << format_number(scale_um) << " per um^1.5  residual = " << format_number(fit.residual)
        << '\n';
  }
  files.add("fit.csv", params.str());
  files.add("fit_curve.csv", curve.str());
  files.add("fit.svg", render_svg("Fit to measured counts", "slit width [um]", "N_out",
                                  {measured, fitted}));
}

inline void run_appendix(const RunConfig& cfg, ArtifactSet& files, std::ostream& out) {
  const auto& ref = cfg.appendix;
  const AppendixChain chain = appendix_chain(ref);

  CsvTable table({"quantity", "value", "published", "rel_deviation"});
  auto add = [&](const std::string& name, double value, double published) {
    const double dev = std::isnan(published) ? published : (value - published) / published;
    table.row({name, format_number(value), format_number(published), format_number(dev)});
    out << name << " = " << format_number(value);
    if (!std::isnan(published)) {
      out << "  (published " << format_number(published) << ", deviation "
          << format_number(100.0 * dev) << " %)";
    }
    out << '\n';
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();

  out << "A -> k -> delta_x -> N_out chain from the published inputs\n";
  add("delta_x_cm", to_cm(chain.delta_x), to_cm(ref.delta_x));
  add("N_out", chain.n_out, nan);
  add("k_roundtrip_percm", chain.k_roundtrip * kMetrePerCm, ref.k * kMetrePerCm);
  add("area_from_published_delta_x", chain.area_from_published_delta_x, ref.area);

  // Same chain driven by this model's own ground-state overlaps.
  std::vector<std::pair<double, double>> targets{{ref.slit, ref.area}};
  for (const auto& p : ref.simulated_areas) targets.push_back(p);
  std::vector<double> slits;
  for (const auto& [z, a] : targets) slits.push_back(z);
  AbsorberModel absorber = cfg.absorber;
  absorber.cavity_length = ref.cavity_length;
  absorber.n_max = ConstantDensity{ref.n_max};
  const ScanResult scan =
      predict_scan(cfg.scan_setup(), absorber, PopulationWeights::ground_state(), slits);
  out << "ground-state overlaps from the Wood-Saxon absorber model\n";
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& row = scan.rows[i];
    const std::string tag = format_number(to_um(row.slit)) + "um";
    add("model_A1_" + tag, row.area[0], targets[i].second);
    add("model_k1_percm_" + tag, row.k[0] * kMetrePerCm, i == 0 ? ref.k * kMetrePerCm : nan);
    add("model_N_out_" + tag, row.n_out, i == 0 ? chain.n_out : nan);
  }
  files.add("appendix.csv", table.str());
  files.add("appendix_scan.csv", scan_table(scan).str());
}

}  // namespace detail

/// Runs one scenario and writes its artifacts under cfg.out_dir. Returns
/// the process exit status; failures are reported on `err` as a single
/// `error kind=... exit=... message=...` line.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    ArtifactSet files;
    switch (cfg.scenario) {
      case Scenario::Spectrum: detail::run_spectrum(cfg, files, out); break;
      case Scenario::Scan: detail::run_scan(cfg, files, out, err); break;
      case Scenario::Fit: detail::run_fit(cfg, files, out); break;
      case Scenario::Appendix: detail::run_appendix(cfg, files, out); break;
    }
    for (const auto& p : files.write(cfg.out_dir)) out << "wrote " << p.string() << '\n';
    return 0;
  } catch (const Error& e) {
    std::string msg = e.what();
    for (auto& ch : msg) {
      if (ch == '\n') ch = ';';
    }
    err << "error kind=" << to_string(e.kind()) << " exit=" << exit_code(e.kind())
        << " message=\"" << msg << "\"\n";
    return exit_code(e.kind());
  }
}

}  // namespace bouncer
