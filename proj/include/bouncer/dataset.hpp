#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bouncer/analysis.hpp"
#include "bouncer/config.hpp"
#include "bouncer/error.hpp"

namespace bouncer {

/// Reads `z_um,n_out[,sigma]` CSV text. Blank and `#` lines are skipped;
/// rows come back sorted by slit width (stable) and duplicate widths are
/// rejected. Missing sigma defaults to 1.
inline ExperimentalDataset parse_dataset(std::istream& in, const std::string& origin = "dataset") {
  ExperimentalDataset data;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  bool with_sigma = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = detail::split(t, ',');
    if (!header_seen) {
      header_seen = true;
      if (cells.size() == 2 && cells[0] == "z_um" && cells[1] == "n_out") continue;
      if (cells.size() == 3 && cells[0] == "z_um" && cells[1] == "n_out" && cells[2] == "sigma") {
        with_sigma = true;
        continue;
      }
      throw Error(ErrorKind::Parse, origin + ": line " + std::to_string(lineno) +
                                        ": expected header 'z_um,n_out' or 'z_um,n_out,sigma'");
    }
    const std::string where = origin + ": row at line " + std::to_string(lineno);
    if (cells.size() != (with_sigma ? 3u : 2u)) {
      throw Error(ErrorKind::Parse, where + ": wrong number of columns");
    }
    auto z = detail::parse_double(cells[0]);
    auto n = detail::parse_double(cells[1]);
    std::optional<double> sigma = 1.0;
    if (with_sigma) sigma = detail::parse_double(cells[2]);
    if (!z || !n || !sigma) throw Error(ErrorKind::Parse, where + ": not a number");
    if (*z <= 0) throw Error(ErrorKind::Parse, where + ": slit width must be > 0");
    if (*n < 0) throw Error(ErrorKind::Parse, where + ": count must be >= 0");
    if (*sigma <= 0) throw Error(ErrorKind::Parse, where + ": sigma must be > 0");
    data.rows.push_back({from_um(*z), *n, *sigma});
  }
  if (!header_seen) throw Error(ErrorKind::Parse, origin + ": empty dataset");

  std::stable_sort(data.rows.begin(), data.rows.end(),
                   [](const DataRow& a, const DataRow& b) { return a.z < b.z; });
  for (std::size_t i = 1; i < data.rows.size(); ++i) {
    if (data.rows[i].z == data.rows[i - 1].z) {
      std::ostringstream v;
      v << to_um(data.rows[i].z);
      throw Error(ErrorKind::Validation, origin + ": duplicate slit width " + v.str() + " um");
    }
  }
  return data;
}

inline ExperimentalDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read dataset " + path.string());
  return parse_dataset(in, path.string());
}

}  // namespace bouncer
