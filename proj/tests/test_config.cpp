#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "bouncer/config.hpp"
#include "bouncer/dataset.hpp"

namespace bouncer {
namespace {

std::string error_text(const std::function<void()>& f, ErrorKind expected) {
  try {
    f();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), expected) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "no error thrown";
  return {};
}

TEST(Config, MinimalSpectrumFillsDefaults) {
  const auto cfg = parse_config("scenario = spectrum\npotential.kind = gravity\nsolver.n_states = 4\n");
  EXPECT_EQ(cfg.scenario, Scenario::Spectrum);
  EXPECT_EQ(cfg.potential.kind, PotentialKind::Gravity);
  EXPECT_EQ(cfg.n_states, 4);
  EXPECT_EQ(cfg.grid.n_points, 4000u);
  EXPECT_DOUBLE_EQ(cfg.grid.z_max_factor, 4.0);
  EXPECT_DOUBLE_EQ(cfg.constants.hbar, 1.054571817e-34);
  EXPECT_DOUBLE_EQ(cfg.absorber.cavity_length, from_cm(10));
  EXPECT_TRUE(std::holds_alternative<GravityFloor>(cfg.potential_spec()));
}

TEST(Config, ZeroDeltaXNamesTheKey) {
  const auto msg = error_text([] { parse_config("# absorber\nabsorber.delta_x = 0\n"); },
                              ErrorKind::Validation);
  EXPECT_NE(msg.find("absorber.delta_x"), std::string::npos);
  EXPECT_NE(msg.find("line 2"), std::string::npos);
}

TEST(Config, ReportsEveryProblem) {
  const auto msg = error_text(
      [] { parse_config("grid.n_points = 3\npotential.v0 = -1\nbogus.key = 1\n"); },
      ErrorKind::Validation);
  EXPECT_NE(msg.find("grid.n_points"), std::string::npos);
  EXPECT_NE(msg.find("potential.v0"), std::string::npos);
  EXPECT_NE(msg.find("bogus.key: unknown key"), std::string::npos);
}

TEST(Config, AppendixDefaults) {
  const auto cfg = parse_config("scenario = appendix\n");
  EXPECT_EQ(cfg.scenario, Scenario::Appendix);
  EXPECT_DOUBLE_EQ(cfg.appendix.cavity_length, from_cm(10));
  EXPECT_DOUBLE_EQ(cfg.appendix.n_max, 0.3);
  EXPECT_DOUBLE_EQ(std::get<ConstantDensity>(cfg.absorber.n_max).value, 0.3);
  ASSERT_EQ(cfg.slits.size(), 3u);
  EXPECT_DOUBLE_EQ(to_um(cfg.slits[0]), 15);
  EXPECT_DOUBLE_EQ(to_um(cfg.slits[1]), 20);
  EXPECT_DOUBLE_EQ(to_um(cfg.slits[2]), 30);
  EXPECT_DOUBLE_EQ(cfg.appendix.area, 0.0173);
  EXPECT_NEAR(cfg.appendix.k * kMetrePerCm, 0.54991, 1e-15);
}

TEST(Config, SyntaxErrors) {
  error_text([] { parse_config("potential.kind gravity\n"); }, ErrorKind::Parse);
  error_text([] { parse_config("a = 1\na = 2\n"); }, ErrorKind::Parse);
  error_text([] { parse_config("grid.n_points = many\n"); }, ErrorKind::Validation);
  error_text([] { parse_config("scenario = dance\n"); }, ErrorKind::Validation);
}

TEST(Config, SlitRangeAndWeights) {
  const auto cfg = parse_config(
      "scan.slit_min = 10\nscan.slit_max = 20\nscan.slit_step = 2.5\npopulations.c = 0.4, 0.3, 0.2, 0.1\n");
  ASSERT_EQ(cfg.slits.size(), 5u);
  EXPECT_NEAR(to_um(cfg.slits.back()), 20, 1e-12);
  EXPECT_DOUBLE_EQ(cfg.weights[3], 0.1);
  error_text([] { parse_config("populations.c = 0.5, 0.5, 0.5, 0.5\n"); }, ErrorKind::Validation);
  error_text([] { parse_config("scan.slits = 20, 10\n"); }, ErrorKind::Validation);
}

TEST(Config, OverridesWin) {
  const auto cfg = parse_config("output.dir = a\n", "/base", {{"output.dir", "/abs/b"}});
  EXPECT_EQ(cfg.out_dir, std::filesystem::path("/abs/b"));
  const auto rel = parse_config("output.dir = a\n", "/base");
  EXPECT_EQ(rel.out_dir, std::filesystem::path("/base/a"));
}

TEST(Config, FitNeedsExistingData) {
  error_text([] { parse_config("scenario = fit\n"); }, ErrorKind::Validation);
  error_text([] { parse_config("scenario = fit\nfit.data = /no/such/file.csv\n"); },
             ErrorKind::Validation);
}

TEST(Config, TabulatedPotentialFromFile) {
  const auto dir = std::filesystem::temp_directory_path() / "bouncer_config_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "well.csv") << "z_um,V_peV\n0,5\n10,0\n20,5\n";
  const auto cfg = parse_config("potential.kind = tabulated\npotential.table = well.csv\n", dir);
  const auto spec = cfg.potential_spec();
  EXPECT_NEAR(to_peV(eval_potential(spec, cfg.constants, from_um(5))), 2.5, 1e-12);
  error_text([&] { parse_config("potential.kind = tabulated\n", dir); }, ErrorKind::Validation);
  std::filesystem::remove_all(dir);
}

TEST(Dataset, TwoRows) {
  std::istringstream in("# digitised\nz_um,n_out\n10,0.01\n20,0.1\n");
  const auto d = parse_dataset(in);
  ASSERT_EQ(d.rows.size(), 2u);
  EXPECT_DOUBLE_EQ(d.rows[1].z, from_um(20));
  EXPECT_EQ(d.rows[1].sigma, 1.0);
}

TEST(Dataset, SortsRows) {
  std::istringstream in("z_um,n_out,sigma\n30,3,0.3\n10,1,0.1\n\n20,2,0.2\n");
  const auto d = parse_dataset(in);
  ASSERT_EQ(d.rows.size(), 3u);
  EXPECT_EQ(d.rows[0].n_out, 1);
  EXPECT_EQ(d.rows[1].sigma, 0.2);
  EXPECT_EQ(d.rows[2].n_out, 3);
}

TEST(Dataset, RejectsDuplicates) {
  std::istringstream in("z_um,n_out\n12.5,1\n20,2\n12.5,3\n");
  const auto msg = error_text([&] { parse_dataset(in); }, ErrorKind::Validation);
  EXPECT_NE(msg.find("12.5"), std::string::npos);
}

TEST(Dataset, MalformedRowsNameTheLine) {
  std::istringstream bad_number("z_um,n_out\n10,1\n20,abc\n");
  EXPECT_NE(error_text([&] { parse_dataset(bad_number); }, ErrorKind::Parse).find("line 3"),
            std::string::npos);
  std::istringstream bad_width("z_um,n_out\n10,1,2\n");
  EXPECT_NE(error_text([&] { parse_dataset(bad_width); }, ErrorKind::Parse).find("line 2"),
            std::string::npos);
  std::istringstream negative("z_um,n_out\n10,-1\n");
  error_text([&] { parse_dataset(negative); }, ErrorKind::Parse);
  std::istringstream header("z,n\n10,1\n");
  error_text([&] { parse_dataset(header); }, ErrorKind::Parse);
  error_text([] { load_dataset("/no/such/file.csv"); }, ErrorKind::Io);
}

}  // namespace
}  // namespace bouncer
