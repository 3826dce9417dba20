#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "bouncer/bouncer.hpp"

namespace bouncer {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) rows.push_back(detail::split(line, ','));
  return rows;
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("bouncer_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  int run_text(const std::string& text, const fs::path& out) {
    const auto cfg = parse_config(text, dir, {{"output.dir", out.string()}});
    return run(cfg, log, err);
  }

  fs::path dir;
  std::ostringstream log, err;
};

TEST_F(PipelineTest, SpectrumFirstColumnIsTheGravityLadder) {
  ASSERT_EQ(run_text("scenario = spectrum\npotential.kind = gravity\n", dir / "out"), 0) << err.str();
  const auto rows = read_csv(dir / "out" / "spectrum.csv");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0][0], "E_peV");
  const double published[] = {1.41, 2.46, 3.32, 4.08};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(std::stod(rows[i + 1][0]) / published[i], 1.0, 0.01);
  }
  EXPECT_TRUE(fs::exists(dir / "out" / "wavefunctions.csv"));
}

TEST_F(PipelineTest, AppendixReportsDeltaXDeviation) {
  ASSERT_EQ(run_text("scenario = appendix\n", dir / "out"), 0) << err.str();
  const auto rows = read_csv(dir / "out" / "appendix.csv");
  EXPECT_EQ(rows[0], (std::vector<std::string>{"quantity", "value", "published", "rel_deviation"}));
  EXPECT_EQ(rows[1][0], "delta_x_cm");
  EXPECT_NEAR(std::stod(rows[1][1]), 0.031735, 5e-7);
  EXPECT_NEAR(std::stod(rows[1][3]), -0.00908, 5e-5);
  EXPECT_NE(log.str().find("deviation"), std::string::npos);
}

TEST_F(PipelineTest, ScanTableLayout) {
  ASSERT_EQ(run_text("scenario = scan\nscan.slits = 20, 30\n", dir / "out"), 0) << err.str();
  const auto rows = read_csv(dir / "out" / "scan.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], kScanHeader);
  EXPECT_EQ(rows[1][0], "20");
  EXPECT_GT(std::stod(rows[1][5]), std::stod(rows[2][5]));  // A1 shrinks with the slit
  const std::string svg = slurp(dir / "out" / "scan.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("polyline"), std::string::npos);
}

TEST_F(PipelineTest, NineSignificantDigits) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_number(1.22713535651933e-3), "0.00122713536");
  EXPECT_EQ(format_number(20.0), "20");
}

TEST_F(PipelineTest, RerunsAreByteIdentical) {
  const std::string cfg = "scenario = scan\nscan.slit_min = 12\nscan.slit_max = 30\nscan.slit_step = 3\n"
                          "populations.c = 0.4, 0.3, 0.2, 0.1\n";
  ASSERT_EQ(run_text(cfg, dir / "a"), 0);
  ASSERT_EQ(run_text(cfg, dir / "b"), 0);
  EXPECT_EQ(slurp(dir / "a" / "scan.csv"), slurp(dir / "b" / "scan.csv"));
  EXPECT_EQ(slurp(dir / "a" / "scan.svg"), slurp(dir / "b" / "scan.svg"));
}

TEST_F(PipelineTest, ThresholdFitScenario) {
  std::ofstream data(dir / "counts.csv");
  data << "z_um,n_out\n";
  for (int um = 5; um <= 50; um += 5) {
    data << um << ',' << format_number(thresholded_curve(from_um(um), from_um(15), 2e7)) << '\n';
  }
  data.close();
  ASSERT_EQ(run_text("scenario = fit\nfit.target = threshold\nfit.data = counts.csv\n", dir / "out"), 0)
      << err.str();
  const auto rows = read_csv(dir / "out" / "fit.csv");
  EXPECT_EQ(rows[2][0], "z0_um");
  EXPECT_NEAR(std::stod(rows[2][1]), 15.0, 0.01 + 1e-9);
}

TEST_F(PipelineTest, PopulationFitScenario) {
  ScanSetup setup;
  const AbsorberModel absorber{from_cm(0.0320259), from_cm(10), ConstantDensity{0.3}};
  std::vector<double> slits;
  for (int um = 12; um <= 40; um += 2) slits.push_back(from_um(um));
  const auto predictor = make_scan_predictor(setup, absorber, slits);
  const auto y = predictor(PopulationWeights({0.5, 0.2, 0.2, 0.1}));
  std::ofstream data(dir / "counts.csv");
  data << "z_um,n_out\n";
  char buf[64];
  for (std::size_t i = 0; i < slits.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", y[i]);
    data << 12 + 2 * i << ',' << buf << '\n';
  }
  data.close();
  ASSERT_EQ(run_text("scenario = fit\nfit.data = counts.csv\n", dir / "out"), 0) << err.str();
  const auto rows = read_csv(dir / "out" / "fit.csv");
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_NEAR(std::stod(rows[1][1]), 0.5, 1e-3);
  EXPECT_NEAR(std::stod(rows[4][1]), 0.1, 1e-3);
}

TEST_F(PipelineTest, NumericalFailureExitsWithThree) {
  EXPECT_EQ(run_text("scenario = scan\ngrid.z_max = 20\n", dir / "out"), 3);
  EXPECT_EQ(err.str().rfind("error kind=domain_truncation exit=3", 0), 0u) << err.str();
  EXPECT_FALSE(fs::exists(dir / "out" / "scan.csv"));
}

#ifdef BOUNCER_CLI
int cli(const std::string& args) {
  const int status = std::system((std::string(BOUNCER_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(PipelineTest, CommandLineExitCodes) {
  std::ofstream(dir / "bad.cfg") << "absorber.delta_x = 0\n";
  std::ofstream(dir / "trunc.cfg") << "grid.z_max = 20\n";
  EXPECT_EQ(cli("appendix --out " + (dir / "ok").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "ok" / "appendix.csv"));
  EXPECT_EQ(cli("scan --config " + (dir / "bad.cfg").string()), 2);
  EXPECT_EQ(cli("scan --config " + (dir / "trunc.cfg").string() + " --out " + (dir / "t").string()), 3);
  EXPECT_EQ(cli("fit --out " + (dir / "f").string()), 2);
  EXPECT_EQ(cli("nonsense"), 2);
}
#endif

}  // namespace
}  // namespace bouncer
