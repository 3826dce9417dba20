#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bouncer/eigensolver.hpp"

namespace bouncer {
namespace {

const PhysicalConstants kC{};

void expect_state_invariants(const Spectrum& sp) {
  const double h = sp.grid.spacing();
  for (std::size_t i = 0; i < sp.states.size(); ++i) {
    const auto& s = sp.states[i];
    EXPECT_EQ(s.index, static_cast<int>(i) + 1);
    EXPECT_NEAR(norm_squared(s.psi, h), 1.0, 1e-8);
    EXPECT_EQ(count_nodes(s.psi), i);
    double peak = 0;
    for (double v : s.psi) peak = std::max(peak, std::abs(v));
    EXPECT_LT(std::abs(s.psi.front()), 1e-6 * peak);
    EXPECT_LT(std::abs(s.psi.back()), 1e-6 * peak);
    if (i > 0) {
      EXPECT_GT(s.energy, sp.states[i - 1].energy);
    }
    for (std::size_t j = 0; j < i; ++j) {
      EXPECT_LE(std::abs(overlap_integral(s.psi, sp.states[j].psi, h)), 1e-6);
    }
  }
}

TEST(BoxAnalytic, GroundStateOfFifteenMicronBox) {
  // mpmath: hbar^2 pi^2 / (2 m (15 um)^2) = 0.908935669555 peV.
  EXPECT_NEAR(to_peV(box_eigenvalue_analytic(1, from_um(15), kC)), 0.908935669555, 1e-10);
  EXPECT_NEAR(to_peV(box_eigenvalue_analytic(1, from_um(15), kC)), 0.9, 0.01);
}

TEST(BoxAnalytic, Scaling) {
  const double e1 = box_eigenvalue_analytic(1, from_um(15), kC);
  EXPECT_NEAR(box_eigenvalue_analytic(2, from_um(15), kC) / e1, 4.0, 1e-14);
  EXPECT_NEAR(to_peV(box_eigenvalue_analytic(2, from_um(15), kC)), 3.64, 0.005);
  EXPECT_NEAR(box_eigenvalue_analytic(1, from_um(30), kC) / e1, 0.25, 1e-14);
  EXPECT_THROW(box_eigenvalue_analytic(0, from_um(15), kC), Error);
}

TEST(GravityAnalytic, PublishedLevels) {
  const double published[] = {1.41, 2.46, 3.32, 4.08};
  for (int n = 1; n <= 4; ++n) {
    EXPECT_NEAR(to_peV(gravity_eigenvalue_analytic(n, kC)), published[n - 1], 0.005) << n;
  }
}

TEST(GravityAnalytic, GroundStateHeight) {
  // mpmath: eps0 |a1| / (m g) = 13.72148136 um; the text rounds to "about 15".
  const double height = kC.turning_height(gravity_eigenvalue_analytic(1, kC));
  EXPECT_NEAR(to_um(height), 13.72148136, 1e-6);
}

TEST(GravityAnalytic, TableLimit) {
  EXPECT_NO_THROW(gravity_eigenvalue_analytic(10, kC));
  try {
    gravity_eigenvalue_analytic(11, kC);
    FAIL() << "expected unsupported-index error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnsupportedIndex);
  }
}

TEST(CountNodes, SimpleShapes) {
  const std::size_t n = 401;
  std::vector<double> ground(n), first(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);
    ground[i] = std::sin(std::numbers::pi * x);
    first[i] = std::sin(2 * std::numbers::pi * x);
  }
  EXPECT_EQ(count_nodes(ground), 0u);
  EXPECT_EQ(count_nodes(first), 1u);
  EXPECT_EQ(count_nodes(std::vector<double>{1.0, 1e-20, -1e-20, 1.0}), 0u);
}

TEST(CountNodes, BoxEigenfunctions) {
  const std::size_t npts = 1000;
  for (int n = 1; n <= 12; ++n) {
    std::vector<double> psi(npts);
    for (std::size_t i = 0; i < npts; ++i) {
      psi[i] = std::sin(n * std::numbers::pi * (i + 0.5) / npts);
    }
    EXPECT_EQ(count_nodes(psi), static_cast<std::size_t>(n - 1));
  }
}

TEST(SolveSpectrum, BoxGroundStateWithin0p5Percent) {
  const auto sp = solve_spectrum(InfiniteBox{from_um(15)}, kC, Grid(0, from_um(15), 2000), 1);
  EXPECT_NEAR(to_peV(sp.states[0].energy) / 0.908935669555, 1.0, 5e-3);
}

TEST(SolveSpectrum, BoxMatchesAnalyticTenStates) {
  const double a = from_um(15);
  const auto sp = solve_spectrum(InfiniteBox{a}, kC, Grid(0, a, 4000), 10);
  for (const auto& s : sp.states) {
    EXPECT_NEAR(s.energy / box_eigenvalue_analytic(s.index, a, kC), 1.0, 1e-3);
  }
  expect_state_invariants(sp);
}

TEST(SolveSpectrum, BoxConvergesQuadratically) {
  const double a = from_um(15);
  const auto coarse = solve_spectrum(InfiniteBox{a}, kC, Grid(0, a, 2000), 10);
  const auto fine = solve_spectrum(InfiniteBox{a}, kC, Grid(0, a, 4000), 10);
  for (int n = 1; n <= 10; ++n) {
    const double exact = box_eigenvalue_analytic(n, a, kC);
    const double e_coarse = std::abs(coarse.states[n - 1].energy - exact);
    const double e_fine = std::abs(fine.states[n - 1].energy - exact);
    EXPECT_GE(e_coarse / e_fine, 3.5) << n;
  }
}

TEST(SolveSpectrum, BoxWiderThanGridIsClippedByDirichletEnds) {
  // Hard-wall samples inside the grid act as the boundary.
  const double a = from_um(15);
  const double h = a / 1999.0;
  const auto sp = solve_spectrum(InfiniteBox{a}, kC, Grid(-100 * h, a + 100 * h, 2200), 2);
  EXPECT_NEAR(sp.states[0].energy / box_eigenvalue_analytic(1, a, kC), 1.0, 5e-3);
  expect_state_invariants(sp);
}

TEST(SolveSpectrum, GravityMatchesAiryZeros) {
  const auto sp = solve_spectrum(GravityFloor{}, kC, Grid(0, from_um(100), 4000), 4);
  for (const auto& s : sp.states) {
    EXPECT_NEAR(s.energy / gravity_eigenvalue_analytic(s.index, kC), 1.0, 5e-3);
  }
  expect_state_invariants(sp);
}

TEST(SolveSpectrum, DefaultGravityGrid) {
  const auto sp = solve_spectrum(GravityFloor{}, kC, 6);
  EXPECT_NEAR(sp.grid.z_max(), 4.0 * kC.z0() * kAiryZeros[5], 1e-12);
  for (const auto& s : sp.states) {
    EXPECT_NEAR(s.energy / gravity_eigenvalue_analytic(s.index, kC), 1.0, 5e-3);
  }
}

TEST(SolveSpectrum, DistantHardCeilingLeavesGroundStateAlone) {
  const PotentialSpec spec =
      GravityWithAbsorber{from_um(100), {from_peV(1e3), from_um(100), from_um(0.01)}};
  const auto sp = solve_spectrum(spec, kC, 1);
  EXPECT_NEAR(sp.states[0].energy / gravity_eigenvalue_analytic(1, kC), 1.0, 1e-3);
}

TEST(SolveSpectrum, TabulatedHarmonicWell) {
  // V = m w^2 (z - zc)^2 / 2 sampled on 4001 points; E_n = hbar w (n - 1/2).
  const double hw = from_peV(1.0);
  const double w = hw / kC.hbar;
  const double zc = from_um(50);
  Tabulated tab;
  for (int i = 0; i <= 4000; ++i) {
    const double z = from_um(100.0 * i / 4000);
    tab.samples.push_back({z, 0.5 * kC.m_n * w * w * (z - zc) * (z - zc)});
  }
  const auto sp = solve_spectrum(tab, kC, 4);
  for (const auto& s : sp.states) {
    EXPECT_NEAR(s.energy / (hw * (s.index - 0.5)), 1.0, 1e-3) << s.index;
  }
  expect_state_invariants(sp);
}

TEST(SolveSpectrum, TruncatedDomainIsAnError) {
  try {
    solve_spectrum(GravityFloor{}, kC, Grid(0, from_um(45), 2000), 4);
    FAIL() << "expected domain-truncation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainTruncation);
  }
}

TEST(SolveSpectrum, RejectsBadRequests) {
  EXPECT_THROW(solve_spectrum(GravityFloor{}, kC, Grid(0, from_um(100), 100), 0), Error);
  EXPECT_THROW(solve_spectrum(InfiniteBox{-1.0}, kC, Grid(0, 1e-5, 100), 1), Error);
}

TEST(SolveSpectrum, InvariantsAcrossRandomConfigurations) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> width(5, 40), v0(0.3, 20), diff(0.2, 3), slit(5, 40);
  for (int trial = 0; trial < 12; ++trial) {
    const double a = from_um(width(rng));
    expect_state_invariants(solve_spectrum(InfiniteBox{a}, kC, Grid(0, a, 1500), 5));
    const double s = from_um(slit(rng));
    const PotentialSpec ws = GravityWithAbsorber{s, {from_peV(v0(rng)), s, from_um(diff(rng))}};
    expect_state_invariants(solve_spectrum(ws, kC, 4));
  }
  expect_state_invariants(solve_spectrum(GravityFloor{}, kC, 8));
}

TEST(SolveSpectrum, Deterministic) {
  const PotentialSpec spec = GravityWithAbsorber{from_um(15), {from_peV(1.5), from_um(15), from_um(1)}};
  const auto a = solve_spectrum(spec, kC, 4);
  const auto b = solve_spectrum(spec, kC, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.states[i].energy, b.states[i].energy);
    EXPECT_EQ(a.states[i].psi, b.states[i].psi);
  }
}

}  // namespace
}  // namespace bouncer
