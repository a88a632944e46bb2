#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "reflectionless/analysis.hpp"
#include "reflectionless/error.hpp"

using namespace refl;

namespace {

JacobiSpec single_site(double c) { return JacobiSpec(Background::free(), Perturbation{0, {}, {c}}); }

double free_charge(double beta_l, double mu_l, double beta_r, double mu_r) {
  auto f = [](double b, double m) {
    return oracle::fermi_antiderivative(2.0, b, m) - oracle::fermi_antiderivative(-2.0, b, m);
  };
  return (f(beta_l, mu_l) - f(beta_r, mu_r)) / (2.0 * std::numbers::pi);
}

/// Composite Simpson for (2π)^{-1} ∫_{-2}^{2} λ (f_l - f_r) dλ.
double free_energy_simpson(const Reservoirs& r) {
  const int n = 20000;
  const double h = 4.0 / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = -2.0 + i * h;
    const double fl = 1.0 / (1.0 + std::exp(r.beta_l * (x - r.mu_l)));
    const double fr = 1.0 / (1.0 + std::exp(r.beta_r * (x - r.mu_r)));
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * x * (fl - fr);
  }
  return s * h / 3.0 / (2.0 * std::numbers::pi);
}

}  // namespace

TEST(Grid, StopIncludedAndEdgesDropped) {
  const EnergyGrid g = make_grid(Background::free(), -1.9, 1.9, 0.1);
  EXPECT_EQ(g.points.size(), 39u);
  EXPECT_NEAR(g.points.back(), 1.9, 1e-12);

  const EnergyGrid e = make_grid(Background::free(), -2.0, 2.0, 0.5);
  EXPECT_EQ(e.points.size(), 7u);
  EXPECT_EQ(e.dropped.size(), 2u);

  const EnergyGrid x = make_grid(Background::free(), {0.3, -0.1, 0.3, 1.999999});
  EXPECT_EQ(x.points, (std::vector<double>{-0.1, 0.3}));
  EXPECT_EQ(x.dropped.size(), 1u);
  EXPECT_EQ(x.provenance, EnergyGrid::Provenance::Explicit);
}

TEST(Grid, BandScanStaysInside) {
  const Background bg = Background::periodic({1.0, 0.5}, {0.0, 0.0});
  const EnergyGrid g = band_scan(bg, 50);
  EXPECT_EQ(g.points.size(), 100u);
  EXPECT_EQ(g.provenance, EnergyGrid::Provenance::BandScan);
  for (double x : g.points) {
    EXPECT_LT(std::abs(bg.floquet_discriminant(x)), 2.0);
    EXPECT_GT(std::abs(x), 0.5 + 1e-5);
    EXPECT_LT(std::abs(x), 1.5 - 1e-5);
  }
}

TEST(Support, GapPointsAreOutside) {
  const JacobiSpec spec(Background::periodic({1.0, 0.5}, {0.0, 0.0}));
  const EnergyGrid g = make_grid(spec.background(), {-1.0, 0.0, 0.2, 1.0, 1.2});
  const EssentialSupport s = essential_support(spec, g);
  EXPECT_EQ(s.either, (std::vector<std::size_t>{0, 3, 4}));
  EXPECT_EQ(s.left, s.right);
}

TEST(Report, FreeChainIsReflectionless) {
  const JacobiSpec spec(Background::free());
  const CriteriaReport r = reflectionless_report(spec, make_grid(spec.background(), -1.9, 1.9, 0.05), -3, 3);
  ASSERT_EQ(r.points.size(), 77u);
  for (const PointReport& p : r.points) {
    EXPECT_TRUE(p.verdict_mt && p.verdict_triple && p.verdict_spec && p.verdict_stat && p.agree);
    ASSERT_EQ(p.rows.size(), 7u);
    for (const CutSiteRow& row : p.rows) {
      EXPECT_LE(std::abs(row.re_G), 1e-10);
      EXPECT_LE(row.specref_residual, 1e-10);
      EXPECT_LE(row.s_diag_mag(), 1e-10);
    }
  }
  EXPECT_TRUE(r.all_agree());
  EXPECT_TRUE(r.residual_gap());
}

TEST(Report, SingleSiteWitness) {
  const JacobiSpec spec = single_site(1.0);
  const CriteriaReport r = reflectionless_report(spec, make_grid(spec.background(), {0.0}), 0, 0);
  ASSERT_EQ(r.points.size(), 1u);
  const PointReport& p = r.points[0];
  EXPECT_NEAR(p.rows[0].re_G, 0.2, 1e-12);
  EXPECT_NEAR(p.rows[0].s_ll_mag, std::sqrt(0.2), 1e-12);
  EXPECT_FALSE(p.verdict_mt);
  EXPECT_FALSE(p.verdict_spec);
  EXPECT_FALSE(p.verdict_stat);
  EXPECT_TRUE(p.agree);
}

TEST(Report, PeriodicBandScanPasses) {
  const JacobiSpec spec(Background::periodic({1.0, 0.5}, {0.0, 0.0}));
  const CriteriaReport r = reflectionless_report(spec, band_scan(spec.background(), 200), -3, 3);
  EXPECT_EQ(r.points.size(), 400u);
  for (const PointReport& p : r.points) EXPECT_TRUE(p.verdict_mt && p.verdict_spec && p.verdict_stat);
  EXPECT_TRUE(r.all_agree());
  EXPECT_TRUE(r.residual_gap()) << r.worst_gap_violation();
}

TEST(Report, GapViolatedNearTransmissionResonance) {
  // Re G_nn(λ) changes sign along the band for a generic perturbation, so
  // individual residuals fall between the gap bounds.
  const JacobiSpec spec = random_perturbation(Background::free(), 3);
  const CriteriaReport r = reflectionless_report(spec, make_grid(spec.background(), -0.06, 0.0, 0.005), -3, 3);
  EXPECT_TRUE(r.all_agree());
  EXPECT_FALSE(r.residual_gap());
  EXPECT_GT(r.worst_gap_violation(), 1e-10);
}

TEST(Report, GapPointsDroppedWithReason) {
  const JacobiSpec spec(Background::periodic({1.0, 0.5}, {0.0, 0.0}));
  const CriteriaReport r = reflectionless_report(spec, make_grid(spec.background(), {0.0, 1.0}), -1, 1);
  EXPECT_EQ(r.points.size(), 1u);
  ASSERT_EQ(r.dropped.size(), 1u);
  EXPECT_EQ(r.dropped[0].lambda, 0.0);
  EXPECT_FALSE(r.dropped[0].reason.empty());
}

TEST(Report, TauRobustOnRandomSpecs) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const JacobiSpec spec = random_perturbation(Background::free(), 500 + seed);
    const EnergyGrid g = make_grid(spec.background(), -1.95, 1.95, 0.05);
    std::vector<bool> reference;
    for (double tau : {1e-9, 1e-8, 1e-7}) {
      const CriteriaReport r = reflectionless_report(spec, g, -3, 3, tau);
      EXPECT_TRUE(r.all_agree()) << seed;
      std::vector<bool> verdicts;
      for (const PointReport& p : r.points) verdicts.push_back(p.verdict_mt);
      if (reference.empty()) reference = verdicts;
      EXPECT_EQ(verdicts, reference);
    }
  }
}

TEST(Landauer, ZeroBiasIsExactlyZero) {
  const Currents c = landauer_current(single_site(1.0), {2.0, 0.3, 2.0, 0.3});
  EXPECT_EQ(c.charge, 0.0);
  EXPECT_EQ(c.energy, 0.0);
}

TEST(Landauer, FreeChainClosedForm) {
  const JacobiSpec spec(Background::free());
  for (Reservoirs r : {Reservoirs{1.0, 0.5, 1.0, -0.5}, Reservoirs{5.0, 0.1, 0.5, 0.0}, Reservoirs{20.0, 1.0, 20.0, -1.0}}) {
    const Currents c = landauer_current(spec, r);
    EXPECT_NEAR(c.charge, free_charge(r.beta_l, r.mu_l, r.beta_r, r.mu_r), 1e-8);
    EXPECT_NEAR(c.energy, free_energy_simpson(r), 1e-8);
  }
}

TEST(Landauer, AntisymmetricAndReducedByScatterer) {
  const JacobiSpec spec = random_perturbation(Background::periodic({1.0, 0.5}, {0.0, 0.0}), 77);
  const Reservoirs r{2.0, 0.7, 1.0, -0.2};
  const Currents forward = landauer_current(spec, r);
  const Currents reverse = landauer_current(spec, {r.beta_r, r.mu_r, r.beta_l, r.mu_l});
  EXPECT_NEAR(forward.charge, -reverse.charge, 1e-12);
  EXPECT_NEAR(forward.energy, -reverse.energy, 1e-12);

  const Reservoirs bias{1.0, 0.5, 1.0, -0.5};
  const double c1 = landauer_current(single_site(1.0), bias).charge;
  const double free = landauer_current(JacobiSpec(Background::free()), bias).charge;
  EXPECT_GT(c1, 0.0);
  EXPECT_LT(c1, free);
}

TEST(Landauer, FermiIsOverflowSafe) {
  EXPECT_EQ(fermi(10.0, 1e6, 0.0), 0.0);
  EXPECT_EQ(fermi(-10.0, 1e6, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(fermi(0.0, 3.0, 0.0), 0.5);
  EXPECT_NEAR(transmission(single_site(1.0), 0.0), 0.8, 1e-14);
}
