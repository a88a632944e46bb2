#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "reflectionless/error.hpp"
#include "reflectionless/herglotz.hpp"

using namespace refl;

namespace {

/// Corner resolvent element of the Dirichlet half-line block [first, last].
cplx half_line_corner(const JacobiSpec& spec, long first, long last, bool left_corner, cplx z) {
  std::vector<double> diag, off;
  for (long k = first; k <= last; ++k) {
    diag.push_back(spec.b(k));
    if (k < last) off.push_back(spec.a(k));
  }
  const std::size_t corner = left_corner ? 0 : diag.size() - 1;
  return oracle::tridiagonal_solve(diag, off, z, corner)[corner];
}

}  // namespace

TEST(MFunction, FreeClosedFormOnBand) {
  const JacobiSpec spec(Background::free());
  for (double l = -1.95; l < 1.96; l += 0.05) {
    const auto p = BoundaryPoint::real_limit(l);
    const cplx expect = oracle::free_m(l);
    EXPECT_LT(std::abs(m_right(spec, 0, p).value - expect), 1e-12) << l;
    EXPECT_LT(std::abs(m_left(spec, 0, p).value - expect), 1e-12) << l;
  }
  EXPECT_LT(std::abs(m_right(spec, 0, BoundaryPoint::real_limit(0.0)).value - cplx(0.0, 1.0)), 1e-15);
}

TEST(MFunction, FreeInGapIsRealDecayingRoot) {
  const JacobiSpec spec(Background::free());
  const cplx m = m_right(spec, 0, BoundaryPoint::real_limit(3.0)).value;
  EXPECT_NEAR(m.real(), (-3.0 + std::sqrt(5.0)) / 2.0, 1e-12);
  EXPECT_EQ(m.imag(), 0.0);
  const cplx mneg = m_right(spec, 0, BoundaryPoint::real_limit(-3.0)).value;
  EXPECT_NEAR(mneg.real(), (3.0 - std::sqrt(5.0)) / 2.0, 1e-12);
}

TEST(MFunction, ConstantBackgroundClosedForm) {
  const JacobiSpec spec(Background::constant(1.7, 0.4));
  for (cplx z : {cplx(0.1, 0.5), cplx(-2.0, 0.01), cplx(5.0, 1e-3), cplx(0.0, 3.0)}) {
    const cplx expect = oracle::constant_m(1.7, 0.4, z);
    EXPECT_LT(std::abs(m_right(spec, 3, BoundaryPoint::upper(z)).value - expect), 1e-12) << z;
    EXPECT_LT(std::abs(m_left(spec, -2, BoundaryPoint::upper(z)).value - expect), 1e-12) << z;
  }
}

TEST(MFunction, BelowIsConjugate) {
  const JacobiSpec spec = random_perturbation(Background::periodic({1.0, 0.5}, {0.0, 0.0}), 3);
  const cplx above = m_right(spec, 0, BoundaryPoint::real_limit(1.1)).value;
  const cplx below = m_right(spec, 0, BoundaryPoint::real_limit(1.1, BoundaryPoint::Approach::Below)).value;
  EXPECT_EQ(below, std::conj(above));
}

TEST(MFunction, BandEdgeRefused) {
  const JacobiSpec spec(Background::free());
  try {
    m_right(spec, 0, BoundaryPoint::real_limit(2.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BandEdge);
  }
}

TEST(MFunction, HerglotzProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> re(-4.0, 4.0), lim(-8.0, 0.0);
  const std::vector<Background> bgs = {Background::free(), Background::periodic({1.0, 0.5}, {0.0, 0.0}),
                                       Background::periodic({0.8, 1.2, 1.0}, {0.3, -0.2, 0.0})};
  for (const Background& bg : bgs)
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const JacobiSpec spec = random_perturbation(bg, seed);
      for (int i = 0; i < 20; ++i) {
        const cplx z(re(rng), std::pow(10.0, lim(rng)));
        for (long n = -3; n <= 3; ++n) {
          EXPECT_GT(m_right(spec, n, BoundaryPoint::upper(z)).value.imag(), 0.0);
          EXPECT_GT(m_left(spec, n, BoundaryPoint::upper(z)).value.imag(), 0.0);
        }
      }
    }
}

TEST(MFunction, StrippingRelation) {
  const JacobiSpec spec = random_perturbation(Background::periodic({1.0, 0.5}, {0.2, -0.1}), 5);
  const auto p = BoundaryPoint::upper({0.7, 0.05});
  for (long n = -6; n <= 6; ++n) {
    const cplx mr_n = m_right(spec, n, p).value;
    const cplx mr_prev = m_right(spec, n - 1, p).value;
    EXPECT_LT(std::abs(strip(mr_n, spec.a(n), spec.b(n), p.z()) - mr_prev), 1e-12);
    const cplx ml_n = m_left(spec, n, p).value;
    const cplx ml_next = m_left(spec, n + 1, p).value;
    EXPECT_LT(std::abs(strip(ml_n, spec.a(n - 1), spec.b(n), p.z()) - ml_next), 1e-12);
  }
}

TEST(MFunction, AgreesWithHalfLineResolvent) {
  const long N = 4000;
  const std::vector<Background> bgs = {Background::free(), Background::periodic({1.0, 0.5}, {0.0, 0.0})};
  for (const Background& bg : bgs)
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const JacobiSpec spec = random_perturbation(bg, seed);
      for (double l : {-1.2, 0.0, 0.3, 0.9, 2.5}) {
        const cplx z(l, 1e-2);
        const auto p = BoundaryPoint::upper(z);
        for (long n : {-2L, 0L, 1L}) {
          const cplx right = half_line_corner(spec, n + 1, N, true, z);
          const cplx left = half_line_corner(spec, -N, n - 1, false, z);
          EXPECT_LT(std::abs(m_right(spec, n, p).value - right), 1e-6) << l << " " << n;
          EXPECT_LT(std::abs(m_left(spec, n, p).value - left), 1e-6) << l << " " << n;
          EXPECT_LT(std::abs(m_oracle_truncated(spec, Side::Right, n, z, N) - right), 1e-10);
        }
      }
    }
}

TEST(MFunction, PeriodicTailApproachesRealAxis) {
  // Boundary values are the limits of m(λ + iε).
  const JacobiSpec spec(Background::periodic({1.0, 0.5}, {0.0, 0.0}));
  for (double l : {-1.3, -0.7, 0.6, 1.0, 1.45}) {
    const cplx limit = m_right(spec, 0, BoundaryPoint::real_limit(l)).value;
    const cplx near = m_right(spec, 0, BoundaryPoint::upper({l, 1e-9})).value;
    EXPECT_LT(std::abs(limit - near), 1e-6) << l;
    EXPECT_GT(limit.imag(), 0.0);
  }
  EXPECT_EQ(m_right(spec, 0, BoundaryPoint::real_limit(0.0)).value.imag(), 0.0);
}

TEST(AcDensity, RequiresRealLimitFromAbove) {
  const JacobiSpec spec(Background::free());
  EXPECT_NEAR(ac_density(m_right(spec, 0, BoundaryPoint::real_limit(0.0))), 1.0 / std::numbers::pi, 1e-15);
  EXPECT_THROW(ac_density(m_right(spec, 0, BoundaryPoint::upper({0.0, 1.0}))), Error);
  EXPECT_THROW(ac_density(m_right(spec, 0, BoundaryPoint::real_limit(0.0, BoundaryPoint::Approach::Below))),
               Error);
}
