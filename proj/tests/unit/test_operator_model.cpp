#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "reflectionless/background.hpp"
#include "reflectionless/config.hpp"
#include "reflectionless/error.hpp"
#include "reflectionless/jacobi_spec.hpp"

using namespace refl;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no refl::Error thrown";
  return ErrorCode::SolverFailure;
}

JacobiSpec single_site(double c) { return JacobiSpec(Background::free(), Perturbation{0, {}, {c}}); }

}  // namespace

TEST(Coefficient, FreeBackgroundEverywhere) {
  const JacobiSpec spec(Background::free());
  EXPECT_EQ(spec.coefficient(17), (Coefficients{1.0, 0.0}));
  EXPECT_EQ(spec.coefficient(-123456), (Coefficients{1.0, 0.0}));
  EXPECT_FALSE(spec.window());
}

TEST(Coefficient, OverrideShadowsBackground) {
  const JacobiSpec spec = single_site(1.0);
  EXPECT_EQ(spec.coefficient(0), (Coefficients{1.0, 1.0}));
  EXPECT_EQ(spec.coefficient(1), (Coefficients{1.0, 0.0}));
  ASSERT_TRUE(spec.window());
  EXPECT_EQ(*spec.window(), (SiteRange{0, 0}));
}

TEST(Coefficient, PeriodicResidue) {
  const JacobiSpec spec(Background::periodic({1.0, 0.5}, {0.0, 0.0}));
  EXPECT_EQ(spec.coefficient(3), (Coefficients{0.5, 0.0}));
  EXPECT_EQ(spec.coefficient(-1), (Coefficients{0.5, 0.0}));
  EXPECT_EQ(spec.coefficient(-2), (Coefficients{1.0, 0.0}));

  const Background shifted = Background::periodic({1.0, 0.5, 2.0}, {0.1, 0.2, 0.3}, 4);
  EXPECT_EQ(shifted.phase(), 1);
  for (long k = -7; k <= 7; ++k) {
    const auto r = static_cast<std::size_t>(((k - 1) % 3 + 3) % 3);
    EXPECT_EQ(shifted.a(k), shifted.a_cell()[r]) << k;
  }
}

TEST(Validate, RejectsNonPositiveAndNonFinite) {
  EXPECT_EQ(code_of([] { JacobiSpec(Background::free(), Perturbation{0, {0.0}, {}}); }),
            ErrorCode::NonPositiveCoefficient);
  EXPECT_EQ(code_of([] { JacobiSpec(Background::free(), Perturbation{0, {-1.0}, {}}); }),
            ErrorCode::NonPositiveCoefficient);
  EXPECT_EQ(code_of([] { JacobiSpec(Background::free(), Perturbation{0, {}, {std::nan("")}}); }),
            ErrorCode::NonFiniteEntry);
  EXPECT_EQ(code_of([] { Background::constant(std::numeric_limits<double>::infinity(), 0.0); }),
            ErrorCode::NonFiniteEntry);
  EXPECT_EQ(code_of([] { Background::periodic({1.0, -0.5}, {0.0, 0.0}); }), ErrorCode::NonPositiveCoefficient);
  EXPECT_NO_THROW(JacobiSpec(Background::free()));
}

TEST(Validate, ReportsSite) {
  try {
    JacobiSpec(Background::free(), Perturbation{-2, {1.0, 1.0, 0.0}, {}});
    FAIL();
  } catch (const Error& e) {
    ASSERT_TRUE(e.site());
    EXPECT_EQ(*e.site(), 0);
  }
}

TEST(Background, Canonicalization) {
  EXPECT_EQ(Background::free(), Background::constant(1.0, 0.0));
  EXPECT_EQ(Background::periodic({2.0}, {0.5}), Background::constant(2.0, 0.5));
  EXPECT_EQ(Background::periodic({1.0, 0.5, 1.0, 0.5}, {0.0, 0.0, 0.0, 0.0}).period(), 2u);
  EXPECT_EQ(Background::periodic({1.0, 0.5}, {}).b_cell()[1], 0.0);
  EXPECT_EQ(code_of([] { Background::periodic({1.0, 0.5}, {0.0}); }), ErrorCode::InvalidArgument);
}

TEST(Background, FreeBand) {
  const auto bands = Background::free().bands();
  ASSERT_EQ(bands.size(), 1u);
  EXPECT_NEAR(bands[0].lower, -2.0, 1e-12);
  EXPECT_NEAR(bands[0].upper, 2.0, 1e-12);
  EXPECT_EQ(Background::free().locate(0.0, 1e-6), BandLocation::Interior);
  EXPECT_EQ(Background::free().locate(2.0, 1e-6), BandLocation::NearEdge);
  EXPECT_EQ(Background::free().locate(3.0, 1e-6), BandLocation::Gap);
}

TEST(Background, PeriodTwoBandsMatchDispersion) {
  // λ² = a₁² + a₂² + 2 a₁ a₂ cos θ for b = 0.
  const double a1 = 1.0, a2 = 0.5;
  const auto bands = Background::periodic({a1, a2}, {0.0, 0.0}).bands();
  ASSERT_EQ(bands.size(), 2u);
  EXPECT_NEAR(bands[0].lower, -(a1 + a2), 1e-12);
  EXPECT_NEAR(bands[0].upper, -std::abs(a1 - a2), 1e-12);
  EXPECT_NEAR(bands[1].lower, std::abs(a1 - a2), 1e-12);
  EXPECT_NEAR(bands[1].upper, a1 + a2, 1e-12);
}

TEST(Background, DiscriminantAtEdgesProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(0.4, 2.0), ub(-1.0, 1.0);
  std::uniform_int_distribution<int> up(2, 5);
  for (int trial = 0; trial < 40; ++trial) {
    const int p = up(rng);
    std::vector<double> a, b;
    for (int i = 0; i < p; ++i) {
      a.push_back(ua(rng));
      b.push_back(ub(rng));
    }
    const Background bg = Background::periodic(a, b);
    for (const Band& band : bg.bands()) {
      EXPECT_NEAR(std::abs(bg.floquet_discriminant(band.lower)), 2.0, 1e-8);
      EXPECT_NEAR(std::abs(bg.floquet_discriminant(band.upper)), 2.0, 1e-8);
      if (band.width() > 1e-6) {
        EXPECT_LT(std::abs(bg.floquet_discriminant(0.5 * (band.lower + band.upper))), 2.0);
      }
    }
  }
}

TEST(Truncate, Examples) {
  const TruncatedOperator t = truncate(JacobiSpec(Background::free()), 1);
  EXPECT_EQ(t.diag, (std::vector<double>{0.0, 0.0, 0.0}));
  EXPECT_EQ(t.offdiag, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(truncate(single_site(1.0), 1).diag, (std::vector<double>{0.0, 1.0, 0.0}));
  EXPECT_EQ(code_of([] { truncate(JacobiSpec(Background::free(), Perturbation{5, {}, {1.0}}), 3); }),
            ErrorCode::WindowTooSmall);
  EXPECT_EQ(code_of([] { truncate(JacobiSpec(Background::free()), 0); }), ErrorCode::InvalidArgument);
}

TEST(Truncate, EntriesMatchCoefficients) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const JacobiSpec spec = random_perturbation(Background::periodic({1.0, 0.7, 1.3}, {0.1, 0.0, -0.2}), seed);
    const TruncatedOperator t = truncate(spec, 12);
    for (long k = -12; k <= 12; ++k) {
      EXPECT_EQ(t.diag[t.index(k)], spec.b(k));
      if (k < 12) {
        EXPECT_EQ(t.offdiag[t.index(k)], spec.a(k));
      }
    }
  }
}

TEST(RandomPerturbation, DeterministicAndBounded) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const JacobiSpec s1 = random_perturbation(Background::free(), seed);
    EXPECT_EQ(s1, random_perturbation(Background::free(), seed));
    const Perturbation& p = s1.perturbation();
    EXPECT_GE(p.a.size(), 1u);
    EXPECT_LE(p.a.size(), 8u);
    for (double a : p.a) {
      EXPECT_GE(a, 0.5);
      EXPECT_LE(a, 2.0);
    }
    for (double b : p.b) {
      EXPECT_GE(b, -1.0);
      EXPECT_LE(b, 1.0);
    }
  }
}

TEST(BoundaryPointTest, Rules) {
  EXPECT_EQ(code_of([] { BoundaryPoint::upper({0.0, 0.0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { BoundaryPoint::upper({0.0, -1.0}); }), ErrorCode::InvalidArgument);
  const auto below = BoundaryPoint::real_limit(0.3, BoundaryPoint::Approach::Below);
  EXPECT_TRUE(below.is_real_limit());
  EXPECT_EQ(below.from_above().approach(), BoundaryPoint::Approach::Above);
  EXPECT_EQ(below.lambda(), 0.3);
}

TEST(Config, ParsesKinds) {
  EXPECT_EQ(parse_config(R"({"background": {"kind": "free"}})"), JacobiSpec(Background::free()));
  EXPECT_EQ(parse_config(R"({"background": {"kind": "constant", "a": 2, "b": 0.5}})"),
            JacobiSpec(Background::constant(2.0, 0.5)));
  EXPECT_EQ(parse_config(R"({"background": {"kind": "periodic", "a": [1, 0.5], "b": [0, 0], "phase": 1},
                             "perturbation": {"offset": -1, "a": [2.0], "b": [0.5, 0.25]}})"),
            JacobiSpec(Background::periodic({1.0, 0.5}, {0.0, 0.0}, 1), Perturbation{-1, {2.0}, {0.5, 0.25}}));
}

TEST(Config, SchemaErrorsCarryPath) {
  auto message = [](std::string_view text) -> std::string {
    try {
      parse_config(text);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::SchemaError) << e.what();
      return e.what();
    }
    ADD_FAILURE() << "accepted: " << text;
    return {};
  };
  EXPECT_NE(message(R"({"background": {"kind": "free", "colour": 1}})").find("background.colour"),
            std::string::npos);
  EXPECT_NE(message(R"({"background": {"kind": "periodic", "a": [1, "x"]}})").find("background.a[1]"),
            std::string::npos);
  EXPECT_NE(message(R"({"background": {"kind": "wavy"}})").find("background.kind"), std::string::npos);
  EXPECT_NE(message(R"({"background": {"kind": "free"}, "extra": {}})").find("extra"), std::string::npos);
  EXPECT_NE(message(R"({"perturbation": {"offset": 0}})").find("background"), std::string::npos);
  message(R"({"background": {"kind": "free", "a": [1]}})");
  message(R"({"background": {"kind": "periodic", "a": [1, 2], "phase": 0.5}})");
  message(R"({"background": {"kind": "free"}, "perturbation": {"offset": 1.5}})");
  message("{not json");
}

TEST(Config, ValueErrorsSurfaceFromValidate) {
  try {
    parse_config(R"({"background": {"kind": "free"}, "perturbation": {"offset": 3, "a": [1, 0]}})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveCoefficient);
    EXPECT_EQ(e.site(), 4);
  }
}

TEST(Config, RoundTripProperty) {
  const std::vector<Background> backgrounds = {Background::free(), Background::constant(1.5, -0.25),
                                               Background::periodic({1.0, 0.5}, {0.0, 0.0}, 1),
                                               Background::periodic({0.7, 1.1, 0.9}, {0.3, -0.1, 0.0}, 2)};
  for (const Background& bg : backgrounds) {
    EXPECT_EQ(parse_config(serialize_config(JacobiSpec(bg))), JacobiSpec(bg));
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const JacobiSpec spec = random_perturbation(bg, seed);
      EXPECT_EQ(parse_config(serialize_config(spec)), spec);
    }
  }
}
