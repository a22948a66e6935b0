#include <doctest.h>

#include <cmath>

#include "support/random_params.hpp"
#include "thermlab/model.hpp"

using namespace thermlab;

namespace {

SystemParams lambda_params(double g, double g12, double g21, double beta = kZeroTemperatureBeta) {
  return SystemParams::make(1.0, 1.0, {g, g, 0.0, g12, g21}, beta);
}

ViolationKind only_violation(const SystemParams& p) {
  try {
    validate_params(p);
  } catch (const ValidationError& e) {
    REQUIRE(e.violations().size() >= 1);
    return e.violations().front().kind;
  }
  FAIL("expected a ValidationError");
  return ViolationKind::NegativeRate;
}

}  // namespace

TEST_CASE("thermal occupation") {
  CHECK(thermal_occupation(1.0, kZeroTemperatureBeta) == 0.0);
  CHECK(thermal_occupation(std::log(2.0), 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(thermal_occupation(1.0, 1.0) == doctest::Approx(1.0 / (std::exp(1.0) - 1.0)).epsilon(1e-14));
  CHECK(thermal_occupation(1.0, 1.0) == doctest::Approx(0.5819767).epsilon(1e-7));
  CHECK_THROWS_AS(thermal_occupation(0.0, 1.0), Error);
  CHECK_THROWS_AS(thermal_occupation(-1.0, 1.0), Error);
  CHECK_THROWS_AS(thermal_occupation(1.0, 0.0), Error);

  // decreasing in beta and in omega
  double prev = thermal_occupation(1.0, 0.1);
  for (double beta = 0.2; beta < 20.0; beta *= 1.3) {
    const double n = thermal_occupation(1.0, beta);
    CHECK(n < prev);
    prev = n;
  }
  prev = thermal_occupation(0.1, 2.0);
  for (double w = 0.2; w < 10.0; w *= 1.3) {
    const double n = thermal_occupation(w, 2.0);
    CHECK(n < prev);
    prev = n;
  }
}

TEST_CASE("validation accepts the symmetric boundary case") {
  CHECK_NOTHROW(validate_params(lambda_params(1.0, 1.0, 1.0)));
}

TEST_CASE("validation rejects") {
  SUBCASE("cross rates outside the emission block") {
    CHECK(only_violation(lambda_params(1.0, 1.5, 1.5)) == ViolationKind::KossakowskiViolation);
  }
  SUBCASE("negative rate") {
    const auto p = SystemParams::make(1.0, 1.5, {-0.1, 1.0, 0.2, 0.0, 0.0}, 1.0);
    CHECK(only_violation(p) == ViolationKind::NegativeRate);
  }
  SUBCASE("divergent occupation") {
    const auto p = SystemParams::make(1.0, 1.0, {1.0, 1.0, 0.2, 0.0, 0.0}, 2.0);
    CHECK(only_violation(p) == ViolationKind::DivergentOccupation);
  }
  SUBCASE("delta mismatch") {
    auto p = SystemParams::make(1.0, 1.5, {1.0, 1.0, 0.2, 0.0, 0.0}, 2.0);
    p.delta = 0.4;
    CHECK(only_violation(p) == ViolationKind::DeltaMismatch);
  }
  SUBCASE("every violation is listed") {
    auto p = SystemParams::make(1.0, 1.0, {-1.0, 1.0, 0.3, 0.0, 0.0}, 2.0);
    try {
      validate_params(p);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.has(ViolationKind::NegativeRate));
      CHECK(e.has(ViolationKind::DivergentOccupation));
    }
  }
  SUBCASE("non-positive frequency and temperature") {
    const auto p = SystemParams::make(-1.0, 0.5, {1.0, 1.0, 0.0, 0.0, 0.0}, -1.0);
    try {
      validate_params(p);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.has(ViolationKind::NonPositiveFrequency));
      CHECK(e.has(ViolationKind::InvalidTemperature));
    }
  }
}

TEST_CASE("validation is idempotent") {
  testing::Sampler sampler(11);
  for (int k = 0; k < 50; ++k) {
    const SystemParams p = sampler.params();
    CHECK(validate_params(p) == p);
  }
}

TEST_CASE("ohmic rates keep the g1-g2 channel finite at delta = 0") {
  const OhmicSpectrum spectrum{0.2, kZeroTemperatureBeta, 0.5};
  const auto p = SystemParams::make_ohmic(1.0, 1.0, spectrum, 3.0);
  CHECK(p.gamma3 == 0.0);
  CHECK(p.gamma1 == doctest::Approx(0.2));
  CHECK(p.gamma12 == doctest::Approx(0.5 * 0.2));
  CHECK_NOTHROW(validate_params(p));
  const ChannelRates r = channel_rates(p);
  CHECK(r.up3 == doctest::Approx(0.2 / 3.0).epsilon(1e-14));
  CHECK(r.down3 == doctest::Approx(0.2 / 3.0).epsilon(1e-14));

  // continuity in delta
  const ChannelRates near = channel_rates(p.with_splitting(1e-9, 3.0));
  CHECK(near.up3 == doctest::Approx(r.up3).epsilon(1e-8));

  // hand-edited rates no longer match the spectrum
  auto edited = p;
  edited.gamma1 = 0.3;
  CHECK(only_violation(edited) == ViolationKind::OhmicMismatch);
}

TEST_CASE("with_splitting holds omega1 and rebuilds delta") {
  const auto p = SystemParams::make(1.0, 1.4, {1.0, 0.5, 0.2, 0.1, 0.1}, 2.0);
  const auto q = p.with_splitting(0.1, kZeroTemperatureBeta);
  CHECK(q.omega1 == 1.0);
  CHECK(q.omega2 == doctest::Approx(1.1));
  CHECK(q.delta == q.omega2 - q.omega1);
  CHECK(q.gamma2 == 0.5);
  CHECK(is_zero_temperature(q.beta));
}

TEST_CASE("states") {
  const auto g2 = basis_state(Level::g2);
  CHECK(g2.population(Level::g2) == 1.0);
  CHECK(g2.population(Level::e) == 0.0);

  const double r = 1.0 / std::sqrt(2.0);
  const auto plus = superposition(Eigen::Vector3cd(0.0, r, r));
  CHECK(plus(Level::g1, Level::g2).real() == doctest::Approx(0.5));
  CHECK_THROWS_AS(superposition(Eigen::Vector3cd(1.0, 1.0, 0.0)), Error);

  Matrix3c bad = Matrix3c::Zero();
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix::from_matrix(bad), Error);

  const auto mixed = maximally_mixed();
  for (double p : mixed.populations()) CHECK(p == doctest::Approx(1.0 / 3.0));

  testing::Sampler sampler(3);
  for (int k = 0; k < 20; ++k) {
    const auto rho = sampler.state();
    CHECK(rho.residuals().within(StateTolerance{}));
  }
}

TEST_CASE("vectorization is column-major") {
  Matrix3c m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = Complex(i, 10 * j);
  const Vector9c v = vectorize(m);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(v(i + 3 * j) == m(i, j));
  CHECK(unvectorize(v) == m);
}

TEST_CASE("level names") {
  CHECK(parse_level("g1") == Level::g1);
  CHECK(!parse_level("x"));
  CHECK(to_string(Level::e) == "e");
}
