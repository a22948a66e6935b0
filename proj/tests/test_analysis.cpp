#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "support/random_params.hpp"
#include "thermlab/analysis.hpp"

using namespace thermlab;
using testing::max_abs;

namespace {

SystemParams ohmic_template(double interference = 0.0) {
  return SystemParams::make_ohmic(1.0, 1.2, {0.1, kZeroTemperatureBeta, interference}, 2.0);
}

double fidelity(const DensityMatrix& rho, const Eigen::Vector3cd& psi) {
  return (psi.adjoint() * rho.matrix() * psi)(0, 0).real();
}

}  // namespace

TEST_CASE("Gibbs populations") {
  const auto p = gibbs_populations(0.0, 1.0, 2.0);
  for (double x : p) CHECK(x == doctest::Approx(1.0 / 3.0));
  const auto q = gibbs_populations(2.0, 1.0, 1.5);
  const auto ref = testing::boltzmann(2.0, 1.0, 1.5);
  for (int k = 0; k < 3; ++k) CHECK(q[k] == doctest::Approx(ref[k]).epsilon(1e-14));
  // no overflow deep in the low-temperature regime
  const auto cold = gibbs_populations(1e4, 1.0, 1.5);
  CHECK(cold[2] == doctest::Approx(1.0));
  CHECK(cold[0] == 0.0);
  CHECK_THROWS_AS(gibbs_populations(kZeroTemperatureBeta, 1.0, 1.5), Error);
  CHECK_THROWS_AS(gibbs_populations(-1.0, 1.0, 1.5), Error);
}

TEST_CASE("entropy") {
  CHECK(von_neumann_entropy(basis_state(Level::g1)) == 0.0);
  CHECK(von_neumann_entropy(maximally_mixed()) == doctest::Approx(std::log(3.0)));
  CHECK(von_neumann_entropy(maximally_mixed(), EntropyUnit::Bits) ==
        doctest::Approx(std::log2(3.0)));
  Matrix3c half = Matrix3c::Zero();
  half(1, 1) = half(2, 2) = 0.5;
  CHECK(von_neumann_entropy(DensityMatrix::from_matrix(half), EntropyUnit::Bits) == doctest::Approx(1.0));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(von_neumann_entropy(superposition(Eigen::Vector3cd(0, r, r))) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("branching ratios") {
  const auto b = branching_ratios(1.0, 3.0);
  CHECK(b[0] == doctest::Approx(0.25));
  CHECK(b[1] == doctest::Approx(0.75));
  try {
    branching_ratios(0.0, 0.0);
    FAIL("expected BothZero");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BothZero);
  }
}

TEST_CASE("anti-thermalization examples") {
  const double r = 1.0 / std::sqrt(2.0);
  const DensityMatrix from_e = antitherm_prediction(basis_state(Level::e), 1.0, 1.0, 1.0, 1.0);
  CHECK(fidelity(from_e, Eigen::Vector3cd(0, r, r)) == doctest::Approx(1.0).epsilon(1e-12));
  const DensityMatrix from_g1 = antitherm_prediction(basis_state(Level::g1), 1.0, 1.0, 1.0, 1.0);
  CHECK(fidelity(from_g1, Eigen::Vector3cd(0, 1, 0)) == doctest::Approx(1.0).epsilon(1e-12));

  // the dark combination is untouched
  const Eigen::Vector3cd dark(0, r, -r);
  const DensityMatrix kept = antitherm_prediction(superposition(dark), 1.0, 1.0, 1.0, 1.0);
  CHECK(fidelity(kept, dark) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("anti-thermalization prediction matches long-time dynamics") {
  testing::Sampler sampler(808);
  for (int k = 0; k < 30; ++k) {
    const SystemParams p = sampler.params(
        {testing::TemperatureMode::Zero, false, true, 0.0, 0.0});
    const DensityMatrix rho0 = sampler.state();
    const DensityMatrix predicted = antitherm_prediction(rho0, p.gamma1, p.gamma2, p.gamma12, p.gamma21);
    const double t = 80.0 / (p.gamma1 + p.gamma2);
    const DensityMatrix late = propagate(build_liouvillian(p), rho0, t);
    CHECK(max_abs(predicted.matrix() - late.matrix()) < 1e-9);
  }
}

TEST_CASE("anti-thermalization input checks") {
  CHECK_THROWS_AS(antitherm_prediction(basis_state(Level::e), 1.0, 1.0, 1.5, 1.5), ValidationError);
  CHECK_THROWS_AS(antitherm_prediction(basis_state(Level::e), 0.0, 0.0, 0.0, 0.0), Error);
}

TEST_CASE("limit scans disagree") {
  LimitScanOptions opt;
  opt.order = LimitOrder::TemperatureFirst;
  const LimitReport tf = ssb_limit_scan(ohmic_template(), opt);
  CHECK(tf.populations[2] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(tf.entropy) < 1e-6);
  CHECK(tf.sequence.size() >= 2);

  opt.order = LimitOrder::SplittingFirst;
  const LimitReport sf = ssb_limit_scan(ohmic_template(), opt);
  CHECK(sf.populations[1] == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(sf.populations[2] == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(sf.entropy == doctest::Approx(std::log(2.0)).epsilon(1e-4));
}

TEST_CASE("limit scan preconditions") {
  LimitScanOptions opt;
  opt.order = LimitOrder::SplittingFirst;
  const auto plain = SystemParams::make(1.0, 1.2, {0.1, 0.1, 0.02, 0.0, 0.0}, 2.0);
  CHECK_THROWS_AS(ssb_limit_scan(plain, opt), Error);
  opt.shrink_factor = 1.5;
  CHECK_THROWS_AS(ssb_limit_scan(ohmic_template(), opt), Error);
  // gamma3 = 0: no unique steady state at T = 0
  const auto lambda = SystemParams::make(1.0, 1.2, {0.1, 0.1, 0.0, 0.0, 0.0}, 2.0);
  opt = {};
  try {
    ssb_limit_scan(lambda, opt);
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoConvergence);
  }
}

TEST_CASE("entropy surface") {
  std::vector<double> deltas, temps;
  for (int k = 0; k < 6; ++k) deltas.push_back(0.1 * k);
  for (int k = 0; k < 7; ++k) temps.push_back(0.15 * k);
  const EntropySurface serial = entropy_surface(deltas, temps, ohmic_template(), 1);
  const EntropySurface threaded = entropy_surface(deltas, temps, ohmic_template(), 3);
  CHECK(serial.status == threaded.status);
  for (Eigen::Index i = 0; i < serial.entropy.rows(); ++i)
    for (Eigen::Index k = 0; k < serial.entropy.cols(); ++k) {
      const double a = serial.entropy(i, k), b = threaded.entropy(i, k);
      CHECK(((std::isnan(a) && std::isnan(b)) || a == b));
    }

  CHECK(serial.status_at(0, 0) == CellStatus::InitialStateDependent);
  CHECK(std::isnan(serial.entropy(0, 0)));
  CHECK(serial.entropy(0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-2));
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    CHECK(serial.status_at(i, 0) == CellStatus::Ok);
    CHECK(std::abs(serial.entropy(static_cast<Eigen::Index>(i), 0)) < 1e-9);
  }

  // matches the Gibbs entropy from the test oracle at a finite cell
  const auto p = testing::boltzmann(1.0 / temps[3], 1.0, 1.0 + deltas[2]);
  double s = 0.0;
  for (double x : p) s -= x * std::log(x);
  CHECK(serial.entropy(2, 3) == doctest::Approx(s).epsilon(1e-9));
}

TEST_CASE("surface cells with invalid params are flagged, not fatal") {
  // strong interference violates the absorption block at finite T once delta > 0
  const auto templ = SystemParams::make_ohmic(1.0, 1.0, {0.1, kZeroTemperatureBeta, 1.0}, 2.0);
  const EntropySurface surf = entropy_surface({0.0, 0.2}, {0.0, 0.5}, templ, 1);
  CHECK(surf.status_at(1, 1) == CellStatus::Invalid);
  CHECK(std::isnan(surf.entropy(1, 1)));
  CHECK_THROWS_AS(entropy_surface({0.2, 0.1}, {0.0}, templ, 1), Error);
}
