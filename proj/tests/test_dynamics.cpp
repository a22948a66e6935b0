#include <doctest.h>

#include <cmath>
#include <vector>

#include "support/oracles.hpp"
#include "support/random_params.hpp"
#include "thermlab/dynamics.hpp"

using namespace thermlab;
using testing::max_abs;

namespace {

const SystemParams kThermal =
    SystemParams::make(1.0, 1.4, {0.8, 0.6, 0.3, 0.2, 0.3}, 1.2);
const SystemParams kLambdaDegenerate =
    SystemParams::make(1.0, 1.0, {0.8, 0.6, 0.0, 0.4, 0.5}, kZeroTemperatureBeta);

std::vector<double> grid(double t_final, int n) {
  std::vector<double> t;
  for (int k = 0; k <= n; ++k) t.push_back(t_final * k / n);
  return t;
}

}  // namespace

TEST_CASE("propagator basics") {
  const Liouvillian l = build_liouvillian(kThermal);
  CHECK(propagator(l, 0.0) == Matrix9c::Identity());
  CHECK_THROWS_AS(propagator(l, -1.0), Error);
  const Matrix9c a = propagator(l, 0.7) * propagator(l, 1.9);
  CHECK((a - propagator(l, 2.6)).cwiseAbs().maxCoeff() < 1e-12);

  // d/dt exp(Lt) = L exp(Lt), central difference
  const double h = 1e-4;
  const Matrix9c deriv = (propagator(l, 1.0 + h) - propagator(l, 1.0 - h)) / (2 * h);
  CHECK((deriv - l.matrix * propagator(l, 1.0)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("RK4 converges at fourth order against the propagator") {
  const Liouvillian l = build_liouvillian(kThermal);
  const DensityMatrix rho0 = basis_state(Level::e);
  const double t_final = 5.0;
  const Matrix3c exact = propagate(l, rho0, t_final).matrix();
  const double dt = 0.1 / l.max_abs();
  const double e1 = max_abs(evolve_fixed(l, rho0, t_final, dt).states.back().matrix() - exact);
  const double e2 = max_abs(evolve_fixed(l, rho0, t_final, dt / 2).states.back().matrix() - exact);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("fixed step refuses steps above 0.1 / max|L|") {
  const Liouvillian l = build_liouvillian(kThermal);
  try {
    evolve_fixed(l, maximally_mixed(), 1.0, 0.2 / l.max_abs());
    FAIL("expected StepTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepTooLarge);
  }
}

TEST_CASE("adaptive evolution samples and invariants") {
  testing::Sampler sampler(77);
  for (int k = 0; k < 10; ++k) {
    const SystemParams p = sampler.params();
    const Liouvillian l = build_liouvillian(p);
    const DensityMatrix rho0 = sampler.state();
    const auto ts = grid(8.0, 16);
    ode::AdaptiveOptions opt;
    opt.rtol = 1e-8;
    const Trajectory traj = evolve_adaptive(l, rho0, 8.0, ts, opt);
    REQUIRE(traj.times.size() == ts.size());
    CHECK(traj.stats.max_trace_drift < 1e-9);
    CHECK(traj.stats.max_hermiticity_residual < 1e-9);
    CHECK(traj.stats.min_eigenvalue > -1e-9);
    for (std::size_t j = 0; j < ts.size(); ++j) {
      CHECK(max_abs(traj.states[j].matrix() - propagate(l, rho0, ts[j]).matrix()) < 1e-6);
    }
  }
}

TEST_CASE("master equation oracle agrees with the propagator derivative") {
  // rho(t + h) - rho(t - h) over 2h against the hand-written right-hand side
  const Liouvillian l = build_liouvillian(kThermal);
  const DensityMatrix rho = propagate(l, basis_state(Level::g1), 0.8);
  const double h = 1e-4;
  const Matrix3c fd = (propagate(l, basis_state(Level::g1), 0.8 + h).matrix() -
                       propagate(l, basis_state(Level::g1), 0.8 - h).matrix()) /
                      (2 * h);
  CHECK(max_abs(fd - testing::master_equation_rhs(kThermal, rho.matrix())) < 1e-7);
}

TEST_CASE("spectral decomposition") {
  const SpectralDecomposition dec = decompose(build_liouvillian(kThermal));
  CHECK(dec.zero_modes.size() == 1);
  CHECK(dec.biorthogonality_residual < 1e-8);

  const SpectralDecomposition lam = decompose(build_liouvillian(kLambdaDegenerate));
  CHECK(lam.zero_modes.size() >= 4);
}

TEST_CASE("asymptotic state kinds") {
  SUBCASE("unique Gibbs state at finite temperature") {
    const AsymptoticResult r = asymptotic_state(build_liouvillian(kThermal), basis_state(Level::e));
    REQUIRE(r.kind == AsymptoticKind::Unique);
    const auto expected = testing::boltzmann(kThermal.beta, kThermal.omega1, kThermal.omega2);
    for (int k = 0; k < 3; ++k) CHECK(r.state->populations()[k] == doctest::Approx(expected[k]).epsilon(1e-10));
    CHECK(r.zero_mode_count == 1);
    CHECK(r.slowest_decay_rate > 0.0);
  }
  SUBCASE("degenerate Lambda system remembers its initial state") {
    const Liouvillian l = build_liouvillian(kLambdaDegenerate);
    const AsymptoticResult r = asymptotic_state(l, basis_state(Level::e));
    CHECK(r.kind == AsymptoticKind::InitialStateDependent);
    CHECK(r.zero_mode_count >= 4);
    REQUIRE(r.state);
    CHECK(max_abs(r.state->matrix() - propagate(l, basis_state(Level::e), 60.0).matrix()) < 1e-10);
  }
  SUBCASE("split Lambda system keeps a rotating ground coherence") {
    const SystemParams p = kLambdaDegenerate.with_splitting(0.25, kZeroTemperatureBeta);
    const AsymptoticResult r = asymptotic_state(build_liouvillian(p), basis_state(Level::e));
    REQUIRE(r.kind == AsymptoticKind::Oscillatory);
    REQUIRE(r.oscillation_frequencies.size() == 1);
    CHECK(r.oscillation_frequencies[0] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(!r.state);
    CHECK(r.time_average);
  }
  SUBCASE("split Lambda system without coherence settles") {
    const SystemParams p = kLambdaDegenerate.with_splitting(0.25, kZeroTemperatureBeta);
    const AsymptoticResult r = asymptotic_state(build_liouvillian(p), basis_state(Level::g1));
    CHECK(r.kind == AsymptoticKind::InitialStateDependent);
  }
}

TEST_CASE("evolution fallback agrees with the spectral path") {
  const AsymptoticResult a = asymptotic_state_by_evolution(build_liouvillian(kThermal), maximally_mixed());
  const AsymptoticResult b = asymptotic_state(build_liouvillian(kThermal), maximally_mixed());
  CHECK(a.used_fallback);
  CHECK(a.kind == AsymptoticKind::Unique);
  CHECK(max_abs(a.state->matrix() - b.state->matrix()) < 1e-9);

  const AsymptoticResult c = asymptotic_state_by_evolution(build_liouvillian(kLambdaDegenerate),
                                                           basis_state(Level::e));
  CHECK(c.kind == AsymptoticKind::InitialStateDependent);
}
