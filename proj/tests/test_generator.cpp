#include <doctest.h>

#include "support/oracles.hpp"
#include "support/random_params.hpp"
#include "thermlab/generator.hpp"

using namespace thermlab;
using testing::max_abs;

namespace {

Matrix3c random_hermitian(testing::Sampler& s) {
  Matrix3c m;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) m(i, k) = Complex(s.uniform(-1, 1), s.uniform(-1, 1));
  m = 0.5 * (m + m.adjoint()).eval();
  m(0, 0) += 1.0 - m.trace().real();
  return m;
}

Matrix3c applied(const Liouvillian& l, const Matrix3c& rho) {
  return unvectorize(l.matrix * vectorize(rho));
}

SystemParams ohmic(double delta, double beta) {
  return SystemParams::make_ohmic(1.0, 1.0 + delta, {0.3, kZeroTemperatureBeta, 0.0}, beta);
}

}  // namespace

TEST_CASE("generator matches the master equation term by term") {
  testing::Sampler sampler(101);
  for (int k = 0; k < 40; ++k) {
    const SystemParams p = sampler.params();
    const Liouvillian native = build_liouvillian(p);
    const Liouvillian standard = build_liouvillian(p, HamiltonianSign::Standard);
    for (int r = 0; r < 3; ++r) {
      const Matrix3c rho = random_hermitian(sampler);
      CHECK(max_abs(applied(native, rho) - testing::master_equation_rhs(p, rho)) < 1e-12);
      CHECK(max_abs(applied(standard, rho) - testing::master_equation_rhs(p, rho, false)) < 1e-12);
    }
  }
  // Ohmic edge: finite gamma3*nbar at delta = 0
  const SystemParams edge = validate_params(ohmic(0.0, 2.0));
  testing::Sampler s2(5);
  const Matrix3c rho = random_hermitian(s2);
  CHECK(max_abs(applied(build_liouvillian(edge), rho) - testing::master_equation_rhs(edge, rho)) < 1e-12);
}

TEST_CASE("generator examples") {
  SUBCASE("all rates zero and no splitting gives L = 0") {
    const auto p = SystemParams::make(1.0, 1.0, {}, kZeroTemperatureBeta);
    CHECK(build_liouvillian(p).max_abs() == 0.0);
  }
  SUBCASE("T = 0 decay of the excited state") {
    const auto p = SystemParams::make(1.0, 1.3, {0.7, 0.4, 0.2, 0.3, 0.2}, kZeroTemperatureBeta);
    const Matrix3c d = applied(build_liouvillian(p), basis_state(Level::e).matrix());
    CHECK(d(0, 0).real() == doctest::Approx(-1.1));
    CHECK(d(1, 1).real() == doctest::Approx(0.7));
    CHECK(d(2, 2).real() == doctest::Approx(0.4));
    // <sigma_g2g1> = rho(g1, g2) is pumped at (gamma12 + gamma21) / 2
    CHECK(d(1, 2).real() == doctest::Approx(0.25));
  }
  SUBCASE("invalid params are rejected") {
    const auto p = SystemParams::make(1.0, 1.0, {1.0, 1.0, 0.0, 1.5, 1.5}, kZeroTemperatureBeta);
    CHECK_THROWS_AS(build_liouvillian(p), ValidationError);
  }
}

TEST_CASE("trace and hermiticity preservation, spectrum in the left half plane") {
  testing::Sampler sampler(202);
  Vector9c vec_identity = vectorize(Matrix3c::Identity());
  for (int k = 0; k < 100; ++k) {
    const SystemParams p = sampler.params();
    const Liouvillian l = build_liouvillian(p);
    CHECK((vec_identity.adjoint() * l.matrix).cwiseAbs().maxCoeff() < 1e-12);
    const Matrix3c d = applied(l, random_hermitian(sampler));
    CHECK(max_abs(d - d.adjoint()) < 1e-12);
    Eigen::ComplexEigenSolver<Matrix9c> es(l.matrix, false);
    CHECK(es.eigenvalues().real().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("Gibbs state is a fixed point") {
  testing::Sampler sampler(303);
  for (int k = 0; k < 50; ++k) {
    const SystemParams p = sampler.params({testing::TemperatureMode::Finite});
    const auto pops = testing::boltzmann(p.beta, p.omega1, p.omega2);
    Matrix3c gibbs = Matrix3c::Zero();
    for (int i = 0; i < 3; ++i) gibbs(i, i) = pops[i];
    CHECK(max_abs(applied(build_liouvillian(p), gibbs)) < 1e-10);
  }
}

TEST_CASE("kernel dimension") {
  auto kernel_dim = [](const SystemParams& p) {
    Eigen::JacobiSVD<Matrix9c> svd(build_liouvillian(p).matrix);
    const auto& sv = svd.singularValues();
    int n = 0;
    for (int k = 0; k < 9; ++k) n += sv(k) < 1e-10 * std::max(1.0, sv(0));
    return n;
  };
  CHECK(kernel_dim(SystemParams::make(1.0, 1.4, {1.0, 0.5, 0.3, 0.2, 0.1}, 1.5)) == 1);
  CHECK(kernel_dim(SystemParams::make(1.0, 1.0, {1.0, 0.5, 0.0, 0.2, 0.1}, kZeroTemperatureBeta)) >= 3);
}

TEST_CASE("Bloch coordinates") {
  const auto zero_t = SystemParams::make(1.0, 1.3, {0.7, 0.4, 0.2, 0.1, 0.1}, kZeroTemperatureBeta);
  SUBCASE("examples at T = 0") {
    const BlochVector xe = bloch_from_density(basis_state(Level::e), zero_t);
    CHECK((xe.xr - Vector5d(1, 1, 0, 0, 0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(xe.xs.cwiseAbs().maxCoeff() == 0.0);
    const BlochVector xg1 = bloch_from_density(basis_state(Level::g1), zero_t);
    CHECK((xg1.xr - Vector5d(0, 0, 1, 0, 0)).cwiseAbs().maxCoeff() == 0.0);

    Matrix3c rho = Matrix3c::Zero();
    rho(1, 1) = rho(2, 2) = 0.5;
    rho(1, 2) = Complex(0.25, 0.5);
    rho(2, 1) = std::conj(rho(1, 2));
    const BlochVector xc = bloch_from_density(DensityMatrix::unchecked(rho), zero_t);
    CHECK(xc.xr(3) == doctest::Approx(0.25));
    CHECK(xc.xr(4) == doctest::Approx(0.5));
  }
  SUBCASE("inverse map") {
    BlochVector x;
    x.xr = Vector5d(0, 0, 1, 0, 0);
    CHECK(max_abs(density_from_bloch(x, zero_t).matrix() - basis_state(Level::g1).matrix()) < 1e-12);
    x.xr = Vector5d(2, 2, 0, 0, 0);
    CHECK_THROWS_AS(density_from_bloch(x, zero_t), Error);
    x.xr = Vector5d(1, 0.2, 0, 0, 0);  // inconsistent: first two differ at T = 0
    try {
      density_from_bloch(x, zero_t);
      FAIL("expected InconsistentBloch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InconsistentBloch);
    }
  }
  SUBCASE("round trip on random states") {
    testing::Sampler sampler(404);
    for (int k = 0; k < 100; ++k) {
      const SystemParams p = sampler.params();
      const DensityMatrix rho = sampler.state();
      const DensityMatrix back = density_from_bloch(bloch_from_density(rho, p), p);
      CHECK(max_abs(back.matrix() - rho.matrix()) < 1e-10);
    }
  }
  SUBCASE("undefined at delta = 0 and T > 0") {
    CHECK_THROWS_AS(bloch_from_density(maximally_mixed(), ohmic(0.0, 2.0)), Error);
  }
}

TEST_CASE("derived Bloch matrix") {
  testing::Sampler sampler(505);
  for (int k = 0; k < 30; ++k) {
    const SystemParams p = sampler.params();
    const Liouvillian l = build_liouvillian(p);
    const BlochMatrix m = derive_bloch_matrix(l);
    CHECK(m.provenance == BlochProvenance::Derived);
    CHECK(m.max_real_eigenvalue() <= 1e-10);

    // M X = d/dt X for X built from random states
    for (int r = 0; r < 3; ++r) {
      const DensityMatrix rho = sampler.state();
      const BlochVector x = bloch_from_density(rho, p);
      const Matrix3c d = applied(l, rho.matrix());
      const BlochVector dx = bloch_from_density(DensityMatrix::unchecked(d), p);
      // bloch_from_density is affine only through the trace, which d does not carry
      const Vector5d lhs = m.r * x.xr;
      CHECK((lhs - dx.xr).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((m.s * x.xs - dx.xs).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("Lambda limit matches the reduced equations at delta = 0") {
  const auto p = SystemParams::make(1.0, 1.0, {0.8, 0.5, 0.0, 0.3, 0.5}, kZeroTemperatureBeta);
  const LiouvillianSectors derived = liouvillian_sectors(build_liouvillian(p));
  const LiouvillianSectors reduced = lambda_bloch_transcribed(p);
  CHECK((derived.real_sector - reduced.real_sector).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((derived.optical - reduced.optical).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Lambda limit differs only in the rotation terms when delta > 0") {
  const double d = 0.3;
  const auto p = SystemParams::make(1.0, 1.0 + d, {0.8, 0.5, 0.0, 0.3, 0.5}, kZeroTemperatureBeta);
  const LiouvillianSectors derived = liouvillian_sectors(build_liouvillian(p));
  const LiouvillianSectors reduced = lambda_bloch_transcribed(p);
  Matrix5d diff = derived.real_sector - reduced.real_sector;
  // as implemented Re C' = +delta Im C, Im C' = -delta Re C; the reduced form has the opposite sign
  CHECK(diff(3, 4) == doctest::Approx(2 * d));
  CHECK(diff(4, 3) == doctest::Approx(-2 * d));
  diff(3, 4) = diff(4, 3) = 0.0;
  CHECK(diff.cwiseAbs().maxCoeff() < 1e-12);
  Eigen::Matrix2cd sdiff = derived.optical - reduced.optical;
  CHECK(std::abs(sdiff(1, 1) - Complex(0.0, d)) < 1e-12);
  sdiff(1, 1) = 0.0;
  CHECK(sdiff.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("transcribed Bloch matrix") {
  const auto p = SystemParams::make(1.0, 1.3, {0.7, 0.4, 0.2, 0.1, 0.1}, kZeroTemperatureBeta);
  const BlochMatrix t = build_bloch_matrix_transcribed(p);
  CHECK(t.provenance == BlochProvenance::Transcribed);
  CHECK(t.r(3, 3) == doctest::Approx(-0.1));
  CHECK(t.r(4, 4) == doctest::Approx(-0.1));

  const auto free = SystemParams::make(1.0, 1.3, {}, kZeroTemperatureBeta);
  const BlochMatrix f = build_bloch_matrix_transcribed(free);
  Matrix5d expected = Matrix5d::Zero();
  expected(3, 4) = 0.3;
  expected(4, 3) = -0.3;
  CHECK((f.r - expected).cwiseAbs().maxCoeff() < 1e-15);

  const BlochComparison c = compare_bloch(derive_bloch_matrix(build_liouvillian(p)), t, p);
  CHECK(c.max_r_diff_on_states >= 0.0);
  CHECK(std::isfinite(c.max_s_diff));
}
