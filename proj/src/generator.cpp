#include "thermlab/generator.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace thermlab {

std::string_view to_string(HamiltonianSign sign) {
  return sign == HamiltonianSign::Paper ? "paper" : "standard";
}

std::optional<HamiltonianSign> parse_hamiltonian_sign(std::string_view name) {
  if (name == "paper") return HamiltonianSign::Paper;
  if (name == "standard") return HamiltonianSign::Standard;
  return std::nullopt;
}

std::string_view to_string(BlochProvenance provenance) {
  return provenance == BlochProvenance::Transcribed ? "transcribed" : "derived";
}

namespace {

constexpr int kE = 0;
constexpr int kG1 = 1;
constexpr int kG2 = 2;

Matrix3c flip(int row, int col) {
  Matrix3c m = Matrix3c::Zero();
  m(row, col) = 1.0;
  return m;
}

Matrix9c kron(const Matrix3c& a, const Matrix3c& b) {
  Matrix9c out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
  return out;
}

// vec(A rho B) = (B^T kron A) vec(rho)
Matrix9c sandwich(const Matrix3c& a, const Matrix3c& b) { return kron(b.transpose(), a); }
Matrix9c left(const Matrix3c& a) { return sandwich(a, Matrix3c::Identity()); }
Matrix9c right(const Matrix3c& b) { return sandwich(Matrix3c::Identity(), b); }

// J rho J^dag - {J^dag J, rho}/2
Matrix9c dissipator(const Matrix3c& jump) {
  const Matrix3c jj = jump.adjoint() * jump;
  return sandwich(jump, jump.adjoint()) - 0.5 * left(jj) - 0.5 * right(jj);
}

double finite_n_delta(const SystemParams& params) {
  const Occupations occ = occupations(params);
  if (!std::isfinite(occ.n_delta)) {
    throw Error(ErrorCode::DomainError,
                "Bloch coordinates are undefined for delta = 0 at finite temperature");
  }
  return occ.n_delta;
}

Matrix3c matrix_from_real_sector(const Vector5d& y) {
  Matrix3c rho = Matrix3c::Zero();
  rho(kE, kE) = y(0);
  rho(kG1, kG1) = y(1);
  rho(kG2, kG2) = y(2);
  rho(kG1, kG2) = Complex(y(3), y(4));
  rho(kG2, kG1) = Complex(y(3), -y(4));
  return rho;
}

}  // namespace

Matrix3c Liouvillian::apply(const Matrix3c& rho) const {
  return unvectorize(matrix * vectorize(rho));
}

Liouvillian build_liouvillian(const SystemParams& params, HamiltonianSign sign) {
  const SystemParams p = validate_params(params);
  const ChannelRates k = channel_rates(p);
  const Complex i(0.0, 1.0);

  const Matrix3c s_g1e = flip(kG1, kE), s_eg1 = flip(kE, kG1);
  const Matrix3c s_g2e = flip(kG2, kE), s_eg2 = flip(kE, kG2);
  const Matrix3c s_g2g1 = flip(kG2, kG1), s_g1g2 = flip(kG1, kG2);
  const Matrix3c h = p.delta * flip(kG2, kG2);

  Matrix9c l = Matrix9c::Zero();

  // -i[rho, H] = -i(rho H - H rho)
  const double s = sign == HamiltonianSign::Paper ? 1.0 : -1.0;
  l += -i * s * (right(h) - left(h));

  l += k.down1 * dissipator(s_g1e) + k.up1 * dissipator(s_eg1);
  l += k.down2 * dissipator(s_g2e) + k.up2 * dissipator(s_eg2);
  l += k.down3 * dissipator(s_g2g1) + k.up3 * dissipator(s_g1g2);

  // Interference terms, exactly as grouped in the master equation.
  l += k.cross_down * (sandwich(s_g1e, s_eg2) + sandwich(s_g2e, s_eg1));
  const Matrix9c up_pair = sandwich(s_eg1, s_g2e) + sandwich(s_eg2, s_g1e);
  l += k.cross_up12 * (up_pair - left(s_g2g1) - right(s_g1g2));
  l += k.cross_up21 * (up_pair - left(s_g1g2) - right(s_g2g1));

  return Liouvillian{l, p, sign};
}

std::vector<Complex> BlochMatrix::eigenvalues() const {
  std::vector<Complex> out;
  Eigen::EigenSolver<Matrix5d> rs(r, false);
  for (int j = 0; j < 5; ++j) out.push_back(rs.eigenvalues()(j));
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> ss(s, false);
  for (int j = 0; j < 2; ++j) out.push_back(ss.eigenvalues()(j));
  return out;
}

double BlochMatrix::max_real_eigenvalue() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const Complex& z : eigenvalues()) best = std::max(best, z.real());
  return best;
}

Matrix5d population_map(const SystemParams& params) {
  const Occupations occ = occupations(params);
  const double nd = finite_n_delta(params);
  Matrix5d t = Matrix5d::Zero();
  t(0, 0) = occ.n1 + 1.0;
  t(0, 1) = -occ.n1;
  t(1, 0) = occ.n2 + 1.0;
  t(1, 2) = -occ.n2;
  t(2, 1) = nd + 1.0;
  t(2, 2) = -nd;
  t(3, 3) = 1.0;
  t(4, 4) = 1.0;
  return t;
}

BlochVector bloch_from_density(const DensityMatrix& rho, const SystemParams& params) {
  const Matrix3c& m = rho.matrix();
  Vector5d y;
  y << m(kE, kE).real(), m(kG1, kG1).real(), m(kG2, kG2).real(), m(kG1, kG2).real(),
      m(kG1, kG2).imag();
  BlochVector x;
  x.xr = population_map(params) * y;
  x.xs << m(kG1, kE), m(kG2, kE);
  return x;
}

DensityMatrix density_from_bloch(const BlochVector& x, const SystemParams& params) {
  const Matrix5d t = population_map(params);
  Eigen::Matrix<double, 4, 3> a;
  a.topRows<3>() = t.topLeftCorner<3, 3>();
  a.row(3).setOnes();
  Eigen::Vector4d b;
  b << x.xr(0), x.xr(1), x.xr(2), 1.0;

  const Eigen::Vector3d pops = a.colPivHouseholderQr().solve(b);
  const double residual = (a * pops - b).norm();
  if (!(residual < 1e-9)) {
    throw Error(ErrorCode::InconsistentBloch,
                "population equations have residual " + std::to_string(residual));
  }

  Matrix3c rho = Matrix3c::Zero();
  rho(kE, kE) = pops(0);
  rho(kG1, kG1) = pops(1);
  rho(kG2, kG2) = pops(2);
  rho(kG1, kG2) = Complex(x.xr(3), x.xr(4));
  rho(kG2, kG1) = std::conj(rho(kG1, kG2));
  rho(kG1, kE) = x.xs(0);
  rho(kE, kG1) = std::conj(x.xs(0));
  rho(kG2, kE) = x.xs(1);
  rho(kE, kG2) = std::conj(x.xs(1));
  return DensityMatrix::from_matrix(rho);
}

LiouvillianSectors liouvillian_sectors(const Liouvillian& liouvillian) {
  const double scale = std::max(1.0, liouvillian.max_abs());
  const double tol = 1e-12 * scale;
  LiouvillianSectors out;

  for (int k = 0; k < 5; ++k) {
    const Matrix3c d = liouvillian.apply(matrix_from_real_sector(Vector5d::Unit(k)));
    const double leak = std::max({std::abs(d(kE, kG1)), std::abs(d(kE, kG2)),
                                  std::abs(d(kG1, kE)), std::abs(d(kG2, kE)),
                                  std::abs(d(kE, kE).imag()), std::abs(d(kG1, kG1).imag()),
                                  std::abs(d(kG2, kG2).imag()),
                                  std::abs(d(kG2, kG1) - std::conj(d(kG1, kG2)))});
    if (leak > tol) {
      throw Error(ErrorCode::MapNotClosed,
                  "population/ground-coherence sector leaks " + std::to_string(leak));
    }
    out.real_sector.col(k) << d(kE, kE).real(), d(kG1, kG1).real(), d(kG2, kG2).real(),
        d(kG1, kG2).real(), d(kG1, kG2).imag();
  }

  const std::array<int, 2> rows{kG1, kG2};
  for (int k = 0; k < 2; ++k) {
    Matrix3c unit = Matrix3c::Zero();
    unit(rows[k], kE) = 1.0;
    Matrix3c d = liouvillian.apply(unit);
    out.optical(0, k) = d(kG1, kE);
    out.optical(1, k) = d(kG2, kE);
    d(kG1, kE) = 0.0;
    d(kG2, kE) = 0.0;
    const double leak = d.cwiseAbs().maxCoeff();
    if (leak > tol) {
      throw Error(ErrorCode::MapNotClosed, "optical-coherence sector leaks " + std::to_string(leak));
    }
  }
  return out;
}

BlochMatrix derive_bloch_matrix(const Liouvillian& liouvillian) {
  const LiouvillianSectors sectors = liouvillian_sectors(liouvillian);
  const Matrix5d t = population_map(liouvillian.params);
  const Matrix5d tg = t * sectors.real_sector;

  Eigen::CompleteOrthogonalDecomposition<Matrix5d> cod;
  cod.setThreshold(1e-10);
  cod.compute(t);
  const Matrix5d r = tg * cod.pseudoInverse();

  // R must reproduce T G on every physical state, i.e. the kernel of T
  // (the eliminated trace direction) must not feed back into X.
  const double closure = (r * t - tg).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, tg.cwiseAbs().maxCoeff());
  if (closure > 1e-12 * scale) {
    throw Error(ErrorCode::MapNotClosed,
                "X coordinates are not invariant, closure residual " + std::to_string(closure));
  }
  return BlochMatrix{r, sectors.optical, BlochProvenance::Derived};
}

BlochMatrix build_bloch_matrix_transcribed(const SystemParams& params) {
  const SystemParams p = validate_params(params);
  const Occupations occ = occupations(p);
  const double n1 = occ.n1;
  const double n2 = occ.n2;
  const double nd = finite_n_delta(p);
  const double g1 = p.gamma1, g2 = p.gamma2, g3 = p.gamma3;
  const double g12 = p.gamma12, g21 = p.gamma21;
  const double d = p.delta;

  const double r44 = -(g1 * n1 + g2 * n2 + g3 * (2.0 * nd + 1.0)) / 2.0;

  Matrix5d r;
  r << -g1 * (2 * n1 + 1), -g2 * (n1 + 1), g3 * n1,
      g12 * n1 * (n1 + 1) + g21 * n2 * (2 * n1 + 1), 0.0,
      //
      -g1 * (n2 + 1), -g2 * (2 * n2 + 1), -g3 * n2,
      g12 * n1 * (2 * n2 + 1) + g21 * n2 * (n2 + 1), 0.0,
      //
      g1 * (nd + 1), -g2 * nd, -g3 * (2 * nd + 1), g12 * nd * n1 - g21 * (nd + 1) * n2, 0.0,
      //
      g12 / 2, g21 / 2, 0.0, r44, d,
      //
      0.0, 0.0, 0.0, -d, r44;

  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd s;
  s(0, 0) = -0.5 * (g1 * (2 * n1 + 1) + g2 * (n2 + 1) + g3 * (nd + 1));
  s(0, 1) = -g21 / 2 * n2;
  s(1, 0) = i * d - 0.5 * (g2 * (2 * n2 + 1) + g1 * (n1 + 1) + g3 * nd);
  s(1, 1) = -g12 / 2 * n1;

  return BlochMatrix{r, s, BlochProvenance::Transcribed};
}

LiouvillianSectors lambda_bloch_transcribed(const SystemParams& params) {
  const SystemParams p = validate_params(params);
  const double g = p.gamma1 + p.gamma2;
  LiouvillianSectors out;
  out.real_sector.setZero();
  out.real_sector(0, 0) = -g;
  out.real_sector(1, 0) = p.gamma1;
  out.real_sector(2, 0) = p.gamma2;
  out.real_sector(3, 0) = 0.5 * (p.gamma12 + p.gamma21);
  out.real_sector(3, 4) = -p.delta;
  out.real_sector(4, 3) = p.delta;
  out.optical = -0.5 * g * Eigen::Matrix2cd::Identity();
  return out;
}

BlochComparison compare_bloch(const BlochMatrix& derived, const BlochMatrix& transcribed,
                              const SystemParams& params) {
  BlochComparison c;
  c.r_diff = derived.r - transcribed.r;
  c.s_diff = derived.s - transcribed.s;
  c.r_diff_on_states = c.r_diff * population_map(params);
  c.max_r_diff = c.r_diff.cwiseAbs().maxCoeff();
  c.max_s_diff = c.s_diff.cwiseAbs().maxCoeff();
  c.max_r_diff_on_states = c.r_diff_on_states.cwiseAbs().maxCoeff();
  return c;
}

}  // namespace thermlab
