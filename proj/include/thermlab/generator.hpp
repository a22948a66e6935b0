#pragma once

#include <vector>

#include "thermlab/model.hpp"

namespace thermlab {

using Matrix5d = Eigen::Matrix<double, 5, 5>;
using Vector5d = Eigen::Matrix<double, 5, 1>;

// Paper:    rho' contains -i[rho, delta*sigma_g2g2]  (default)
// Standard: rho' contains -i[delta*sigma_g2g2, rho]  (flipped, for sensitivity checks)
enum class HamiltonianSign { Paper, Standard };

std::string_view to_string(HamiltonianSign sign);
std::optional<HamiltonianSign> parse_hamiltonian_sign(std::string_view name);

/// Superoperator L with d vec(rho)/dt = L vec(rho), column-major vec.
struct Liouvillian {
  Matrix9c matrix;
  SystemParams params;
  HamiltonianSign sign = HamiltonianSign::Paper;

  Matrix3c apply(const Matrix3c& rho) const;
  double max_abs() const { return matrix.cwiseAbs().maxCoeff(); }
};

Liouvillian build_liouvillian(const SystemParams& params,
                              HamiltonianSign sign = HamiltonianSign::Paper);

enum class BlochProvenance { Transcribed, Derived };

std::string_view to_string(BlochProvenance provenance);

/// M = R (+) S acting on X = X_R (+) X_S.
struct BlochMatrix {
  Matrix5d r;
  Eigen::Matrix2cd s;
  BlochProvenance provenance = BlochProvenance::Derived;

  // Eigenvalues of R followed by those of S.
  std::vector<Complex> eigenvalues() const;
  double max_real_eigenvalue() const;
};

/// X_R = ((n1+1)p_e - n1 p_g1, (n2+1)p_e - n2 p_g2, (nD+1)p_g1 - nD p_g2, Re C, Im C),
/// C = <sigma_g2g1> = rho(g1, g2);  X_S = (<sigma_eg1>, <sigma_eg2>) = (rho(g1,e), rho(g2,e)).
struct BlochVector {
  Vector5d xr = Vector5d::Zero();
  Eigen::Vector2cd xs = Eigen::Vector2cd::Zero();
};

// Bloch coordinates need a finite n(delta): they are undefined (DomainError)
// when beta < inf and delta == 0.
BlochVector bloch_from_density(const DensityMatrix& rho, const SystemParams& params);
DensityMatrix density_from_bloch(const BlochVector& x, const SystemParams& params);

/// Linear map y -> X_R on y = (p_e, p_g1, p_g2, Re C, Im C). Rank 4: the
/// Gibbs populations span its kernel.
Matrix5d population_map(const SystemParams& params);

/// Blocks of L in plain expectation-value coordinates:
/// `real_sector` acts on y = (p_e, p_g1, p_g2, Re C, Im C), `optical` on X_S.
struct LiouvillianSectors {
  Matrix5d real_sector;
  Eigen::Matrix2cd optical;
};

LiouvillianSectors liouvillian_sectors(const Liouvillian& liouvillian);

BlochMatrix build_bloch_matrix_transcribed(const SystemParams& params);
BlochMatrix derive_bloch_matrix(const Liouvillian& liouvillian);

/// Reduced T = 0, gamma3 = 0 Lambda-system equations for (p_e, p_g1, p_g2, Re C, Im C)
/// and X_S in their published form (rotation term: Re C' = ... - delta Im C).
LiouvillianSectors lambda_bloch_transcribed(const SystemParams& params);

struct BlochComparison {
  Matrix5d r_diff;            // derived - transcribed, entrywise
  Eigen::Matrix2cd s_diff;
  Matrix5d r_diff_on_states;  // (R_derived - R_transcribed) * population_map
  double max_r_diff = 0.0;
  double max_s_diff = 0.0;
  double max_r_diff_on_states = 0.0;
};

BlochComparison compare_bloch(const BlochMatrix& derived, const BlochMatrix& transcribed,
                              const SystemParams& params);

}  // namespace thermlab
