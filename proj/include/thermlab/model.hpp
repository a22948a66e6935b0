#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <limits>
#include <optional>
#include <string_view>

#include "thermlab/errors.hpp"

namespace thermlab {

using Complex = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;
using Vector9c = Eigen::Matrix<Complex, 9, 1>;
using Matrix9c = Eigen::Matrix<Complex, 9, 9>;

// Basis order is (e, g1, g2) everywhere, including vectorization.
enum class Level : int { e = 0, g1 = 1, g2 = 2 };

std::string_view to_string(Level level);
std::optional<Level> parse_level(std::string_view name);

// T = 0 is encoded as beta = +inf, never as a large finite number.
inline constexpr double kZeroTemperatureBeta = std::numeric_limits<double>::infinity();

inline bool is_zero_temperature(double beta) { return beta == kZeroTemperatureBeta; }

// Mean boson occupation 1/(exp(beta*omega) - 1); exactly 0 at beta = +inf.
double thermal_occupation(double omega, double beta);

/// Ohmic spectral mode gamma(omega) = alpha*omega for omega <= cutoff, 0 above.
/// The cross rates are gamma12 = gamma21 = interference*sqrt(gamma1*gamma2).
struct OhmicSpectrum {
  double alpha = 0.0;
  double cutoff = std::numeric_limits<double>::infinity();
  double interference = 0.0;

  double rate(double omega) const { return omega <= cutoff ? alpha * omega : 0.0; }
  bool operator==(const OhmicSpectrum&) const = default;
};

struct DecayRates {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 0.0;
  double gamma12 = 0.0;
  double gamma21 = 0.0;
};

/// Model parameters (hbar = k_B = 1). `delta` is stored redundantly and must
/// equal omega2 - omega1; use the factories so it is always computed.
struct SystemParams {
  double omega1 = 1.0;
  double omega2 = 1.0;
  double delta = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 0.0;
  double gamma12 = 0.0;
  double gamma21 = 0.0;
  double beta = kZeroTemperatureBeta;
  std::optional<OhmicSpectrum> ohmic;

  static SystemParams make(double omega1, double omega2, const DecayRates& rates, double beta);
  static SystemParams make_ohmic(double omega1, double omega2, const OhmicSpectrum& spectrum,
                                 double beta);

  // Same coupling model at a new splitting and inverse temperature; omega1 is
  // held fixed and omega2 = omega1 + delta. Ohmic rates are re-derived.
  SystemParams with_splitting(double new_delta, double new_beta) const;

  double temperature() const { return is_zero_temperature(beta) ? 0.0 : 1.0 / beta; }
  bool operator==(const SystemParams&) const = default;
};

SystemParams validate_params(const SystemParams& raw);

/// Thermal-weighted rates entering the dissipators. down/up refer to the
/// emission/absorption halves of each channel; channel 3 is g1 <-> g2.
struct ChannelRates {
  double down1 = 0.0;  // gamma1 (n1 + 1)
  double up1 = 0.0;    // gamma1 n1
  double down2 = 0.0;
  double up2 = 0.0;
  double down3 = 0.0;  // gamma3 (nDelta + 1)
  double up3 = 0.0;    // gamma3 nDelta
  double cross_down = 0.0;  // [gamma12 (n1 + 1) + gamma21 (n2 + 1)] / 2
  double cross_up12 = 0.0;  // gamma12 n1 / 2
  double cross_up21 = 0.0;  // gamma21 n2 / 2
};

ChannelRates channel_rates(const SystemParams& params);

struct Occupations {
  double n1 = 0.0;
  double n2 = 0.0;
  double n_delta = 0.0;  // +inf when beta < inf and delta == 0
};

Occupations occupations(const SystemParams& params);

struct StateTolerance {
  double hermiticity = 1e-12;
  double trace = 1e-12;
  double min_eigenvalue = -1e-10;
};

struct StateResiduals {
  double hermiticity = 0.0;  // max |rho - rho^dagger|
  double trace = 0.0;        // |Tr rho - 1|
  double min_eigenvalue = 0.0;

  bool within(const StateTolerance& tol) const {
    return hermiticity < tol.hermiticity && trace < tol.trace &&
           min_eigenvalue >= tol.min_eigenvalue;
  }
};

StateResiduals state_residuals(const Matrix3c& rho);

class DensityMatrix {
 public:
  DensityMatrix();  // |g2><g2|

  // Throws NotAState if any invariant fails at the given tolerance.
  static DensityMatrix from_matrix(const Matrix3c& rho, const StateTolerance& tol = {});
  // No checks; for integrator output whose drift is tracked separately.
  static DensityMatrix unchecked(const Matrix3c& rho);

  const Matrix3c& matrix() const { return rho_; }
  Complex operator()(Level row, Level col) const {
    return rho_(static_cast<int>(row), static_cast<int>(col));
  }
  double population(Level level) const {
    return rho_(static_cast<int>(level), static_cast<int>(level)).real();
  }
  std::array<double, 3> populations() const;
  StateResiduals residuals() const { return state_residuals(rho_); }

 private:
  explicit DensityMatrix(const Matrix3c& rho) : rho_(rho) {}
  Matrix3c rho_;
};

DensityMatrix basis_state(Level level);
DensityMatrix superposition(const Eigen::Vector3cd& amplitudes);
DensityMatrix maximally_mixed();

// Column-major vectorization: vec(rho)[i + 3 j] = rho(i, j).
Vector9c vectorize(const Matrix3c& rho);
Matrix3c unvectorize(const Vector9c& v);

}  // namespace thermlab
