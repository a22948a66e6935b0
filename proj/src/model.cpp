#include "thermlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace thermlab {

std::string_view to_string(Level level) {
  switch (level) {
    case Level::e: return "e";
    case Level::g1: return "g1";
    case Level::g2: return "g2";
  }
  return "?";
}

std::optional<Level> parse_level(std::string_view name) {
  if (name == "e") return Level::e;
  if (name == "g1") return Level::g1;
  if (name == "g2") return Level::g2;
  return std::nullopt;
}

double thermal_occupation(double omega, double beta) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw Error(ErrorCode::DomainError,
                "thermal occupation needs omega > 0, got " + std::to_string(omega));
  }
  if (!(beta > 0.0)) {
    throw Error(ErrorCode::DomainError,
                "thermal occupation needs beta > 0, got " + std::to_string(beta));
  }
  if (is_zero_temperature(beta)) return 0.0;
  return 1.0 / std::expm1(beta * omega);
}

SystemParams SystemParams::make(double omega1, double omega2, const DecayRates& rates,
                                double beta) {
  SystemParams p;
  p.omega1 = omega1;
  p.omega2 = omega2;
  p.delta = omega2 - omega1;
  p.gamma1 = rates.gamma1;
  p.gamma2 = rates.gamma2;
  p.gamma3 = rates.gamma3;
  p.gamma12 = rates.gamma12;
  p.gamma21 = rates.gamma21;
  p.beta = beta;
  return p;
}

SystemParams SystemParams::make_ohmic(double omega1, double omega2,
                                      const OhmicSpectrum& spectrum, double beta) {
  const double g1 = spectrum.rate(omega1);
  const double g2 = spectrum.rate(omega2);
  const double cross = spectrum.interference * std::sqrt(g1 * g2);
  SystemParams p = make(omega1, omega2, {g1, g2, spectrum.rate(omega2 - omega1), cross, cross},
                        beta);
  p.ohmic = spectrum;
  return p;
}

SystemParams SystemParams::with_splitting(double new_delta, double new_beta) const {
  if (ohmic) return make_ohmic(omega1, omega1 + new_delta, *ohmic, new_beta);
  return make(omega1, omega1 + new_delta, {gamma1, gamma2, gamma3, gamma12, gamma21}, new_beta);
}

namespace {

bool psd_2x2(double a, double b, double c) {
  // [[a, c], [c, b]] with a, b >= 0 already checked
  const double slack = 1e-12 * std::max({a * b, c * c, 1e-300});
  return a * b - c * c >= -slack;
}

bool close_rel(double x, double y) {
  return std::abs(x - y) <= 1e-12 * std::max({std::abs(x), std::abs(y), 1e-300});
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SystemParams validate_params(const SystemParams& raw) {
  std::vector<Violation> errors;

  const bool freq_ok = std::isfinite(raw.omega1) && raw.omega1 > 0.0 &&
                       std::isfinite(raw.omega2) && raw.omega2 > 0.0;
  if (!freq_ok) {
    errors.push_back({ViolationKind::NonPositiveFrequency,
                      "omega1=" + fmt_double(raw.omega1) + ", omega2=" + fmt_double(raw.omega2)});
  }

  const bool beta_ok = raw.beta > 0.0;  // false for NaN
  if (!beta_ok) {
    errors.push_back({ViolationKind::InvalidTemperature,
                      "beta must lie in (0, +inf], got " + fmt_double(raw.beta)});
  }

  const double unit = std::numeric_limits<double>::epsilon() *
                      std::max(std::abs(raw.omega1), std::abs(raw.omega2));
  if (!(std::abs(raw.delta - (raw.omega2 - raw.omega1)) <= unit)) {
    errors.push_back({ViolationKind::DeltaMismatch, "delta=" + fmt_double(raw.delta) +
                                                        " but omega2-omega1=" +
                                                        fmt_double(raw.omega2 - raw.omega1)});
  } else if (raw.delta < 0.0) {
    errors.push_back({ViolationKind::DeltaMismatch,
                      "delta must be >= 0 (omega2 >= omega1), got " + fmt_double(raw.delta)});
  }

  const std::array<std::pair<const char*, double>, 3> direct{
      {{"gamma1", raw.gamma1}, {"gamma2", raw.gamma2}, {"gamma3", raw.gamma3}}};
  bool rates_ok = true;
  for (const auto& [name, value] : direct) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      errors.push_back({ViolationKind::NegativeRate, std::string(name) + "=" + fmt_double(value)});
      rates_ok = false;
    }
  }
  for (const auto& [name, value] : {std::pair{"gamma12", raw.gamma12}, {"gamma21", raw.gamma21}}) {
    if (!std::isfinite(value)) {
      errors.push_back({ViolationKind::NegativeRate, std::string(name) + " is not finite"});
      rates_ok = false;
    }
  }

  if (beta_ok && !is_zero_temperature(raw.beta) && raw.gamma3 > 0.0 && raw.delta == 0.0 &&
      !raw.ohmic) {
    errors.push_back({ViolationKind::DivergentOccupation,
                      "gamma3 > 0 with delta = 0 at finite temperature"});
  }

  if (freq_ok && beta_ok && rates_ok) {
    const double n1 = thermal_occupation(raw.omega1, raw.beta);
    const double n2 = thermal_occupation(raw.omega2, raw.beta);
    const double a_down = raw.gamma1 * (n1 + 1.0);
    const double b_down = raw.gamma2 * (n2 + 1.0);
    const double c_down = 0.5 * (raw.gamma12 * (n1 + 1.0) + raw.gamma21 * (n2 + 1.0));
    if (!psd_2x2(a_down, b_down, c_down)) {
      errors.push_back({ViolationKind::KossakowskiViolation,
                        "emission block: " + fmt_double(a_down * b_down) + " < " +
                            fmt_double(c_down * c_down)});
    }
    const double a_up = raw.gamma1 * n1;
    const double b_up = raw.gamma2 * n2;
    const double c_up = 0.5 * (raw.gamma12 * n1 + raw.gamma21 * n2);
    if (!psd_2x2(a_up, b_up, c_up)) {
      errors.push_back({ViolationKind::KossakowskiViolation,
                        "absorption block: " + fmt_double(a_up * b_up) + " < " +
                            fmt_double(c_up * c_up)});
    }
  }

  if (raw.ohmic && freq_ok) {
    const auto& s = *raw.ohmic;
    const double g1 = s.rate(raw.omega1);
    const double g2 = s.rate(raw.omega2);
    const double cross = s.interference * std::sqrt(g1 * g2);
    const bool ok = s.alpha >= 0.0 && std::abs(s.interference) <= 1.0 &&
                    close_rel(raw.gamma1, g1) && close_rel(raw.gamma2, g2) &&
                    close_rel(raw.gamma3, s.rate(raw.delta)) && close_rel(raw.gamma12, cross) &&
                    close_rel(raw.gamma21, cross);
    if (!ok) {
      errors.push_back({ViolationKind::OhmicMismatch,
                        "rates disagree with the Ohmic spectrum (alpha=" + fmt_double(s.alpha) +
                            ", interference=" + fmt_double(s.interference) + ")"});
    }
  }

  if (!errors.empty()) throw ValidationError(std::move(errors));
  return raw;
}

Occupations occupations(const SystemParams& params) {
  Occupations occ;
  occ.n1 = thermal_occupation(params.omega1, params.beta);
  occ.n2 = thermal_occupation(params.omega2, params.beta);
  if (is_zero_temperature(params.beta)) {
    occ.n_delta = 0.0;
  } else if (params.delta > 0.0) {
    occ.n_delta = thermal_occupation(params.delta, params.beta);
  } else {
    occ.n_delta = std::numeric_limits<double>::infinity();
  }
  return occ;
}

ChannelRates channel_rates(const SystemParams& params) {
  const double n1 = thermal_occupation(params.omega1, params.beta);
  const double n2 = thermal_occupation(params.omega2, params.beta);

  ChannelRates r;
  r.down1 = params.gamma1 * (n1 + 1.0);
  r.up1 = params.gamma1 * n1;
  r.down2 = params.gamma2 * (n2 + 1.0);
  r.up2 = params.gamma2 * n2;

  if (params.ohmic) {
    const auto& s = *params.ohmic;
    if (params.delta > s.cutoff) {
      r.down3 = r.up3 = 0.0;
    } else if (is_zero_temperature(params.beta)) {
      r.down3 = s.alpha * params.delta;
      r.up3 = 0.0;
    } else {
      // alpha*delta*n(delta) = (alpha/beta) * x/expm1(x), finite as delta -> 0
      const double x = params.beta * params.delta;
      const double ratio = x == 0.0 ? 1.0 : x / std::expm1(x);
      r.up3 = s.alpha / params.beta * ratio;
      r.down3 = r.up3 + s.alpha * params.delta;
    }
  } else if (params.gamma3 > 0.0) {
    if (is_zero_temperature(params.beta)) {
      r.down3 = params.gamma3;
      r.up3 = 0.0;
    } else {
      const double nd = thermal_occupation(params.delta, params.beta);
      r.down3 = params.gamma3 * (nd + 1.0);
      r.up3 = params.gamma3 * nd;
    }
  }

  r.cross_down = 0.5 * (params.gamma12 * (n1 + 1.0) + params.gamma21 * (n2 + 1.0));
  r.cross_up12 = 0.5 * params.gamma12 * n1;
  r.cross_up21 = 0.5 * params.gamma21 * n2;
  return r;
}

StateResiduals state_residuals(const Matrix3c& rho) {
  StateResiduals res;
  res.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  res.trace = std::abs(rho.trace() - Complex(1.0, 0.0));
  const Matrix3c herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix3c> solver(herm, Eigen::EigenvaluesOnly);
  res.min_eigenvalue = solver.eigenvalues().minCoeff();
  return res;
}

DensityMatrix::DensityMatrix() : rho_(Matrix3c::Zero()) { rho_(2, 2) = 1.0; }

DensityMatrix DensityMatrix::from_matrix(const Matrix3c& rho, const StateTolerance& tol) {
  if (!rho.allFinite()) throw Error(ErrorCode::NotAState, "matrix has non-finite entries");
  const StateResiduals res = state_residuals(rho);
  if (!res.within(tol)) {
    throw Error(ErrorCode::NotAState,
                "hermiticity residual " + fmt_double(res.hermiticity) + ", trace residual " +
                    fmt_double(res.trace) + ", min eigenvalue " + fmt_double(res.min_eigenvalue));
  }
  return DensityMatrix(rho);
}

DensityMatrix DensityMatrix::unchecked(const Matrix3c& rho) { return DensityMatrix(rho); }

std::array<double, 3> DensityMatrix::populations() const {
  return {rho_(0, 0).real(), rho_(1, 1).real(), rho_(2, 2).real()};
}

DensityMatrix basis_state(Level level) {
  Matrix3c rho = Matrix3c::Zero();
  const int i = static_cast<int>(level);
  rho(i, i) = 1.0;
  return DensityMatrix::from_matrix(rho);
}

DensityMatrix superposition(const Eigen::Vector3cd& amplitudes) {
  const double norm2 = amplitudes.squaredNorm();
  if (!(std::abs(norm2 - 1.0) < 1e-12)) {
    throw Error(ErrorCode::NormalizationError,
                "amplitudes have squared norm " + fmt_double(norm2));
  }
  return DensityMatrix::from_matrix(amplitudes * amplitudes.adjoint());
}

DensityMatrix maximally_mixed() {
  return DensityMatrix::from_matrix(Matrix3c::Identity() / 3.0);
}

Vector9c vectorize(const Matrix3c& rho) {
  return Eigen::Map<const Vector9c>(rho.data());
}

Matrix3c unvectorize(const Vector9c& v) {
  return Eigen::Map<const Matrix3c>(v.data());
}

}  // namespace thermlab
