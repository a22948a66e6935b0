#include "thermlab/micro_oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace thermlab {

std::array<double, 4> DiscretizedBath::implied_rates() const {
  const double scale = 2.0 * std::numbers::pi / bandwidth;
  const double g12 = scale * eta1.dot(eta2);
  return {scale * eta1.squaredNorm(), scale * eta2.squaredNorm(), g12, g12};
}

double DiscretizedBath::recurrence_time() const {
  return 2.0 * std::numbers::pi * mode_count / bandwidth;
}

DiscretizedBath build_bath(double gamma1, double gamma2, int sign, int mode_count,
                           double bandwidth, double center) {
  if (mode_count < 2 || !(bandwidth > 0.0) || !(gamma1 >= 0.0) || !(gamma2 >= 0.0) ||
      (sign != 1 && sign != -1 && sign != 0)) {
    throw Error(ErrorCode::DomainError,
                "bath needs N >= 2, bandwidth > 0, rates >= 0, sign in {-1, 0, 1}");
  }
  DiscretizedBath bath;
  bath.mode_count = mode_count;
  bath.bandwidth = bandwidth;
  bath.center = center;
  bath.sign = sign;
  bath.frequencies.resize(mode_count);
  bath.eta1 = Eigen::VectorXd::Zero(mode_count);
  bath.eta2 = Eigen::VectorXd::Zero(mode_count);

  const double spacing = bandwidth / mode_count;
  for (int j = 0; j < mode_count; ++j) {
    bath.frequencies(j) = center - 0.5 * bandwidth + (j + 0.5) * spacing;
  }

  // A constant coupling over n modes gives gamma = (2 pi / W) n eta^2.
  auto coupling = [&](double gamma, int n) {
    return std::sqrt(gamma * bandwidth / (2.0 * std::numbers::pi * n));
  };
  if (sign == 0) {
    const int n1 = (mode_count + 1) / 2;
    const int n2 = mode_count / 2;
    for (int j = 0; j < mode_count; ++j) {
      if (j % 2 == 0) bath.eta1(j) = coupling(gamma1, n1);
      else bath.eta2(j) = coupling(gamma2, n2);
    }
  } else {
    bath.eta1.setConstant(coupling(gamma1, mode_count));
    bath.eta2.setConstant(sign * coupling(gamma2, mode_count));
  }
  return bath;
}

double SingleExcitationState::norm() const {
  return std::sqrt(std::norm(c_e) + c1.squaredNorm() + c2.squaredNorm() + std::norm(b1) +
                   std::norm(b2));
}

SingleExcitationState SingleExcitationState::excited(int mode_count) {
  SingleExcitationState s;
  s.c_e = 1.0;
  s.c1 = Eigen::VectorXcd::Zero(mode_count);
  s.c2 = Eigen::VectorXcd::Zero(mode_count);
  return s;
}

SingleExcitationState SingleExcitationState::ground(Complex b1, Complex b2, int mode_count) {
  SingleExcitationState s;
  s.b1 = b1;
  s.b2 = b2;
  s.c1 = Eigen::VectorXcd::Zero(mode_count);
  s.c2 = Eigen::VectorXcd::Zero(mode_count);
  return s;
}

namespace {

// Packed layout: [c_e, c1 (N), c2 (N)].
ode::State pack(const SingleExcitationState& s) {
  const Eigen::Index n = s.c1.size();
  ode::State y(2 * n + 1);
  y(0) = s.c_e;
  y.segment(1, n) = s.c1;
  y.segment(1 + n, n) = s.c2;
  return y;
}

SingleExcitationState unpack(const ode::State& y, const SingleExcitationState& frozen, double t,
                             double delta) {
  const Eigen::Index n = (y.size() - 1) / 2;
  SingleExcitationState s;
  s.c_e = y(0);
  s.c1 = y.segment(1, n);
  s.c2 = y.segment(1 + n, n);
  s.b1 = frozen.b1;
  s.b2 = frozen.b2;
  s.t = t;
  s.delta = delta;
  return s;
}

}  // namespace

MicroTrajectory evolve_schrodinger(const DiscretizedBath& bath, const SingleExcitationState& psi0,
                                   double delta, double t_final,
                                   std::span<const double> sample_times,
                                   const MicroOptions& options) {
  const Eigen::Index n = bath.mode_count;
  if (psi0.c1.size() != n || psi0.c2.size() != n) {
    throw Error(ErrorCode::DomainError, "state has " + std::to_string(psi0.c1.size()) +
                                            " modes, bath has " + std::to_string(n));
  }
  if (!(delta >= 0.0) || !(t_final >= 0.0)) {
    throw Error(ErrorCode::DomainError, "need delta >= 0 and t_final >= 0");
  }
  const double norm0 = psi0.norm();
  if (std::abs(norm0 - 1.0) > 1e-10) {
    throw Error(ErrorCode::NormalizationError, "initial state norm " + std::to_string(norm0));
  }

  // i c_lj' = (omega_j - omega_el) c_lj + eta_lj c_e,  i c_e' = sum eta_lj c_lj.
  const Eigen::VectorXd detune1 = bath.frequencies.array() - (bath.center - 0.5 * delta);
  const Eigen::VectorXd detune2 = bath.frequencies.array() - (bath.center + 0.5 * delta);
  const Complex minus_i(0.0, -1.0);
  const ode::Rhs rhs = [&](double, const ode::State& y, ode::State& dy) {
    const auto c1 = y.segment(1, n);
    const auto c2 = y.segment(1 + n, n);
    dy(0) = minus_i * (bath.eta1.cast<Complex>().dot(c1) + bath.eta2.cast<Complex>().dot(c2));
    dy.segment(1, n) = minus_i * (detune1.cast<Complex>().cwiseProduct(c1) + y(0) * bath.eta1.cast<Complex>());
    dy.segment(1 + n, n) =
        minus_i * (detune2.cast<Complex>().cwiseProduct(c2) + y(0) * bath.eta2.cast<Complex>());
  };

  const double frozen_norm2 = std::norm(psi0.b1) + std::norm(psi0.b2);
  MicroTrajectory out;
  auto observe = [&](double, const ode::State& y) {
    const double drift = std::abs(std::sqrt(y.squaredNorm() + frozen_norm2) - norm0);
    out.max_norm_drift = std::max(out.max_norm_drift, drift);
  };

  ode::AdaptiveOptions adaptive;
  adaptive.rtol = options.rtol;
  adaptive.atol = options.atol;

  std::vector<double> samples(sample_times.begin(), sample_times.end());
  if (samples.empty()) samples.push_back(t_final);

  // Integrate segment by segment so every sample is an accepted step.
  ode::State y = pack(psi0);
  double t = 0.0;
  for (double ts : samples) {
    if (ts < t || ts > t_final) {
      throw Error(ErrorCode::DomainError,
                  "sample times must be increasing within [0, t_final]");
    }
    if (ts > t) {
      const ode::Solution seg = ode::integrate_dopri5(rhs, y, ts - t, {}, adaptive, observe);
      y = seg.states.back();
      out.stats.steps += seg.stats.steps;
      out.stats.rejected += seg.stats.rejected;
      out.stats.rhs_evaluations += seg.stats.rhs_evaluations;
      t = ts;
    }
    out.states.push_back(unpack(y, psi0, t, delta));
  }
  return out;
}

DensityMatrix reduced_density(const SingleExcitationState& s) {
  // E_g1 - E_g2 = delta with the excited energy at zero.
  const Complex phase = std::exp(Complex(0.0, s.delta * s.t));
  Matrix3c rho;
  rho(0, 0) = std::norm(s.c_e);
  rho(0, 1) = s.c_e * std::conj(s.b1);
  rho(0, 2) = s.c_e * std::conj(s.b2);
  rho(1, 1) = std::norm(s.b1) + s.c1.squaredNorm();
  rho(2, 2) = std::norm(s.b2) + s.c2.squaredNorm();
  rho(1, 2) = s.b1 * std::conj(s.b2) + phase * s.c2.dot(s.c1);  // dot conjugates its first argument
  rho(1, 0) = std::conj(rho(0, 1));
  rho(2, 0) = std::conj(rho(0, 2));
  rho(2, 1) = std::conj(rho(1, 2));
  // Integration keeps the norm to ~1e-10, looser than the default trace check.
  return DensityMatrix::from_matrix(rho, StateTolerance{1e-12, 1e-9, -1e-9});
}

SystemParams lindblad_params_for(const DiscretizedBath& bath, double delta) {
  const auto [g1, g2, g12, g21] = bath.implied_rates();
  DecayRates rates;
  rates.gamma1 = g1;
  rates.gamma2 = g2;
  rates.gamma3 = 0.0;
  rates.gamma12 = g12;
  rates.gamma21 = g21;
  return SystemParams::make(bath.center - 0.5 * delta, bath.center + 0.5 * delta, rates,
                            kZeroTemperatureBeta);
}

DensityMatrix to_interaction_frame(const DensityMatrix& rho, double delta, double t,
                                   HamiltonianSign sign) {
  // The generator's Hamiltonian is -delta*sigma_g2g2 (Paper) or +delta*sigma_g2g2.
  const double h22 = sign == HamiltonianSign::Paper ? -delta : delta;
  Matrix3c out = rho.matrix();
  const Complex phase = std::exp(Complex(0.0, h22 * t));  // e^{iHt} rho e^{-iHt}
  for (int k = 0; k < 3; ++k) {
    if (k == 2) continue;
    out(2, k) *= phase;
    out(k, 2) *= std::conj(phase);
  }
  return DensityMatrix::unchecked(out);
}

MicroComparison compare_micro_lindblad(const DiscretizedBath& bath,
                                       const SingleExcitationState& psi0, double delta,
                                       std::span<const double> sample_times,
                                       const MicroOptions& options) {
  if (sample_times.empty()) throw Error(ErrorCode::DomainError, "no sample times");
  const double t_final = sample_times.back();
  const MicroTrajectory micro = evolve_schrodinger(bath, psi0, delta, t_final, sample_times, options);
  const Liouvillian generator = build_liouvillian(lindblad_params_for(bath, delta));
  const DensityMatrix rho0 = reduced_density(psi0);

  MicroComparison cmp;
  cmp.recurrence_time = bath.recurrence_time();
  const auto rates = bath.implied_rates();
  const double gamma_max = std::max(rates[0], rates[1]);
  cmp.validity_window = std::min(gamma_max > 0.0 ? 10.0 / gamma_max : kZeroTemperatureBeta,
                                 0.5 * bath.mode_count / bath.bandwidth);
  cmp.max_norm_drift = micro.max_norm_drift;
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    const double t = sample_times[k];
    cmp.times.push_back(t);
    cmp.micro.push_back(reduced_density(micro.states[k]));
    cmp.lindblad.push_back(to_interaction_frame(propagate(generator, rho0, t), delta, t));
    const double gap = (cmp.micro.back().matrix() - cmp.lindblad.back().matrix()).cwiseAbs().maxCoeff();
    cmp.gaps.push_back(gap);
    cmp.max_gap = std::max(cmp.max_gap, gap);
  }
  return cmp;
}

}  // namespace thermlab
