#pragma once

#include <array>
#include <span>
#include <vector>

#include "thermlab/dynamics.hpp"

namespace thermlab {

/// N bath modes on a flat band [center - W/2, center + W/2] at the cell
/// midpoints, with real constant couplings to the e-g1 and e-g2 transitions.
struct DiscretizedBath {
  int mode_count = 0;
  double bandwidth = 0.0;
  double center = 0.0;
  int sign = 1;  // +1 / -1 common bath, 0 disjoint interleaved supports
  Eigen::VectorXd frequencies;
  Eigen::VectorXd eta1;
  Eigen::VectorXd eta2;

  /// (gamma1, gamma2, gamma12, gamma21) with gamma_lm = (2 pi / W) sum_j eta_lj eta_mj.
  std::array<double, 4> implied_rates() const;
  /// Revival time 2 pi N / W of the discrete spectrum.
  double recurrence_time() const;
};

// sign = 0 puts g1 on even modes and g2 on odd ones, so N >= 2 is required.
DiscretizedBath build_bath(double gamma1, double gamma2, int sign, int mode_count,
                           double bandwidth, double center);

/// Single-excitation amplitudes at T = 0. c_e and c_lj are Schrodinger
/// amplitudes with the excited-state energy set to zero; b_l are kept in the
/// interaction picture and never change.
struct SingleExcitationState {
  Complex c_e = 0.0;
  Eigen::VectorXcd c1;
  Eigen::VectorXcd c2;
  Complex b1 = 0.0;
  Complex b2 = 0.0;
  double t = 0.0;
  double delta = 0.0;

  double norm() const;

  static SingleExcitationState excited(int mode_count);
  static SingleExcitationState ground(Complex b1, Complex b2, int mode_count);
};

struct MicroOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
};

struct MicroTrajectory {
  std::vector<SingleExcitationState> states;
  double max_norm_drift = 0.0;  // over every accepted step
  ode::Stats stats;
};

/// Transitions sit at center -+ delta/2 (e-g1 below e-g2, matching
/// omega2 = omega1 + delta). Uses the adaptive Dormand-Prince integrator.
MicroTrajectory evolve_schrodinger(const DiscretizedBath& bath, const SingleExcitationState& psi0,
                                   double delta, double t_final,
                                   std::span<const double> sample_times,
                                   const MicroOptions& options = {});

/// Partial trace over the bath, in the interaction picture of the bare
/// atomic Hamiltonian: rho_glgm = b_l b_m* + exp(i(E_l - E_m)t) sum_j c_lj c_mj*.
DensityMatrix reduced_density(const SingleExcitationState& state);

/// Master-equation parameters matching a bath: T = 0, gamma3 = 0, implied rates.
SystemParams lindblad_params_for(const DiscretizedBath& bath, double delta);

/// Moves a master-equation state at time t into the frame of reduced_density()
/// by undoing the generator's delta * sigma_g2g2 rotation.
DensityMatrix to_interaction_frame(const DensityMatrix& rho, double delta, double t,
                                   HamiltonianSign sign = HamiltonianSign::Paper);

struct MicroComparison {
  std::vector<double> times;
  std::vector<DensityMatrix> micro;
  std::vector<DensityMatrix> lindblad;
  std::vector<double> gaps;  // max-norm per sample
  double max_gap = 0.0;
  double recurrence_time = 0.0;
  double validity_window = 0.0;  // min(10 / gamma_max, 0.5 * N / W)
  double max_norm_drift = 0.0;
};

MicroComparison compare_micro_lindblad(const DiscretizedBath& bath,
                                       const SingleExcitationState& psi0, double delta,
                                       std::span<const double> sample_times,
                                       const MicroOptions& options = {});

}  // namespace thermlab
