#pragma once

#include <optional>
#include <span>
#include <vector>

#include "thermlab/generator.hpp"
#include "thermlab/ode.hpp"

namespace thermlab {

struct TrajectoryStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  // Worst invariant drift over every accepted step, not only the samples.
  double max_trace_drift = 0.0;
  double max_hermiticity_residual = 0.0;
  double min_eigenvalue = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  TrajectoryStats stats;
};

// RK4 on vec(rho). Requires dt <= 0.1 / max|L_ij| (StepTooLarge otherwise).
Trajectory evolve_fixed(const Liouvillian& liouvillian, const DensityMatrix& rho0, double t_final,
                        double dt, std::size_t record_every = 1);

Trajectory evolve_adaptive(const Liouvillian& liouvillian, const DensityMatrix& rho0,
                           double t_final, std::span<const double> sample_times,
                           const ode::AdaptiveOptions& options);

// exp(L t) via scaling and squaring; exactly the identity at t = 0.
Matrix9c propagator(const Liouvillian& liouvillian, double t);

DensityMatrix propagate(const Liouvillian& liouvillian, const DensityMatrix& rho0, double t);

struct SpectralOptions {
  double zero_tolerance = 1e-9;     // relative to max|L_ij|
  double cluster_tolerance = 1e-8;  // relative to max|L_ij|
};

struct EigenCluster {
  Complex eigenvalue;        // cluster mean
  std::vector<int> members;  // indices into eigenvalues
};

struct SpectralDecomposition {
  Vector9c eigenvalues;
  Matrix9c right;  // columns are right eigenvectors
  Matrix9c left;   // rows are left eigenvectors, left * right = I
  std::vector<int> zero_modes;
  std::vector<int> rotating_modes;
  std::vector<EigenCluster> clusters;
  double epsilon_zero = 0.0;
  double biorthogonality_residual = 0.0;
  double max_eigen_residual = 0.0;
};

// Throws DefectiveMatrix when the eigenvector basis cannot be biorthogonalized.
SpectralDecomposition decompose(const Liouvillian& liouvillian, const SpectralOptions& options = {});

/// Spectral projector onto the invariant subspace of an eigenvalue cluster of
/// size `multiplicity`, built from orthonormal right/left null-space bases.
Matrix9c cluster_projector(const Liouvillian& liouvillian, Complex eigenvalue, int multiplicity);

enum class AsymptoticKind { Unique, InitialStateDependent, Oscillatory };

std::string_view to_string(AsymptoticKind kind);

struct AsymptoticResult {
  AsymptoticKind kind = AsymptoticKind::Unique;
  std::optional<DensityMatrix> state;           // Unique / InitialStateDependent
  std::vector<double> oscillation_frequencies;  // Oscillatory, ascending
  std::optional<DensityMatrix> time_average;    // zero-mode projection, always set
  int zero_mode_count = 0;
  double slowest_decay_rate = 0.0;  // smallest nonzero |Re lambda|
  bool used_fallback = false;
};

AsymptoticResult asymptotic_state(const Liouvillian& liouvillian, const DensityMatrix& rho0,
                                  const SpectralOptions& options = {});

/// Long-time propagation until max|L vec(rho)| < 1e-10; uniqueness is judged
/// by comparing several initial states. Used when decompose() fails.
AsymptoticResult asymptotic_state_by_evolution(const Liouvillian& liouvillian,
                                               const DensityMatrix& rho0);

}  // namespace thermlab
