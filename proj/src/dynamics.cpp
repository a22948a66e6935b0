#include "thermlab/dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace thermlab {

std::string_view to_string(AsymptoticKind kind) {
  switch (kind) {
    case AsymptoticKind::Unique: return "Unique";
    case AsymptoticKind::InitialStateDependent: return "InitialStateDependent";
    case AsymptoticKind::Oscillatory: return "Oscillatory";
  }
  return "?";
}

namespace {

class DriftMonitor {
 public:
  void observe(const ode::State& v) {
    const StateResiduals r = state_residuals(unvectorize(v));
    stats_.max_trace_drift = std::max(stats_.max_trace_drift, r.trace);
    stats_.max_hermiticity_residual = std::max(stats_.max_hermiticity_residual, r.hermiticity);
    stats_.min_eigenvalue = first_ ? r.min_eigenvalue : std::min(stats_.min_eigenvalue, r.min_eigenvalue);
    first_ = false;
  }
  TrajectoryStats stats() const { return stats_; }

 private:
  TrajectoryStats stats_;
  bool first_ = true;
};

Trajectory to_trajectory(const ode::Solution& sol, TrajectoryStats stats) {
  Trajectory traj;
  traj.times = sol.times;
  traj.states.reserve(sol.states.size());
  for (const auto& v : sol.states) traj.states.push_back(DensityMatrix::unchecked(unvectorize(v)));
  stats.steps = sol.stats.steps;
  stats.rejected = sol.stats.rejected;
  traj.stats = stats;
  return traj;
}

ode::Rhs linear_rhs(const Liouvillian& liouvillian) {
  return [&m = liouvillian.matrix](double, const ode::State& y, ode::State& dy) { dy.noalias() = m * y; };
}

Matrix3c hermitize(const Matrix3c& m) { return 0.5 * (m + m.adjoint()); }

constexpr StateTolerance kProjectedTolerance{1e-10, 1e-10, -1e-9};

}  // namespace

Trajectory evolve_fixed(const Liouvillian& liouvillian, const DensityMatrix& rho0, double t_final,
                        double dt, std::size_t record_every) {
  const double norm = liouvillian.max_abs();
  if (norm > 0.0 && dt > 0.1 / norm) {
    throw Error(ErrorCode::StepTooLarge, "dt = " + std::to_string(dt) + " exceeds 0.1/max|L| = " +
                                             std::to_string(0.1 / norm));
  }
  DriftMonitor monitor;
  const ode::Solution sol = ode::integrate_rk4(
      linear_rhs(liouvillian), vectorize(rho0.matrix()), t_final, dt, record_every,
      [&](double, const ode::State& y) { monitor.observe(y); });
  return to_trajectory(sol, monitor.stats());
}

Trajectory evolve_adaptive(const Liouvillian& liouvillian, const DensityMatrix& rho0,
                           double t_final, std::span<const double> sample_times,
                           const ode::AdaptiveOptions& options) {
  DriftMonitor monitor;
  const ode::Solution sol = ode::integrate_dopri5(
      linear_rhs(liouvillian), vectorize(rho0.matrix()), t_final, sample_times, options,
      [&](double, const ode::State& y) { monitor.observe(y); });
  return to_trajectory(sol, monitor.stats());
}

Matrix9c propagator(const Liouvillian& liouvillian, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::DomainError, "propagator needs t >= 0");
  if (t == 0.0) return Matrix9c::Identity();
  const Matrix9c lt = liouvillian.matrix * t;
  return lt.exp();
}

DensityMatrix propagate(const Liouvillian& liouvillian, const DensityMatrix& rho0, double t) {
  return DensityMatrix::unchecked(unvectorize(propagator(liouvillian, t) * vectorize(rho0.matrix())));
}

SpectralDecomposition decompose(const Liouvillian& liouvillian, const SpectralOptions& options) {
  const double norm = liouvillian.max_abs();

  Eigen::ComplexEigenSolver<Matrix9c> solver(liouvillian.matrix, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::DefectiveMatrix, "eigenvalue iteration did not converge");
  }

  SpectralDecomposition dec;
  dec.eigenvalues = solver.eigenvalues();
  dec.right = solver.eigenvectors();
  dec.epsilon_zero = options.zero_tolerance * norm;

  Eigen::FullPivLU<Matrix9c> lu(dec.right);
  if (!lu.isInvertible() || lu.rcond() < 1e-12) {
    throw Error(ErrorCode::DefectiveMatrix, "eigenvector matrix is singular");
  }
  dec.left = lu.inverse();
  dec.biorthogonality_residual =
      (dec.left * dec.right - Matrix9c::Identity()).cwiseAbs().maxCoeff();
  for (int j = 0; j < 9; ++j) {
    const auto v = dec.right.col(j).normalized();
    const double r =
        (liouvillian.matrix * v - dec.eigenvalues(j) * v).norm() / std::max(1.0, norm);
    dec.max_eigen_residual = std::max(dec.max_eigen_residual, r);
  }
  if (dec.biorthogonality_residual > 1e-8 || dec.max_eigen_residual > 1e-8) {
    throw Error(ErrorCode::DefectiveMatrix,
                "biorthogonality residual " + std::to_string(dec.biorthogonality_residual) +
                    ", eigen residual " + std::to_string(dec.max_eigen_residual));
  }

  // Single-linkage clustering of near-degenerate eigenvalues.
  std::array<int, 9> parent{};
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  const double cluster_tol = options.cluster_tolerance * norm;
  for (int a = 0; a < 9; ++a)
    for (int b = a + 1; b < 9; ++b)
      if (std::abs(dec.eigenvalues(a) - dec.eigenvalues(b)) <= cluster_tol) parent[find(a)] = find(b);

  for (int root = 0; root < 9; ++root) {
    EigenCluster cluster;
    for (int j = 0; j < 9; ++j)
      if (find(j) == root) cluster.members.push_back(j);
    if (cluster.members.empty()) continue;
    Complex sum = 0.0;
    for (int j : cluster.members) sum += dec.eigenvalues(j);
    cluster.eigenvalue = sum / static_cast<double>(cluster.members.size());
    dec.clusters.push_back(std::move(cluster));
  }

  for (int j = 0; j < 9; ++j) {
    const Complex z = dec.eigenvalues(j);
    if (std::abs(z.real()) > dec.epsilon_zero) continue;
    (std::abs(z.imag()) <= dec.epsilon_zero ? dec.zero_modes : dec.rotating_modes).push_back(j);
  }
  return dec;
}

Matrix9c cluster_projector(const Liouvillian& liouvillian, Complex eigenvalue, int multiplicity) {
  const Matrix9c shifted = liouvillian.matrix - eigenvalue * Matrix9c::Identity();
  Eigen::JacobiSVD<Matrix9c> svd(shifted, Eigen::ComputeFullU | Eigen::ComputeFullV);
  // Singular values are sorted descending; the last `multiplicity` vectors span
  // the right (V) and left (U) null spaces.
  const auto right = svd.matrixV().rightCols(multiplicity);
  const auto left = svd.matrixU().rightCols(multiplicity);
  const Eigen::MatrixXcd overlap = left.adjoint() * right;
  return right * overlap.fullPivLu().solve(Eigen::MatrixXcd(left.adjoint()));
}

AsymptoticResult asymptotic_state(const Liouvillian& liouvillian, const DensityMatrix& rho0,
                                  const SpectralOptions& options) {
  SpectralDecomposition dec;
  try {
    dec = decompose(liouvillian, options);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DefectiveMatrix) throw;
    return asymptotic_state_by_evolution(liouvillian, rho0);
  }
  if (dec.zero_modes.empty()) {
    throw Error(ErrorCode::NoConvergence, "generator has no zero mode");
  }

  const Vector9c v0 = vectorize(rho0.matrix());
  AsymptoticResult result;
  result.zero_mode_count = static_cast<int>(dec.zero_modes.size());

  const Matrix9c p0 = cluster_projector(liouvillian, 0.0, result.zero_mode_count);
  const Matrix3c projected = hermitize(unvectorize(p0 * v0));
  result.time_average = DensityMatrix::from_matrix(projected, kProjectedTolerance);

  result.slowest_decay_rate = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 9; ++j) {
    const double re = std::abs(dec.eigenvalues(j).real());
    if (re > dec.epsilon_zero) result.slowest_decay_rate = std::min(result.slowest_decay_rate, re);
  }
  if (!std::isfinite(result.slowest_decay_rate)) result.slowest_decay_rate = 0.0;

  for (const EigenCluster& c : dec.clusters) {
    if (std::abs(c.eigenvalue.real()) > dec.epsilon_zero ||
        std::abs(c.eigenvalue.imag()) <= dec.epsilon_zero) {
      continue;
    }
    const Matrix9c pc =
        cluster_projector(liouvillian, c.eigenvalue, static_cast<int>(c.members.size()));
    if ((pc * v0).cwiseAbs().maxCoeff() > 1e-9) {
      result.oscillation_frequencies.push_back(std::abs(c.eigenvalue.imag()));
    }
  }

  if (!result.oscillation_frequencies.empty()) {
    auto& f = result.oscillation_frequencies;
    std::sort(f.begin(), f.end());
    const double tol = options.cluster_tolerance * liouvillian.max_abs();
    f.erase(std::unique(f.begin(), f.end(), [tol](double a, double b) { return b - a <= tol; }),
            f.end());
    result.kind = AsymptoticKind::Oscillatory;
    return result;
  }
  result.kind = result.zero_mode_count == 1 ? AsymptoticKind::Unique
                                            : AsymptoticKind::InitialStateDependent;
  result.state = result.time_average;
  return result;
}

AsymptoticResult asymptotic_state_by_evolution(const Liouvillian& liouvillian,
                                               const DensityMatrix& rho0) {
  const double norm = liouvillian.max_abs();
  auto settle = [&](const DensityMatrix& start) -> std::optional<Matrix3c> {
    if (norm == 0.0) return start.matrix();
    double t = 1.0 / norm;
    for (int k = 0; k < 80; ++k, t *= 2.0) {
      const Vector9c v = propagator(liouvillian, t) * vectorize(start.matrix());
      if ((liouvillian.matrix * v).cwiseAbs().maxCoeff() < 1e-10) return hermitize(unvectorize(v));
    }
    return std::nullopt;
  };

  const auto target = settle(rho0);
  if (!target) {
    throw Error(ErrorCode::NoConvergence, "long-time propagation did not reach a fixed point");
  }

  AsymptoticResult result;
  result.used_fallback = true;
  result.kind = AsymptoticKind::Unique;
  for (const DensityMatrix& probe : {maximally_mixed(), basis_state(Level::e),
                                     basis_state(Level::g1), basis_state(Level::g2)}) {
    const auto other = settle(probe);
    if (!other || (*other - *target).cwiseAbs().maxCoeff() > 1e-8) {
      result.kind = AsymptoticKind::InitialStateDependent;
      break;
    }
  }
  result.state = DensityMatrix::from_matrix(*target, kProjectedTolerance);
  result.time_average = result.state;
  result.zero_mode_count = result.kind == AsymptoticKind::Unique ? 1 : 0;
  return result;
}

}  // namespace thermlab
