#pragma once

#include <array>
#include <string>
#include <vector>

#include "thermlab/dynamics.hpp"

namespace thermlab {

/// Boltzmann populations (p_e, p_g1, p_g2) at finite beta >= 0, with
/// p_gl = exp(beta*omega_l) / (1 + exp(beta*omega1) + exp(beta*omega2)).
std::array<double, 3> gibbs_populations(double beta, double omega1, double omega2);

DensityMatrix gibbs_state(double beta, double omega1, double omega2);

enum class EntropyUnit { Nats, Bits };

std::string_view to_string(EntropyUnit unit);

/// -sum p log p over the eigenvalues of rho, with 0 log 0 = 0.
double von_neumann_entropy(const DensityMatrix& rho, EntropyUnit unit = EntropyUnit::Nats);

// gamma_l / (gamma1 + gamma2); BothZero if the sum vanishes.
std::array<double, 2> branching_ratios(double gamma1, double gamma2);

/// Closed-form long-time state of the Lambda system (gamma3 = 0, T = 0):
/// the excited population is redistributed with the branching ratios and
/// feeds Re<sigma_g2g1> by (gamma12+gamma21)/(2(gamma1+gamma2)) p_e(0); ground
/// populations, Im<sigma_g2g1> persist; optical coherences vanish.
DensityMatrix antitherm_prediction(const DensityMatrix& rho0, double gamma1, double gamma2,
                                   double gamma12, double gamma21);

enum class LimitOrder { TemperatureFirst, SplittingFirst };

std::string_view to_string(LimitOrder order);
std::optional<LimitOrder> parse_limit_order(std::string_view name);

struct LimitPoint {
  double delta = 0.0;
  double beta = 0.0;  // +inf for T = 0
  std::array<double, 3> populations{};
  double entropy = 0.0;  // nats
};

struct LimitReport {
  LimitOrder order = LimitOrder::TemperatureFirst;
  std::vector<LimitPoint> sequence;  // outer iterates, each at its inner limit
  std::array<double, 3> populations{};
  double entropy = 0.0;  // nats
};

struct LimitScanOptions {
  LimitOrder order = LimitOrder::TemperatureFirst;
  int n_points = 60;
  double shrink_factor = 0.5;
  double tolerance = 1e-6;
};

/// Drives the two limits (beta -> inf, delta -> 0) in the requested order on
/// geometric sequences starting from the template's delta and beta.
/// TemperatureFirst: for each delta_k, beta grows until stable, then beta = inf
/// exactly. SplittingFirst (Ohmic template required): for each T_k, delta
/// shrinks until stable, then delta = 0 exactly. NoConvergence when an
/// iterate has no unique steady state or the sequence does not settle.
LimitReport ssb_limit_scan(const SystemParams& params_template, const LimitScanOptions& options);

enum class CellStatus { Ok, InitialStateDependent, Oscillatory, Invalid, NumericalFailure };

std::string_view to_string(CellStatus status);

struct EntropySurface {
  std::vector<double> delta_grid;
  std::vector<double> temperature_grid;
  Eigen::MatrixXd entropy;  // nats, rows = delta, cols = temperature; NaN unless Ok
  std::vector<CellStatus> status;  // row-major, same layout as entropy

  CellStatus status_at(std::size_t i_delta, std::size_t i_temperature) const {
    return status[i_delta * temperature_grid.size() + i_temperature];
  }
};

/// Steady-state entropy on a (delta, T) grid. T = 0 maps to beta = inf.
/// Cells run on `jobs` worker threads; results do not depend on the count.
EntropySurface entropy_surface(const std::vector<double>& delta_grid,
                               const std::vector<double>& temperature_grid,
                               const SystemParams& params_template, unsigned jobs = 1);

}  // namespace thermlab
