#include "thermlab/analysis.hpp"

#include <atomic>
#include <cmath>
#include <string>
#include <thread>

namespace thermlab {

std::array<double, 3> gibbs_populations(double beta, double omega1, double omega2) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::DomainError, "Gibbs populations need a finite beta >= 0");
  }
  // Shift exponents by the largest one so nothing overflows.
  const double top = std::max({0.0, omega1, omega2});
  const double we = std::exp(-beta * top);
  const double w1 = std::exp(beta * (omega1 - top));
  const double w2 = std::exp(beta * (omega2 - top));
  const double z = we + w1 + w2;
  return {we / z, w1 / z, w2 / z};
}

DensityMatrix gibbs_state(double beta, double omega1, double omega2) {
  const auto p = gibbs_populations(beta, omega1, omega2);
  Matrix3c rho = Matrix3c::Zero();
  for (int k = 0; k < 3; ++k) rho(k, k) = p[k];
  return DensityMatrix::from_matrix(rho);
}

std::string_view to_string(EntropyUnit unit) { return unit == EntropyUnit::Nats ? "nats" : "bits"; }

double von_neumann_entropy(const DensityMatrix& rho, EntropyUnit unit) {
  const Matrix3c herm = 0.5 * (rho.matrix() + rho.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix3c> solver(herm, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double p = solver.eigenvalues()(k);
    if (p > 0.0) s -= p * std::log(p);
  }
  if (s < 0.0) s = 0.0;
  return unit == EntropyUnit::Nats ? s : s / std::log(2.0);
}

std::array<double, 2> branching_ratios(double gamma1, double gamma2) {
  const double total = gamma1 + gamma2;
  if (!(total > 0.0)) throw Error(ErrorCode::BothZero, "gamma1 + gamma2 must be positive");
  return {gamma1 / total, gamma2 / total};
}

DensityMatrix antitherm_prediction(const DensityMatrix& rho0, double gamma1, double gamma2,
                                   double gamma12, double gamma21) {
  std::vector<Violation> violations;
  if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0)) {
    violations.push_back({ViolationKind::NegativeRate, "gamma1 and gamma2 must be >= 0"});
  } else {
    const double cross = 0.5 * (gamma12 + gamma21);
    if (gamma1 * gamma2 - cross * cross < -1e-12 * std::max(gamma1 * gamma2, cross * cross)) {
      violations.push_back({ViolationKind::KossakowskiViolation, "gamma1*gamma2 < ((gamma12+gamma21)/2)^2"});
    }
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));

  const auto [b1, b2] = branching_ratios(gamma1, gamma2);
  const Matrix3c& m = rho0.matrix();
  const double pe = m(0, 0).real();
  const double pump = (gamma12 + gamma21) / (2.0 * (gamma1 + gamma2));

  Matrix3c rho = Matrix3c::Zero();
  rho(1, 1) = m(1, 1).real() + b1 * pe;
  rho(2, 2) = m(2, 2).real() + b2 * pe;
  // C = <sigma_g2g1> = rho(g1, g2)
  rho(1, 2) = m(1, 2) + pump * pe;
  rho(2, 1) = std::conj(rho(1, 2));
  return DensityMatrix::from_matrix(rho);
}

std::string_view to_string(LimitOrder order) {
  return order == LimitOrder::TemperatureFirst ? "temperature-first" : "splitting-first";
}

std::optional<LimitOrder> parse_limit_order(std::string_view name) {
  if (name == "temperature-first") return LimitOrder::TemperatureFirst;
  if (name == "splitting-first") return LimitOrder::SplittingFirst;
  return std::nullopt;
}

namespace {

std::string describe(double delta, double beta) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "delta=%.6g, beta=%.6g", delta, beta);
  return buf;
}

LimitPoint steady_point(const SystemParams& templ, double delta, double beta) {
  const SystemParams params = templ.with_splitting(delta, beta);
  const AsymptoticResult res = asymptotic_state(build_liouvillian(params), maximally_mixed());
  if (res.kind != AsymptoticKind::Unique) {
    throw Error(ErrorCode::NoConvergence, "steady state at " + describe(delta, beta) + " is " +
                                              std::string(to_string(res.kind)) +
                                              " (no unique thermal state)");
  }
  LimitPoint pt;
  pt.delta = delta;
  pt.beta = beta;
  pt.populations = res.state->populations();
  pt.entropy = von_neumann_entropy(*res.state);
  return pt;
}

double change(const LimitPoint& a, const LimitPoint& b) {
  double d = std::abs(a.entropy - b.entropy);
  for (int k = 0; k < 3; ++k) d = std::max(d, std::abs(a.populations[k] - b.populations[k]));
  return d;
}

// Walks a geometric sequence until successive iterates agree, then evaluates
// the exact limit and checks it continues the sequence.
template <class PointAt>
LimitPoint settle(PointAt point_at, const LimitPoint& exact_limit, const LimitScanOptions& o,
                  const char* what) {
  LimitPoint prev = point_at(0);
  for (int m = 1; m < o.n_points; ++m) {
    LimitPoint next = point_at(m);
    if (change(prev, next) < o.tolerance) {
      if (change(next, exact_limit) >= o.tolerance) {
        throw Error(ErrorCode::NoConvergence,
                    std::string(what) + " limit is discontinuous at " +
                        describe(exact_limit.delta, exact_limit.beta));
      }
      return exact_limit;
    }
    prev = next;
  }
  throw Error(ErrorCode::NoConvergence,
              std::string(what) + " sequence did not settle within " + std::to_string(o.n_points) +
                  " points");
}

}  // namespace

LimitReport ssb_limit_scan(const SystemParams& params_template, const LimitScanOptions& options) {
  const SystemParams templ = validate_params(params_template);
  if (!(options.shrink_factor > 0.0 && options.shrink_factor < 1.0) || options.n_points < 2 ||
      !(options.tolerance > 0.0)) {
    throw Error(ErrorCode::DomainError, "limit scan needs shrink_factor in (0,1), n_points >= 2");
  }
  if (is_zero_temperature(templ.beta) || !(templ.delta > 0.0)) {
    throw Error(ErrorCode::DomainError,
                "limit scan template needs a finite starting temperature and delta > 0");
  }
  if (options.order == LimitOrder::SplittingFirst && !templ.ohmic) {
    throw Error(ErrorCode::DomainError,
                "splitting-first scan needs Ohmic rates so gamma3*n(delta) stays finite at delta = 0");
  }

  const double s = options.shrink_factor;
  LimitReport report;
  report.order = options.order;

  auto outer_point = [&](int k) -> LimitPoint {
    const double f = std::pow(s, k);
    if (options.order == LimitOrder::TemperatureFirst) {
      const double delta = templ.delta * f;
      const LimitPoint limit = steady_point(templ, delta, kZeroTemperatureBeta);
      return settle([&](int m) { return steady_point(templ, delta, templ.beta / std::pow(s, m)); },
                    limit, options, "temperature");
    }
    const double beta = templ.beta / f;
    const LimitPoint limit = steady_point(templ, 0.0, beta);
    return settle([&](int m) { return steady_point(templ, templ.delta * std::pow(s, m), beta); },
                  limit, options, "splitting");
  };

  report.sequence.push_back(outer_point(0));
  for (int k = 1; k < options.n_points; ++k) {
    report.sequence.push_back(outer_point(k));
    const auto& a = report.sequence[report.sequence.size() - 2];
    const auto& b = report.sequence.back();
    if (change(a, b) < options.tolerance) {
      report.populations = b.populations;
      report.entropy = b.entropy;
      return report;
    }
  }
  throw Error(ErrorCode::NoConvergence, "outer limit sequence did not settle within " +
                                            std::to_string(options.n_points) + " points");
}

std::string_view to_string(CellStatus status) {
  switch (status) {
    case CellStatus::Ok: return "ok";
    case CellStatus::InitialStateDependent: return "initial-state-dependent";
    case CellStatus::Oscillatory: return "oscillatory";
    case CellStatus::Invalid: return "invalid-params";
    case CellStatus::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

EntropySurface entropy_surface(const std::vector<double>& delta_grid,
                               const std::vector<double>& temperature_grid,
                               const SystemParams& params_template, unsigned jobs) {
  auto ascending = [](const std::vector<double>& g) {
    for (std::size_t k = 1; k < g.size(); ++k)
      if (!(g[k] > g[k - 1])) return false;
    return !g.empty();
  };
  if (!ascending(delta_grid) || !ascending(temperature_grid) || delta_grid.front() < 0.0 ||
      temperature_grid.front() < 0.0) {
    throw Error(ErrorCode::DomainError, "surface grids must be non-empty, non-negative, ascending");
  }

  const std::size_t nd = delta_grid.size();
  const std::size_t nt = temperature_grid.size();
  EntropySurface surf;
  surf.delta_grid = delta_grid;
  surf.temperature_grid = temperature_grid;
  surf.entropy = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(nd), static_cast<Eigen::Index>(nt),
                                           std::numeric_limits<double>::quiet_NaN());
  surf.status.assign(nd * nt, CellStatus::Ok);

  auto evaluate = [&](std::size_t cell) {
    const std::size_t i = cell / nt;
    const std::size_t j = cell % nt;
    const double t = temperature_grid[j];
    const double beta = t == 0.0 ? kZeroTemperatureBeta : 1.0 / t;
    CellStatus status = CellStatus::Ok;
    double s = std::numeric_limits<double>::quiet_NaN();
    try {
      const SystemParams params = validate_params(params_template.with_splitting(delta_grid[i], beta));
      const AsymptoticResult res = asymptotic_state(build_liouvillian(params), maximally_mixed());
      if (res.kind == AsymptoticKind::Unique) {
        s = von_neumann_entropy(*res.state);
      } else {
        status = res.kind == AsymptoticKind::Oscillatory ? CellStatus::Oscillatory
                                                         : CellStatus::InitialStateDependent;
      }
    } catch (const ValidationError&) {
      status = CellStatus::Invalid;
    } catch (const Error&) {
      status = CellStatus::NumericalFailure;
    }
    surf.status[cell] = status;
    surf.entropy(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
  };

  const std::size_t cells = nd * nt;
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  if (jobs <= 1) {
    for (std::size_t c = 0; c < cells; ++c) evaluate(c);
    return surf;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t c = next++; c < cells; c = next++) evaluate(c);
    });
  }
  for (auto& w : workers) w.join();
  return surf;
}

}  // namespace thermlab
