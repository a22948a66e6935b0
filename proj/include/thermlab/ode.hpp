#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace thermlab::ode {

using State = Eigen::VectorXcd;
using Rhs = std::function<void(double t, const State& y, State& dydt)>;
// Invoked at t = 0 and after every accepted step.
using StepObserver = std::function<void(double t, const State& y)>;

struct Stats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

struct Solution {
  std::vector<double> times;
  std::vector<State> states;
  Stats stats;
};

/// Classical RK4 with n = ceil(t_final/dt) equal steps of t_final/n.
/// Records every `record_every`-th step plus the endpoints.
Solution integrate_rk4(const Rhs& rhs, const State& y0, double t_final, double dt,
                       std::size_t record_every = 1, const StepObserver& observer = {});

struct AdaptiveOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  std::size_t max_steps = 10'000'000;
  double initial_step = 0.0;  // 0 selects automatically
  double max_step = std::numeric_limits<double>::infinity();
};

/// Dormand-Prince 5(4) with PI step control. Accepts a step when
/// max|err| <= max(rtol * max(|y|_inf, |y_new|_inf), atol). States at
/// `sample_times` come from the 4th-order continuous extension; with no
/// sample times every accepted step is recorded.
Solution integrate_dopri5(const Rhs& rhs, const State& y0, double t_final,
                          std::span<const double> sample_times, const AdaptiveOptions& options,
                          const StepObserver& observer = {});

}  // namespace thermlab::ode
