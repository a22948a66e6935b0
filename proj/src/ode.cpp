#include "thermlab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thermlab/errors.hpp"

namespace thermlab::ode {

Solution integrate_rk4(const Rhs& rhs, const State& y0, double t_final, double dt,
                       std::size_t record_every, const StepObserver& observer) {
  if (!(t_final >= 0.0) || !(dt > 0.0)) {
    throw Error(ErrorCode::DomainError, "rk4 needs t_final >= 0 and dt > 0");
  }
  record_every = std::max<std::size_t>(record_every, 1);

  Solution sol;
  sol.times.push_back(0.0);
  sol.states.push_back(y0);
  if (observer) observer(0.0, y0);
  if (t_final == 0.0) return sol;

  const auto n = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
  const double h = t_final / static_cast<double>(n);

  State y = y0;
  State k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size());
  for (std::size_t step = 1; step <= n; ++step) {
    const double t = static_cast<double>(step - 1) * h;
    rhs(t, y, k1);
    rhs(t + 0.5 * h, y + 0.5 * h * k1, k2);
    rhs(t + 0.5 * h, y + 0.5 * h * k2, k3);
    rhs(t + h, y + h * k3, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    sol.stats.rhs_evaluations += 4;
    ++sol.stats.steps;

    const double t_new = step == n ? t_final : static_cast<double>(step) * h;
    if (observer) observer(t_new, y);
    if (step % record_every == 0 || step == n) {
      sol.times.push_back(t_new);
      sol.states.push_back(y);
    }
  }
  return sol;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer, Norsett & Wanner).
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double inf_norm(const State& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

Solution integrate_dopri5(const Rhs& rhs, const State& y0, double t_final,
                          std::span<const double> sample_times, const AdaptiveOptions& options,
                          const StepObserver& observer) {
  if (!(options.rtol >= 1e-12)) {
    throw Error(ErrorCode::DomainError, "adaptive integration needs rtol >= 1e-12");
  }
  if (!(options.atol > 0.0) || !(t_final >= 0.0)) {
    throw Error(ErrorCode::DomainError, "adaptive integration needs atol > 0 and t_final >= 0");
  }
  for (std::size_t j = 0; j < sample_times.size(); ++j) {
    if (sample_times[j] < 0.0 || sample_times[j] > t_final ||
        (j > 0 && !(sample_times[j] > sample_times[j - 1]))) {
      throw Error(ErrorCode::DomainError,
                  "sample times must be strictly increasing within [0, t_final]");
    }
  }

  Solution sol;
  const bool record_steps = sample_times.empty();
  std::size_t next_sample = 0;
  auto emit_sample = [&](double t, const State& y) {
    sol.times.push_back(t);
    sol.states.push_back(y);
  };

  if (observer) observer(0.0, y0);
  if (record_steps) {
    emit_sample(0.0, y0);
  } else {
    while (next_sample < sample_times.size() && sample_times[next_sample] == 0.0) {
      emit_sample(0.0, y0);
      ++next_sample;
    }
  }
  if (t_final == 0.0) return sol;

  const Eigen::Index n = y0.size();
  State y = y0, y_new(n), y_stage(n), err(n);
  State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  rhs(0.0, y, k1);
  sol.stats.rhs_evaluations = 1;

  auto scale_of = [&](const State& a, const State& b) {
    return std::max(options.rtol * std::max(inf_norm(a), inf_norm(b)), options.atol);
  };

  double h = options.initial_step;
  if (!(h > 0.0)) {
    const double sc = scale_of(y, y);
    const double d0 = inf_norm(y) / sc;
    const double d1n = inf_norm(k1) / sc;
    h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h = std::min(h, t_final);
  }
  h = std::min(h, options.max_step);

  constexpr double safety = 0.9, beta = 0.04, min_factor = 0.2, max_factor = 10.0;
  constexpr double expo = 0.2 - beta * 0.75;
  double err_prev = 1e-4;
  double t = 0.0;
  bool last_rejected = false;

  while (t < t_final) {
    if (sol.stats.steps >= options.max_steps) {
      throw Error(ErrorCode::NoConvergence,
                  "adaptive integration exceeded " + std::to_string(options.max_steps) + " steps");
    }
    if (h < 1e-14 * t_final) {
      throw Error(ErrorCode::StepUnderflow,
                  "required step " + std::to_string(h) + " at t = " + std::to_string(t));
    }
    const bool final_step = t + h >= t_final;
    if (final_step) h = t_final - t;

    y_stage = y + h * a21 * k1;
    rhs(t + c2 * h, y_stage, k2);
    y_stage = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, y_stage, k3);
    y_stage = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, y_stage, k4);
    y_stage = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, y_stage, k5);
    y_stage = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, y_stage, k6);
    y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs(t + h, y_new, k7);
    sol.stats.rhs_evaluations += 6;

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err_norm = inf_norm(err) / scale_of(y, y_new);

    if (err_norm <= 1.0) {
      const double t_new = final_step ? t_final : t + h;
      if (!record_steps) {
        const State ydiff = y_new - y;
        const State bspl = h * k1 - ydiff;
        const State r4 = ydiff - h * k7 - bspl;
        const State r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        while (next_sample < sample_times.size() && sample_times[next_sample] <= t_new) {
          const double ts = sample_times[next_sample];
          if (ts == t_new) {
            emit_sample(ts, y_new);
          } else {
            const double th = (ts - t) / h;
            const double th1 = 1.0 - th;
            emit_sample(ts, y + th * (ydiff + th1 * (bspl + th * (r4 + th1 * r5))));
          }
          ++next_sample;
        }
      }

      y.swap(y_new);
      k1.swap(k7);
      t = t_new;
      ++sol.stats.steps;
      if (record_steps) emit_sample(t, y);
      if (observer) observer(t, y);

      double factor = std::pow(std::max(err_norm, 1e-300), expo) / std::pow(err_prev, beta);
      factor = std::clamp(safety / factor, min_factor, max_factor);
      if (last_rejected) factor = std::min(factor, 1.0);
      err_prev = std::max(err_norm, 1e-4);
      h = std::min(h * factor, options.max_step);
      last_rejected = false;
    } else {
      ++sol.stats.rejected;
      const double factor = std::max(min_factor, safety * std::pow(err_norm, -expo));
      h *= factor;
      last_rejected = true;
    }
  }
  return sol;
}

}  // namespace thermlab::ode
