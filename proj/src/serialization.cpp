#include "thermlab/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

namespace thermlab {

std::string_view version_string() { return "thermlab 0.1.0"; }

double chop(double x) {
  const double nearest = std::round(x);
  return std::abs(x - nearest) < kChopThreshold ? nearest + 0.0 : x;
}

namespace {

[[noreturn]] void schema_error(const std::string& msg) {
  throw Error(ErrorCode::ValidationError, msg);
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const char* where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) schema_error(std::string("unknown key '") + key + "' in " + where);
  }
}

double number_at(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) schema_error(std::string("missing '") + key + "' in " + where);
  const json& v = j.at(key);
  if (!v.is_number()) schema_error(std::string("'") + key + "' in " + where + " must be a number");
  return v.get<double>();
}

json complex_pair(Complex z) { return json::array({chop(z.real()), chop(z.imag())}); }

}  // namespace

SystemParams params_from_json(const json& j) {
  if (!j.is_object()) schema_error("params must be an object");
  if (j.contains("delta")) schema_error("'delta' is derived from omega2 - omega1 and may not be set");
  const bool ohmic = j.contains("ohmic");
  if (ohmic) {
    reject_unknown(j, {"omega1", "omega2", "temperature", "ohmic"}, "params");
  } else {
    reject_unknown(j, {"omega1", "omega2", "temperature", "gamma1", "gamma2", "gamma3", "gamma12",
                       "gamma21"},
                   "params");
  }

  const double omega1 = number_at(j, "omega1", "params");
  const double omega2 = number_at(j, "omega2", "params");

  if (!j.contains("temperature")) schema_error("missing 'temperature' in params");
  double beta = 0.0;
  const json& t = j.at("temperature");
  if (t.is_string()) {
    if (t.get<std::string>() != "zero") schema_error("temperature must be a number or \"zero\"");
    beta = kZeroTemperatureBeta;
  } else if (t.is_number()) {
    const double temp = t.get<double>();
    if (!(temp >= 0.0)) schema_error("temperature must be >= 0");
    beta = temp == 0.0 ? kZeroTemperatureBeta : 1.0 / temp;
  } else {
    schema_error("temperature must be a number or \"zero\"");
  }

  if (ohmic) {
    const json& o = j.at("ohmic");
    if (!o.is_object()) schema_error("ohmic must be an object");
    reject_unknown(o, {"alpha", "cutoff", "interference"}, "ohmic");
    OhmicSpectrum spectrum;
    spectrum.alpha = number_at(o, "alpha", "ohmic");
    spectrum.interference = number_at(o, "interference", "ohmic");
    if (o.contains("cutoff")) spectrum.cutoff = number_at(o, "cutoff", "ohmic");
    return SystemParams::make_ohmic(omega1, omega2, spectrum, beta);
  }
  DecayRates rates;
  rates.gamma1 = number_at(j, "gamma1", "params");
  rates.gamma2 = number_at(j, "gamma2", "params");
  rates.gamma3 = number_at(j, "gamma3", "params");
  rates.gamma12 = number_at(j, "gamma12", "params");
  rates.gamma21 = number_at(j, "gamma21", "params");
  return SystemParams::make(omega1, omega2, rates, beta);
}

json params_to_json(const SystemParams& p) {
  json j;
  j["omega1"] = p.omega1;
  j["omega2"] = p.omega2;
  if (is_zero_temperature(p.beta)) j["temperature"] = "zero";
  else j["temperature"] = 1.0 / p.beta;
  if (p.ohmic) {
    json o;
    o["alpha"] = p.ohmic->alpha;
    o["interference"] = p.ohmic->interference;
    if (std::isfinite(p.ohmic->cutoff)) o["cutoff"] = p.ohmic->cutoff;
    j["ohmic"] = o;
  } else {
    j["gamma1"] = p.gamma1;
    j["gamma2"] = p.gamma2;
    j["gamma3"] = p.gamma3;
    j["gamma12"] = p.gamma12;
    j["gamma21"] = p.gamma21;
  }
  return j;
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_pair(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json real_matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(chop(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix3c matrix3_from_json(const json& j) {
  auto bad = [] { schema_error("expected a 3x3 matrix of [re, im] pairs"); };
  if (!j.is_array() || j.size() != 3) bad();
  Matrix3c m;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_array() || j[i].size() != 3) bad();
    for (int k = 0; k < 3; ++k) {
      const json& z = j[i][k];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) bad();
      m(i, k) = Complex(z[0].get<double>(), z[1].get<double>());
    }
  }
  return m;
}

json density_to_json(const DensityMatrix& rho) {
  const auto p = rho.populations();
  return json{{"matrix", matrix_to_json(rho.matrix())},
              {"populations", {chop(p[0]), chop(p[1]), chop(p[2])}}};
}

json wrap_artifact(const json& config, json result) {
  return json{{"version", version_string()}, {"config", config}, {"result", std::move(result)}};
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv_preamble(std::ostream& os, const json& config) {
  os << "# " << version_string() << '\n';
  os << "# config: " << config.dump() << '\n';
}

namespace {

constexpr const char* kElementNames[] = {"rho_ee",      "rho_g1g1",    "rho_g2g2",
                                         "re_rho_g2g1", "im_rho_g2g1", "re_rho_eg1",
                                         "im_rho_eg1",  "re_rho_eg2",  "im_rho_eg2"};

// Literal matrix elements rho(row, col) in the (e, g1, g2) basis.
std::array<double, 9> elements(const Matrix3c& m) {
  return {m(0, 0).real(), m(1, 1).real(), m(2, 2).real(), m(2, 1).real(), m(2, 1).imag(),
          m(0, 1).real(), m(0, 1).imag(), m(0, 2).real(), m(0, 2).imag()};
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const json& config) {
  write_csv_preamble(os, config);
  os << 't';
  for (const char* name : kElementNames) os << ',' << name;
  os << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << format_number(traj.times[k]);
    for (double v : elements(traj.states[k].matrix())) os << ',' << format_number(v);
    os << '\n';
  }
}

void write_surface_csv(std::ostream& os, const EntropySurface& surf, const json& config) {
  write_csv_preamble(os, config);
  os << "delta,temperature,entropy_nats,entropy_bits,status\n";
  for (std::size_t i = 0; i < surf.delta_grid.size(); ++i) {
    for (std::size_t k = 0; k < surf.temperature_grid.size(); ++k) {
      const double s = surf.entropy(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      os << format_number(surf.delta_grid[i]) << ',' << format_number(surf.temperature_grid[k])
         << ',' << format_number(s) << ',' << format_number(s / std::log(2.0)) << ','
         << to_string(surf.status_at(i, k)) << '\n';
    }
  }
}

void write_micro_csv(std::ostream& os, const MicroComparison& cmp, const json& config,
                     const json& summary) {
  write_csv_preamble(os, config);
  os << "# summary: " << summary.dump() << '\n';
  os << 't';
  for (const char* name : kElementNames) os << ",micro_" << name << ",lindblad_" << name;
  for (const char* name : kElementNames) os << ",gap_" << name;
  os << ",gap_max\n";
  for (std::size_t k = 0; k < cmp.times.size(); ++k) {
    const auto a = elements(cmp.micro[k].matrix());
    const auto b = elements(cmp.lindblad[k].matrix());
    os << format_number(cmp.times[k]);
    for (int e = 0; e < 9; ++e) os << ',' << format_number(a[e]) << ',' << format_number(b[e]);
    for (int e = 0; e < 9; ++e) os << ',' << format_number(std::abs(a[e] - b[e]));
    os << ',' << format_number(cmp.gaps[k]) << '\n';
  }
}

json trajectory_to_json(const Trajectory& traj) {
  json states = json::array();
  for (const auto& s : traj.states) states.push_back(matrix_to_json(s.matrix()));
  const auto& st = traj.stats;
  return json{{"times", traj.times},
              {"states", std::move(states)},
              {"stats",
               {{"steps", st.steps},
                {"rejected", st.rejected},
                {"max_trace_drift", st.max_trace_drift},
                {"max_hermiticity_residual", st.max_hermiticity_residual},
                {"min_eigenvalue", chop(st.min_eigenvalue)}}}};
}

json surface_to_json(const EntropySurface& surf) {
  json cells = json::array();
  for (std::size_t i = 0; i < surf.delta_grid.size(); ++i) {
    for (std::size_t k = 0; k < surf.temperature_grid.size(); ++k) {
      const double s = surf.entropy(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      json cell{{"delta", surf.delta_grid[i]},
                {"temperature", surf.temperature_grid[k]},
                {"status", to_string(surf.status_at(i, k))}};
      // NaN has no JSON spelling; undefined cells carry null.
      if (std::isnan(s)) {
        cell["entropy_nats"] = nullptr;
        cell["entropy_bits"] = nullptr;
      } else {
        cell["entropy_nats"] = chop(s);
        cell["entropy_bits"] = chop(s / std::log(2.0));
      }
      cells.push_back(std::move(cell));
    }
  }
  return json{{"delta_grid", surf.delta_grid},
              {"temperature_grid", surf.temperature_grid},
              {"cells", std::move(cells)}};
}

}  // namespace thermlab
