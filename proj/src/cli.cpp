#include "thermlab/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace thermlab::cli {
namespace {

const std::vector<std::string> kCommands = {"evolve",    "steady",        "ssb-scan",
                                            "entropy-surface", "antitherm", "micro-compare",
                                            "validate",  "dump-generator"};

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::ValidationError, msg); }

std::shared_ptr<spdlog::logger> logger() {
  static auto log = [] {
    auto l = spdlog::stderr_logger_st("thermlab");
    l->set_pattern("[%l] %v");
    const char* env = std::getenv("THERMLAB_LOG");
    const std::string level = env ? env : "warn";
    if (level == "error") l->set_level(spdlog::level::err);
    else if (level == "warn") l->set_level(spdlog::level::warn);
    else if (level == "info") l->set_level(spdlog::level::info);
    else if (level == "debug") l->set_level(spdlog::level::debug);
    else {
      l->set_level(spdlog::level::warn);
      l->warn("THERMLAB_LOG={} not recognised, using warn", level);
    }
    return l;
  }();
  return log;
}

// Command options: defaults double as the list of accepted keys.
json option_defaults(const std::string& command) {
  const json sign = "paper";
  if (command == "evolve") {
    return {{"t_final", 10.0}, {"method", "adaptive"}, {"samples", 101}, {"dt", 0.0},
            {"rtol", 1e-10},   {"atol", 1e-12},        {"hamiltonian_sign", sign}};
  }
  if (command == "steady" || command == "dump-generator") return {{"hamiltonian_sign", sign}};
  if (command == "ssb-scan") {
    return {{"order", "both"}, {"n_points", 60}, {"shrink_factor", 0.5}, {"tolerance", 1e-6}};
  }
  if (command == "entropy-surface") {
    return {{"delta_max", 0.5},  {"n_delta", 30},         {"temperature_max", 1.0},
            {"n_temperature", 30}, {"delta_grid", nullptr}, {"temperature_grid", nullptr}};
  }
  if (command == "micro-compare") {
    return {{"gamma1", 1.0},         {"gamma2", 1.0},  {"sign", 1},          {"modes", 128},
            {"coupling_ratio", 0.01}, {"center", nullptr}, {"delta", 0.0}, {"t_final", nullptr},
            {"samples", 101}};
  }
  return json::object();
}

std::string default_format(const std::string& command) {
  return command == "evolve" || command == "entropy-surface" || command == "micro-compare" ? "csv"
                                                                                             : "json";
}

bool supports_csv(const std::string& command) { return default_format(command) == "csv"; }

std::string default_initial_state(const std::string& command) {
  return command == "steady" ? "mixed" : "e";
}

bool uses_params(const std::string& command) { return command != "micro-compare"; }

bool uses_initial_state(const std::string& command) {
  return command == "evolve" || command == "steady" || command == "antitherm" ||
         command == "micro-compare";
}

// Fills defaults, rejects unknown keys and type mismatches.
json resolve_options(const std::string& command, const json& given) {
  json resolved = option_defaults(command);
  if (given.is_null()) return resolved;
  if (!given.is_object()) invalid("options must be an object");
  for (const auto& [key, value] : given.items()) {
    if (!resolved.contains(key)) invalid("unknown option '" + key + "' for " + command);
    const json& def = resolved[key];
    const bool ok = def.is_null() || value.is_null() || (def.is_number() && value.is_number()) ||
                    (def.is_string() && value.is_string());
    if (!ok) invalid("option '" + key + "' has the wrong type");
    resolved[key] = value;
  }
  for (const char* key : {"rtol", "atol", "tolerance"}) {
    if (resolved.contains(key) && !(resolved[key].get<double>() > 0.0)) {
      invalid(std::string("option '") + key + "' must be > 0");
    }
  }
  return resolved;
}

json resolve_config(const json& raw) {
  if (!raw.is_object()) invalid("config must be a JSON object");
  static const std::set<std::string> allowed = {"command", "params", "initial_state", "options",
                                                "seed",    "format", "out",           "jobs"};
  for (const auto& [key, value] : raw.items()) {
    if (!allowed.count(key)) invalid("unknown config key '" + key + "'");
  }
  if (!raw.contains("command") || !raw["command"].is_string()) invalid("missing command");
  const std::string command = raw["command"];
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    invalid("unknown command '" + command + "'");
  }

  json config;
  config["command"] = command;
  if (uses_params(command)) {
    if (!raw.contains("params")) invalid(command + " needs params");
    config["params"] = params_to_json(params_from_json(raw["params"]));
  } else if (raw.contains("params")) {
    invalid(command + " builds its own params; remove 'params'");
  }
  if (uses_initial_state(command)) {
    config["initial_state"] =
        raw.contains("initial_state") ? raw["initial_state"] : json(default_initial_state(command));
  } else if (raw.contains("initial_state")) {
    invalid(command + " takes no initial_state");
  }
  config["options"] = resolve_options(command, raw.value("options", json()));

  if (raw.contains("seed")) {
    if (!raw["seed"].is_number_unsigned()) invalid("seed must be a non-negative integer");
    config["seed"] = raw["seed"];
  }
  const std::string format = raw.contains("format") ? raw["format"].get<std::string>()
                                                    : default_format(command);
  if (format != "csv" && format != "json") invalid("format must be csv or json");
  if (format == "csv" && !supports_csv(command)) invalid(command + " only writes json");
  config["format"] = format;

  if (config.contains("initial_state") && config["initial_state"] == "random" &&
      !config.contains("seed")) {
    invalid("a random initial state needs a seed");
  }
  return config;
}

HamiltonianSign sign_option(const json& options) {
  const auto sign = parse_hamiltonian_sign(options.at("hamiltonian_sign").get<std::string>());
  if (!sign) invalid("hamiltonian_sign must be paper or standard");
  return *sign;
}

Eigen::Vector3cd amplitudes_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) invalid("amplitudes must be 3 [re, im] pairs");
  Eigen::Vector3cd a;
  for (int k = 0; k < 3; ++k) {
    const json& z = j[k];
    if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
      invalid("amplitudes must be 3 [re, im] pairs");
    }
    a(k) = Complex(z[0].get<double>(), z[1].get<double>());
  }
  return a;
}

// Ginibre draw: G G^dagger / Tr.
DensityMatrix random_state(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix3c g;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) g(i, k) = Complex(normal(rng), normal(rng));
  Matrix3c rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix::from_matrix(0.5 * (rho + rho.adjoint()));
}

DensityMatrix initial_state(const json& config) {
  const json& spec = config.at("initial_state");
  if (spec.is_string()) {
    const std::string label = spec;
    if (label == "mixed") return maximally_mixed();
    if (label == "random") return random_state(config.at("seed").get<std::uint64_t>());
    if (const auto level = parse_level(label)) return basis_state(*level);
    invalid("initial_state must be e, g1, g2, mixed, random or 3 amplitudes");
  }
  return superposition(amplitudes_from_json(spec));
}

std::vector<double> uniform_grid(double t_final, int samples) {
  if (samples < 2) invalid("samples must be >= 2");
  std::vector<double> t(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) t[k] = t_final * k / (samples - 1);
  t.back() = t_final;
  return t;
}

struct Output {
  json result;
  std::function<void(std::ostream&)> csv;  // set when the command writes CSV
};

Output cmd_evolve(const json& config) {
  const json& o = config["options"];
  const SystemParams params = params_from_json(config["params"]);
  const Liouvillian gen = build_liouvillian(params, sign_option(o));
  const DensityMatrix rho0 = initial_state(config);
  const double t_final = o["t_final"];
  if (!(t_final > 0.0)) invalid("t_final must be > 0");
  const std::vector<double> times = uniform_grid(t_final, o["samples"].get<int>());
  const std::string method = o["method"];

  Trajectory traj;
  if (method == "adaptive") {
    ode::AdaptiveOptions ao;
    ao.rtol = o["rtol"];
    ao.atol = o["atol"];
    traj = evolve_adaptive(gen, rho0, t_final, times, ao);
  } else if (method == "rk4") {
    const double interval = times[1] - times[0];
    const double dt_max = o["dt"].get<double>() > 0.0 ? o["dt"].get<double>() : 0.05 / gen.max_abs();
    const auto per_sample = static_cast<std::size_t>(std::ceil(interval / dt_max - 1e-9));
    traj = evolve_fixed(gen, rho0, t_final, interval / static_cast<double>(per_sample), per_sample);
  } else if (method == "expm") {
    for (double t : times) {
      traj.times.push_back(t);
      traj.states.push_back(propagate(gen, rho0, t));
    }
  } else {
    invalid("method must be adaptive, rk4 or expm");
  }
  logger()->info("evolve: {} samples, {} steps", traj.times.size(), traj.stats.steps);

  Output out;
  out.result = trajectory_to_json(traj);
  out.csv = [traj, config](std::ostream& os) { write_trajectory_csv(os, traj, config); };
  return out;
}

json asymptotic_to_json(const AsymptoticResult& res) {
  json j;
  j["kind"] = to_string(res.kind);
  if (res.state) {
    const auto p = res.state->populations();
    j["populations"] = {chop(p[0]), chop(p[1]), chop(p[2])};
    j["state"] = matrix_to_json(res.state->matrix());
    const double s = von_neumann_entropy(*res.state);
    j["entropy_nats"] = chop(s);
    j["entropy_bits"] = chop(s / std::log(2.0));
  }
  json freqs = json::array();
  for (double f : res.oscillation_frequencies) freqs.push_back(chop(f));
  j["oscillation_frequencies"] = freqs;
  if (res.time_average) j["time_average"] = matrix_to_json(res.time_average->matrix());
  j["zero_mode_count"] = res.zero_mode_count;
  j["slowest_decay_rate"] = chop(res.slowest_decay_rate);
  j["used_fallback"] = res.used_fallback;
  return j;
}

Output cmd_steady(const json& config) {
  const SystemParams params = params_from_json(config["params"]);
  const Liouvillian gen = build_liouvillian(params, sign_option(config["options"]));
  return {asymptotic_to_json(asymptotic_state(gen, initial_state(config))), {}};
}

json limit_report_to_json(const LimitReport& r) {
  json seq = json::array();
  for (const LimitPoint& p : r.sequence) {
    seq.push_back({{"delta", p.delta},
                   {"temperature", is_zero_temperature(p.beta) ? json("zero") : json(1.0 / p.beta)},
                   {"populations", {chop(p.populations[0]), chop(p.populations[1]), chop(p.populations[2])}},
                   {"entropy_nats", chop(p.entropy)}});
  }
  return {{"order", to_string(r.order)},
          {"populations", {chop(r.populations[0]), chop(r.populations[1]), chop(r.populations[2])}},
          {"entropy_nats", chop(r.entropy)},
          {"entropy_bits", chop(r.entropy / std::log(2.0))},
          {"sequence", std::move(seq)}};
}

Output cmd_ssb_scan(const json& config) {
  const json& o = config["options"];
  const SystemParams params = params_from_json(config["params"]);
  std::vector<LimitOrder> orders;
  const std::string order = o["order"];
  if (order == "both") {
    orders = {LimitOrder::TemperatureFirst, LimitOrder::SplittingFirst};
  } else if (const auto parsed = parse_limit_order(order)) {
    orders = {*parsed};
  } else {
    invalid("order must be temperature-first, splitting-first or both");
  }
  json reports = json::array();
  std::vector<LimitReport> done;
  for (LimitOrder ord : orders) {
    LimitScanOptions opts;
    opts.order = ord;
    opts.n_points = o["n_points"];
    opts.shrink_factor = o["shrink_factor"];
    opts.tolerance = o["tolerance"];
    done.push_back(ssb_limit_scan(params, opts));
    reports.push_back(limit_report_to_json(done.back()));
  }
  json result{{"reports", reports}};
  if (done.size() == 2) {
    double gap = std::abs(done[0].entropy - done[1].entropy);
    for (int k = 0; k < 3; ++k) gap = std::max(gap, std::abs(done[0].populations[k] - done[1].populations[k]));
    result["max_order_gap"] = chop(gap);
    result["limits_commute"] = gap < o["tolerance"].get<double>();
  }
  return {result, {}};
}

std::vector<double> grid_option(const json& o, const char* grid_key, const char* max_key,
                                const char* n_key) {
  if (!o[grid_key].is_null()) {
    if (!o[grid_key].is_array()) invalid(std::string(grid_key) + " must be an array");
    return o[grid_key].get<std::vector<double>>();
  }
  const double top = o[max_key];
  const int n = o[n_key];
  if (n < 2 || !(top > 0.0)) invalid(std::string(n_key) + " >= 2 and " + max_key + " > 0 required");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) g[k] = top * k / (n - 1);
  g.back() = top;
  return g;
}

Output cmd_entropy_surface(const json& config, unsigned jobs) {
  const json& o = config["options"];
  const SystemParams params = params_from_json(config["params"]);
  const auto deltas = grid_option(o, "delta_grid", "delta_max", "n_delta");
  const auto temps = grid_option(o, "temperature_grid", "temperature_max", "n_temperature");
  const EntropySurface surf = entropy_surface(deltas, temps, params, jobs);
  Output out;
  out.result = surface_to_json(surf);
  out.csv = [surf, config](std::ostream& os) { write_surface_csv(os, surf, config); };
  return out;
}

// Pure state behind a rank-one density matrix, phase fixed so the first
// non-negligible amplitude is real and positive.
std::optional<Eigen::Vector3cd> pure_state_of(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix3c> es(0.5 * (rho.matrix() + rho.matrix().adjoint()));
  if (es.eigenvalues()(2) < 1.0 - 1e-9) return std::nullopt;
  Eigen::Vector3cd v = es.eigenvectors().col(2);
  for (int k = 0; k < 3; ++k) {
    if (std::abs(v(k)) > 1e-8) {
      v *= std::abs(v(k)) / v(k);
      break;
    }
  }
  return v;
}

Output cmd_antitherm(const json& config) {
  const SystemParams params = validate_params(params_from_json(config["params"]));
  if (params.gamma3 != 0.0 || !is_zero_temperature(params.beta) || params.delta != 0.0) {
    invalid("antitherm needs gamma3 = 0, temperature zero and omega1 = omega2");
  }
  const DensityMatrix rho0 = initial_state(config);
  const DensityMatrix predicted =
      antitherm_prediction(rho0, params.gamma1, params.gamma2, params.gamma12, params.gamma21);
  const AsymptoticResult dyn = asymptotic_state(build_liouvillian(params), rho0);
  const DensityMatrix& reached = dyn.state ? *dyn.state : *dyn.time_average;

  json result = density_to_json(predicted);
  result["long_time_kind"] = to_string(dyn.kind);
  result["long_time_gap"] = chop((predicted.matrix() - reached.matrix()).cwiseAbs().maxCoeff());
  if (const auto psi = pure_state_of(predicted)) {
    json amps = json::array();
    for (int k = 0; k < 3; ++k) amps.push_back({chop((*psi)(k).real()), chop((*psi)(k).imag())});
    result["pure_state"] = amps;
  } else {
    result["pure_state"] = nullptr;
  }
  return {result, {}};
}

Output cmd_micro_compare(const json& config) {
  const json& o = config["options"];
  const double g1 = o["gamma1"], g2 = o["gamma2"];
  const double ratio = o["coupling_ratio"];
  if (!(ratio > 0.0)) invalid("coupling_ratio must be > 0");
  const double gamma_max = std::max(g1, g2);
  if (!(gamma_max > 0.0)) invalid("gamma1 or gamma2 must be > 0");
  const double bandwidth = 2.0 * M_PI * gamma_max / ratio;
  const double center = o["center"].is_null() ? bandwidth : o["center"].get<double>();
  const double delta = o["delta"];
  const double t_final = o["t_final"].is_null() ? 5.0 / gamma_max : o["t_final"].get<double>();
  if (!(t_final > 0.0)) invalid("t_final must be > 0");

  const DiscretizedBath bath = build_bath(g1, g2, o["sign"].get<int>(), o["modes"].get<int>(),
                                          bandwidth, center);
  const json& spec = config["initial_state"];
  Eigen::Vector3cd amps = Eigen::Vector3cd::Zero();
  if (spec.is_string()) {
    const auto level = parse_level(spec.get<std::string>());
    if (!level) invalid("micro-compare needs a pure initial state (e, g1, g2 or amplitudes)");
    amps(static_cast<int>(*level)) = 1.0;
  } else {
    amps = amplitudes_from_json(spec);
  }
  SingleExcitationState psi0 = SingleExcitationState::ground(amps(1), amps(2), bath.mode_count);
  psi0.c_e = amps(0);
  if (std::abs(psi0.norm() - 1.0) > 1e-12) {
    throw Error(ErrorCode::NormalizationError, "initial amplitudes are not normalized");
  }

  const auto times = uniform_grid(t_final, o["samples"].get<int>());
  const MicroComparison cmp = compare_micro_lindblad(bath, psi0, delta, times);
  double gap_in_window = 0.0;
  for (std::size_t k = 0; k < cmp.times.size(); ++k) {
    if (cmp.times[k] <= cmp.validity_window) gap_in_window = std::max(gap_in_window, cmp.gaps[k]);
  }
  const auto rates = bath.implied_rates();
  json summary{{"max_gap", chop(cmp.max_gap)},
               {"max_gap_within_window", chop(gap_in_window)},
               {"validity_window", chop(cmp.validity_window)},
               {"recurrence_time", chop(cmp.recurrence_time)},
               {"max_norm_drift", cmp.max_norm_drift},
               {"bandwidth", bandwidth},
               {"center", center},
               {"implied_rates",
                {{"gamma1", chop(rates[0])}, {"gamma2", chop(rates[1])}, {"gamma12", chop(rates[2])},
                 {"gamma21", chop(rates[3])}}}};
  logger()->info("micro-compare: max gap {:.3g}, recurrence at t = {:.3g}", cmp.max_gap,
                 cmp.recurrence_time);

  Output out;
  json rows = json::array();
  for (std::size_t k = 0; k < cmp.times.size(); ++k) {
    rows.push_back({{"t", cmp.times[k]},
                    {"micro", matrix_to_json(cmp.micro[k].matrix())},
                    {"lindblad", matrix_to_json(cmp.lindblad[k].matrix())},
                    {"gap", chop(cmp.gaps[k])}});
  }
  out.result = {{"summary", summary}, {"samples", rows}};
  out.csv = [cmp, config, summary](std::ostream& os) { write_micro_csv(os, cmp, config, summary); };
  return out;
}

Output cmd_validate(const json& config) {
  const SystemParams params = validate_params(params_from_json(config["params"]));
  const Occupations n = occupations(params);
  auto finite_or_null = [](double x) { return std::isfinite(x) ? json(chop(x)) : json(nullptr); };
  return {{{"valid", true},
           {"delta", params.delta},
           {"rates",
            {{"gamma1", params.gamma1},
             {"gamma2", params.gamma2},
             {"gamma3", params.gamma3},
             {"gamma12", params.gamma12},
             {"gamma21", params.gamma21}}},
           {"occupations", {{"n1", chop(n.n1)}, {"n2", chop(n.n2)}, {"n_delta", finite_or_null(n.n_delta)}}}},
          {}};
}

json bloch_to_json(const BlochMatrix& m) {
  return {{"r", real_matrix_to_json(m.r)}, {"s", matrix_to_json(m.s)}};
}

Output cmd_dump_generator(const json& config) {
  const SystemParams params = params_from_json(config["params"]);
  const Liouvillian gen = build_liouvillian(params, sign_option(config["options"]));
  json result;
  result["liouvillian"] = matrix_to_json(gen.matrix);
  Eigen::ComplexEigenSolver<Matrix9c> es(gen.matrix, false);
  std::vector<Complex> eig(es.eigenvalues().data(), es.eigenvalues().data() + 9);
  std::sort(eig.begin(), eig.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  json eigs = json::array();
  for (Complex z : eig) eigs.push_back({chop(z.real()), chop(z.imag())});
  result["eigenvalues"] = eigs;

  if (!is_zero_temperature(params.beta) && params.delta == 0.0) {
    result["bloch"] = nullptr;
    result["bloch_note"] = "Bloch coordinates need a finite n(delta); undefined at delta = 0, T > 0";
    return {result, {}};
  }
  const BlochMatrix derived = derive_bloch_matrix(gen);
  const BlochMatrix transcribed = build_bloch_matrix_transcribed(params);
  const BlochComparison cmp = compare_bloch(derived, transcribed, params);
  result["bloch"] = {{"derived", bloch_to_json(derived)},
                     {"transcribed", bloch_to_json(transcribed)},
                     {"r_diff", real_matrix_to_json(cmp.r_diff)},
                     {"s_diff", matrix_to_json(cmp.s_diff)},
                     {"r_diff_on_states", real_matrix_to_json(cmp.r_diff_on_states)},
                     {"max_r_diff", chop(cmp.max_r_diff)},
                     {"max_s_diff", chop(cmp.max_s_diff)},
                     {"max_r_diff_on_states", chop(cmp.max_r_diff_on_states)},
                     {"max_real_eigenvalue", chop(derived.max_real_eigenvalue())}};
  return {result, {}};
}

json error_json(const std::exception& e) {
  json j;
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
    j["error"] = to_string(v->code());
    json list = json::array();
    for (const Violation& viol : v->violations()) {
      list.push_back({{"kind", to_string(viol.kind)}, {"detail", viol.detail}});
    }
    j["violations"] = list;
  } else if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["error"] = to_string(err->code());
  } else {
    j["error"] = "InternalError";
  }
  j["message"] = e.what();
  return j;
}

void emit(const json& config, const Output& output, std::ostream& os) {
  if (config["format"] == "csv") {
    output.csv(os);
  } else {
    os << wrap_artifact(config, output.result).dump(2) << '\n';
  }
}

}  // namespace

int run(const json& raw, unsigned jobs, std::ostream& out, std::ostream& err) {
  try {
    const json config = resolve_config(raw);
    const std::string command = config["command"];
    logger()->debug("running {}", command);

    Output output;
    if (command == "evolve") output = cmd_evolve(config);
    else if (command == "steady") output = cmd_steady(config);
    else if (command == "ssb-scan") output = cmd_ssb_scan(config);
    else if (command == "entropy-surface") output = cmd_entropy_surface(config, jobs);
    else if (command == "antitherm") output = cmd_antitherm(config);
    else if (command == "micro-compare") output = cmd_micro_compare(config);
    else if (command == "validate") output = cmd_validate(config);
    else output = cmd_dump_generator(config);

    if (raw.contains("out")) {
      const std::string path = raw["out"];
      std::ofstream file(path, std::ios::binary);
      if (!file) invalid("cannot open output file " + path);
      emit(config, output, file);
    } else {
      emit(config, output, out);
    }
    return kExitOk;
  } catch (const Error& e) {
    err << error_json(e).dump() << '\n';
    return is_numerical_failure(e.code()) ? kExitNumerical : kExitInvalid;
  } catch (const json::exception& e) {
    err << json{{"error", "ValidationError"}, {"message", e.what()}}.dump() << '\n';
    return kExitInvalid;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"thermlab: three-level open-system thermalization toolkit", "thermlab"};
  app.set_version_flag("--version", std::string(version_string()));
  std::string config_path, out_path, format;
  std::optional<unsigned> jobs;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "artifact path (stdout if absent)");
  app.add_option("--jobs", jobs, "worker threads for sweeps");
  app.add_option("--seed", seed, "seed for random initial states");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.require_subcommand(1);
  app.fallthrough();
  const std::map<std::string, std::string> blurbs = {
      {"evolve", "integrate the master equation from an initial state"},
      {"steady", "long-time state and its classification"},
      {"ssb-scan", "zero-temperature and zero-splitting limits in both orders"},
      {"entropy-surface", "steady-state entropy on a (delta, T) grid"},
      {"antitherm", "closed-form Lambda-system steady state vs dynamics"},
      {"micro-compare", "discretized-bath Schrodinger evolution vs master equation"},
      {"validate", "check parameters for complete positivity and finiteness"},
      {"dump-generator", "Liouvillian, its spectrum and the Bloch matrices"},
  };
  for (const std::string& name : kCommands) app.add_subcommand(name, blurbs.at(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << json{{"error", "UsageError"}, {"message", e.what()}}.dump() << '\n';
    return kExitInvalid;
  }

  json config = json::object();
  if (!config_path.empty()) {
    std::ifstream file(config_path);
    try {
      config = json::parse(file);
    } catch (const json::parse_error& e) {
      err << json{{"error", "ValidationError"}, {"message", e.what()}}.dump() << '\n';
      return kExitInvalid;
    }
    if (!config.is_object()) {
      err << json{{"error", "ValidationError"}, {"message", "config must be a JSON object"}}.dump()
          << '\n';
      return kExitInvalid;
    }
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (config.contains("command") && config["command"] != command) {
    err << json{{"error", "ValidationError"},
                {"message", "config is for '" + config["command"].dump() + "', not " + command}}
               .dump()
        << '\n';
    return kExitInvalid;
  }
  config["command"] = command;
  if (!out_path.empty()) config["out"] = out_path;
  if (!format.empty()) config["format"] = format;
  if (seed) config["seed"] = *seed;
  unsigned workers = 1;
  if (jobs) workers = *jobs;
  else if (config.contains("jobs") && config["jobs"].is_number_unsigned()) workers = config["jobs"];
  config.erase("jobs");
  return run(config, workers, out, err);
}

}  // namespace thermlab::cli
