#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "thermlab/analysis.hpp"
#include "thermlab/micro_oracle.hpp"

namespace thermlab {

using nlohmann::json;

std::string_view version_string();

// JSON values within this distance of an integer (zero included) are written
// as that integer, so round-off never shows up in artifacts.
inline constexpr double kChopThreshold = 1e-14;

double chop(double x);

/// Params schema: omega1, omega2, temperature (number >= 0 or "zero") and
/// either gamma1, gamma2, gamma3, gamma12, gamma21 or an "ohmic" object
/// {alpha, cutoff?, interference}. delta is derived and may not be given.
/// Schema errors throw Error(ValidationError); physics is not validated here.
SystemParams params_from_json(const json& j);
json params_to_json(const SystemParams& params);

// Row-major nested arrays of [re, im] pairs.
json matrix_to_json(const Eigen::MatrixXcd& m);
json real_matrix_to_json(const Eigen::MatrixXd& m);
Matrix3c matrix3_from_json(const json& j);

json density_to_json(const DensityMatrix& rho);

/// Every JSON artifact is {"version", "config", "result"}.
json wrap_artifact(const json& config, json result);

// %.17g, with "nan"/"inf" spelled out and -0 written as 0.
std::string format_number(double x);

/// "# thermlab <version>" and "# config: <compact json>" comment lines.
void write_csv_preamble(std::ostream& os, const json& config);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const json& config);
void write_surface_csv(std::ostream& os, const EntropySurface& surf, const json& config);
void write_micro_csv(std::ostream& os, const MicroComparison& cmp, const json& config,
                     const json& summary);

json trajectory_to_json(const Trajectory& traj);
json surface_to_json(const EntropySurface& surf);

}  // namespace thermlab
