#pragma once

#include <iosfwd>

#include "thermlab/serialization.hpp"

namespace thermlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

/// Parses the command line (subcommand, --config, --out, --jobs, --seed,
/// --format), merges flags over the config file and runs. Artifacts go to
/// --out or to `out`; errors are one JSON object on `err`.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs a config object with the same schema as a --config file. `jobs` only
/// sizes the worker pool and never changes the artifact.
int run(const json& config, unsigned jobs, std::ostream& out, std::ostream& err);

}  // namespace thermlab::cli
