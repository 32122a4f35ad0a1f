#pragma once

#include <iosfwd>

#include "config.hpp"

namespace alflab::cli {

/// Executes a validated config. Writes <prefix>.json (and CSV/snapshot artifacts
/// for the series-producing subcommands). Exit codes: 0 success, 2 numeric
/// tolerance failure, 1 usage error.
int run(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace alflab::cli
