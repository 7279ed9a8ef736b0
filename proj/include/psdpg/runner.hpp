#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "psdpg/config.hpp"

namespace psdpg {

enum class RunMode { train, compare };

/// Executes one run into spec.out_dir. Train mode writes config.echo,
/// metrics.csv and ensemble.nets (plus trajectories.csv when requested);
/// compare mode writes config.echo and structural.txt. Throws on any error;
/// the output directory must already exist.
void run(const RunSpec& spec, RunMode mode, std::ostream& diag);

/// Command-line entry point behind the psdpg tool. Returns 0 on success,
/// 2 on configuration errors, 3 on runtime/numeric errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace psdpg
