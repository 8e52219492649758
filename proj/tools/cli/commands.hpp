#pragma once

#include <iosfwd>

#include "run_config.hpp"

namespace bni::cli {

// Each command writes its CSV/SVG outputs under out_dir and a short log to
// `log`. Errors propagate as bni::Error subclasses.
void cmd_derive(const RunConfig& config, std::ostream& log);
void cmd_estimate(const RunConfig& config, std::ostream& log);
void cmd_simulate(const RunConfig& config, std::ostream& log);
void cmd_discover(const RunConfig& config, std::ostream& log);

void run_command(const RunConfig& config, std::ostream& log);

}  // namespace bni::cli
