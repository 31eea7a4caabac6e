#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "cldp/config.hpp"
#include "cldp/spatial.hpp"
#include "cldp/temporal.hpp"
#include "cldp/verify.hpp"

namespace cldp {

/// Command-line overrides applied on top of the config file.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int threads = 0;  // 0 = hardware concurrency
};

/// Model builders shared by the CLI and the test suites. The model section
/// must carry type = "temporal" or "spatial" accordingly.
TemporalSpec temporal_spec_from_config(const Config& config);
SpatialSpec spatial_spec_from_config(const Config& config);
long cluster_cap_from_config(const Config& config);

/// Executes one CLI command ("simulate", "ratefn", or "verify" with
/// subcommand scalar|path|spatial|void|oracle). Writes the command's CSV
/// outputs plus an effective_config.toml echo into the output directory and
/// a short summary to `log`. Throws ConfigError for configuration problems
/// and ClusterCapExceeded/PanjerTailError for runtime caps.
void run_command(const std::string& command, const std::string& subcommand,
                 const Config& config, const RunOptions& options,
                 std::ostream& log);

}  // namespace cldp
