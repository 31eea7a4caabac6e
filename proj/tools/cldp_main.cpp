#include <CLI11.hpp>
#include <iostream>

#include "cldp/driver.hpp"

namespace {

// exit codes: 0 success, 2 configuration error, 3 runtime cap tripped
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntimeCap = 3;

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  bool out_set = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file")
      ->required();
  cmd->add_option("--seed", args.seed, "override the config seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--out", args.out_dir, "override the output directory")
      ->each([&args](const std::string&) { args.out_set = true; });
  cmd->add_option("--threads", args.threads,
                  "replication parallelism (0 = hardware)");
}

int dispatch(const std::string& command, const std::string& subcommand,
             const CommonArgs& args) {
  try {
    const cldp::Config config = cldp::parse_config_file(args.config_path);
    cldp::RunOptions options;
    if (args.seed_set) options.seed = args.seed;
    if (args.out_set) options.out_dir = args.out_dir;
    options.threads = args.threads;
    cldp::run_command(command, subcommand, config, options, std::cout);
    return kExitOk;
  } catch (const cldp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const cldp::ClusterCapExceeded& e) {
    std::cerr << "runtime cap: " << e.what() << '\n';
    return kExitRuntimeCap;
  } catch (const cldp::PanjerTailError& e) {
    std::cerr << "runtime cap: " << e.what() << '\n';
    return kExitRuntimeCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cldp - cluster point process simulation and large-deviations "
      "verification"};
  app.require_subcommand(1);

  CommonArgs simulate_args, ratefn_args, verify_args;
  std::string verify_kind;

  auto* simulate = app.add_subcommand(
      "simulate", "dump one seeded realization and an intensity summary");
  add_common(simulate, simulate_args);

  auto* ratefn = app.add_subcommand(
      "ratefn", "tabulate the rate function, tilt map, and log-MGF");
  add_common(ratefn, ratefn_args);

  auto* verify = app.add_subcommand(
      "verify", "Monte Carlo limit-theorem experiments (CSV per scale)");
  verify
      ->add_option("kind", verify_kind,
                   "one of: scalar, path, spatial, void, oracle")
      ->required();
  add_common(verify, verify_args);

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) return dispatch("simulate", "", simulate_args);
  if (ratefn->parsed()) return dispatch("ratefn", "", ratefn_args);
  return dispatch("verify", verify_kind, verify_args);
}
