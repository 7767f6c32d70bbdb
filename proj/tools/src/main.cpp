#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oscctl/errors.hpp"
#include "oscctl_cli/commands.hpp"

using namespace oscctl::cli;

namespace {

const char* describe(Command c) {
  switch (c) {
    case Command::Simulate: return "run the three-stage feedback from system.x0";
    case Command::RatioStudy: return "closed-loop time over minimum time for one oscillator";
    case Command::AttractorScan: return "look for stalls of the basic control";
    case Command::Tables: return "exact terminal-stage matrices for one dimension";
    case Command::Verify: return "check every identity and documented discrepancy";
    case Command::Toy: return "single unit oscillator from (10, 0)";
    case Command::Convergence: return "refine dt and the sign band and test Cauchy behaviour";
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Staged time-optimal feedback for coupled oscillators"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("-c,--config", config_path, "INI scenario file")->check(CLI::ExistingFile);
  app.add_option("-s,--set", overrides, "override section.key=value (repeatable)");
  app.add_option("-o,--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed for studies");

  std::optional<std::size_t> dim;
  for (Command c : {Command::Simulate, Command::RatioStudy, Command::AttractorScan, Command::Tables,
                    Command::Verify, Command::Toy, Command::Convergence}) {
    auto* sub = app.add_subcommand(to_string(c), describe(c));
    if (c == Command::Tables) sub->add_option("--dim", dim, "even state dimension");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const Command command = command_from_string(app.get_subcommands().front()->get_name());
    RunConfig config = default_config(command);
    if (!config_path.empty()) config = read_config_file(config_path, config);
    config.command = command;
    for (const auto& o : overrides) apply_override(config, o);
    if (out_dir) config.output_dir = *out_dir;
    if (seed) config.seed = *seed;
    if (dim) config.table_dim = *dim;
    return run(config, std::cout, std::cerr);
  } catch (const oscctl::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const oscctl::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
