#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "workflows.hpp"

namespace {

using fcsmpc_cli::CommandOptions;
using fcsmpc_cli::RunConfig;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string solver;
  long seed = 0;  // reserved for synthetic-test workflows
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON run configuration")
      ->required();
  cmd->add_option("--out", args.out_dir,
                  "output directory (overrides output.dir)");
  cmd->add_option("--solver", args.solver, "solver override")
      ->check(CLI::IsMember({"exhaustive", "bnb"}));
  cmd->add_option("--seed", args.seed, "seed (reserved)");
  cmd->add_flag("--quiet", args.quiet, "suppress the summary line");
}

int dispatch(const std::string& name, const CommonArgs& args) {
  try {
    const RunConfig config = fcsmpc_cli::load_config_file(args.config_path);
    CommandOptions options;
    options.out_dir = args.out_dir;
    options.solver = args.solver;
    options.quiet = args.quiet;

    if (name == "discretize") return fcsmpc_cli::cmd_discretize(config, options);
    if (name == "limit-cycle") return fcsmpc_cli::cmd_limit_cycle(config, options);
    if (name == "terminal-cost")
      return fcsmpc_cli::cmd_terminal_cost(config, options);
    if (name == "simulate") return fcsmpc_cli::cmd_simulate(config, options);
    if (name == "compare") return fcsmpc_cli::cmd_compare(config, options);
    std::fprintf(stderr, "error: unknown command %s\n", name.c_str());
    return 1;
  } catch (const fcsmpc_cli::ConfigError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (const fcsmpc_cli::ApiError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return fcsmpc_cli::exit_code_of(err.status());
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-control-set MPC toolkit"};
  app.require_subcommand(1);

  const char* names[] = {"discretize", "limit-cycle", "terminal-cost",
                         "simulate", "compare"};
  const char* descriptions[] = {
      "zero-order-hold discretization of the configured plant",
      "optimal steady-state limit cycle search",
      "terminal cost synthesis or verification",
      "closed-loop FCS-MPC simulation",
      "side-by-side closed-loop comparison of MPC variants"};

  CommonArgs args[5];
  for (int i = 0; i < 5; ++i) {
    add_common(app.add_subcommand(names[i], descriptions[i]), args[i]);
  }

  CLI11_PARSE(app, argc, argv);

  for (int i = 0; i < 5; ++i) {
    if (app.get_subcommand(names[i])->parsed()) {
      return dispatch(names[i], args[i]);
    }
  }
  std::fprintf(stderr, "error: no command given\n");
  return 1;
}
