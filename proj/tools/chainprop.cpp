// chainprop: run property suites or print generator statistics.
//
//   chainprop run --suite itoken --variant buggy --expect fail --seed 42
//   chainprop stats --suite bat --seed 7
//   chainprop --list
//
// Options may also come from a key=value file given with --config; flags on
// the command line take precedence.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "chainprop/runner.hpp"

namespace {

// Options live on the top-level app so that a config file applies to either
// subcommand; the subcommands fall through to them.
void add_options(CLI::App& app, chainprop::RunConfig& cfg, std::optional<std::uint64_t>& seed, std::string& variant) {
  using chainprop::Expect;
  using chainprop::SchedulingPolicy;
  static const std::map<std::string, SchedulingPolicy> policies{{"dfs", SchedulingPolicy::DepthFirst},
                                                                {"bfs", SchedulingPolicy::BreadthFirst}};
  static const std::map<std::string, Expect> expects{
      {"none", Expect::none}, {"pass", Expect::pass}, {"fail", Expect::fail}};

  app.set_config("--config", "", "Read options from a key=value file");
  app.add_option("--suite", cfg.suite, "Suite to run (see --list)");
  app.add_option("--variant", variant, "Contract variant")->check(CLI::IsMember({"buggy", "fixed"}));
  app.add_option("--policy", cfg.policy, "Scheduling policy")->transform(CLI::CheckedTransformer(policies));
  app.add_option("--seed", seed, "Master seed (default: drawn from the OS and printed)");
  app.add_option("--num-tests", cfg.num_tests, "Number of traces (setups for funding_possible)");
  app.add_option("--max-blocks", cfg.max_blocks, "Blocks per trace after deployment");
  app.add_option("--max-actions", cfg.max_actions_per_block, "Maximum external actions per block");
  app.add_option("--property", cfg.property, "Property within the suite (default: the first listed)");
  app.add_option("--expect", cfg.expect, "Expected verdict")->transform(CLI::CheckedTransformer(expects));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stateful property-based testing of simulated contracts"};
  app.require_subcommand(0, 1);
  bool list = false;
  app.add_flag("--list", list, "List suites and their properties");

  chainprop::RunConfig cfg;
  std::optional<std::uint64_t> seed;
  std::string variant;
  add_options(app, cfg, seed, variant);
  CLI::App* run = app.add_subcommand("run", "Check a property and print the verdict")->fallthrough();
  CLI::App* stats = app.add_subcommand("stats", "Print per-entrypoint call statistics")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return chainprop::exit_usage;
  }

  if (list) {
    std::cout << chainprop::list_suites();
    return chainprop::exit_ok;
  }
  if (!run->parsed() && !stats->parsed()) {
    std::cerr << app.help();
    return chainprop::exit_usage;
  }
  if (cfg.suite.empty()) {
    std::cerr << "--suite is required\n";
    return chainprop::exit_usage;
  }
  cfg.seed = seed;
  if (variant == "buggy") cfg.variant = chainprop::Variant::buggy;
  if (variant == "fixed") cfg.variant = chainprop::Variant::fixed;
  const chainprop::RunOutput out = run->parsed() ? chainprop::run(cfg) : chainprop::stats(cfg);
  (out.exit_code == chainprop::exit_usage ? std::cerr : std::cout) << out.report << std::flush;
  return out.exit_code;
}
