// Command-line front end. Exit codes: 0 success (a run ending in a domain
// violation is still a successful run), 2 configuration or usage errors,
// 3 runtime failures (I/O, certificate mismatch).
#pragma once

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pmd/experiment.hpp"

namespace pmd {

inline int run_cli(std::vector<std::string> args) {
  CLI::App app{"mirror-descent experiment driver"};
  app.require_subcommand(1);

  std::string solve_config;
  CLI::App* solve = app.add_subcommand("solve", "run one policy and write its artifacts");
  solve->add_option("config", solve_config, "experiment config file")->required();

  std::string compare_config;
  std::string compare_policies = "classic,adaptive,level";
  CLI::App* compare = app.add_subcommand("compare", "run several policies on one problem");
  compare->add_option("config", compare_config, "experiment config file")->required();
  compare->add_option("--policies", compare_policies, "comma-separated policy list");

  std::string oracle_config;
  double oracle_resolution = 1e-4;
  CLI::App* oracle = app.add_subcommand("oracle", "print the reference optimum");
  oracle->add_option("config", oracle_config, "experiment config file")->required();
  oracle->add_option("--resolution", oracle_resolution, "grid resolution");

  std::string certify_trace;
  std::string certify_config;
  CLI::App* certify = app.add_subcommand("certify", "replay and validate a recorded trace");
  certify->add_option("trace", certify_trace, "trace CSV from a previous solve")->required();
  certify->add_option("config", certify_config, "config the trace was produced from")->required();

  // CLI11 parses argv-style right to left.
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve) return cmd_solve(solve_config);
    if (*compare) {
      std::vector<std::string> names;
      for (const std::string& part : split(compare_policies, ',')) {
        const std::string name = trim(part);
        if (!name.empty()) names.push_back(name);
      }
      return cmd_compare(compare_config, names);
    }
    if (*oracle) return cmd_oracle(oracle_config, oracle_resolution);
    if (*certify) return cmd_certify(certify_trace, certify_config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const UnsupportedInstance& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

}  // namespace pmd
