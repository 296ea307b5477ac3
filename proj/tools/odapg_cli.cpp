// Command-line front end: odapg {run|topology|compare} --config <path> [--out <path>]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "odapg/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Decentralized accelerated proximal gradient simulator"};
  app.require_subcommand(1);

  std::string config;
  std::string out;

  auto* run = app.add_subcommand("run", "Run one solver and write per-iteration metrics (CSV) plus a JSON summary");
  run->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "CSV output path; the summary goes next to it as <stem>.summary.json");

  auto* topo = app.add_subcommand("topology", "Build the gossip matrix and print its validation report as JSON");
  topo->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  topo->add_option("--out", out, "Also write the report to this file");

  auto* compare = app.add_subcommand("compare", "Run several solvers on one problem and rank their costs");
  compare->add_option("--config", config, "Experiment config (JSON) with a 'solvers' list")->required()->check(CLI::ExistingFile);
  compare->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : odapg::harness::kExitConfig;
  }

  namespace h = odapg::harness;
  if (run->parsed()) return h::cli_run(config, out, std::cerr);
  if (topo->parsed()) return h::cli_topology(config, out, std::cout, std::cerr);
  return h::cli_compare(config, out, std::cerr);
}
