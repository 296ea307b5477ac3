#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "odapg/objective.hpp"
#include "odapg/solver.hpp"
#include "odapg/topology.hpp"

namespace odapg::harness {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Environment variable overriding every seed in a config.
inline constexpr const char* kSeedEnv = "ODAPG_SEED";

struct TopologySpec {
  std::string kind;  // er | ring | path | complete | star | matrix
  int m = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::optional<Matrix> matrix;  // raw W for kind == "matrix"
};

struct ProblemSpec {
  std::string source = "synthetic";  // synthetic | libsvm
  int n_per_agent = 0;
  int d = 0;
  std::uint64_t seed = 0;
  std::string path;
  PartitionScheme scheme = PartitionScheme::contiguous;
  double sigma = 0.0;
  double mu = 0.0;
};

struct SolverSpec {
  std::string name;
  Variant variant = Variant::odapg;
  std::optional<Regime> regime;
  int T = 0;
  std::optional<int> K;
  std::optional<double> gamma;
  std::optional<double> tau;
  std::optional<double> eta;
};

struct ReferenceSpec {
  double tol = 1e-10;
  int cap = 200000;
};

struct ExperimentConfig {
  TopologySpec topology;
  std::optional<ProblemSpec> problem;
  std::vector<SolverSpec> solvers;
  ReferenceSpec reference;
  std::optional<std::string> output;
  bool record_wall_time = false;
  std::vector<double> thresholds{1e-3, 1e-6};
};

enum class ConfigUse { run, topology, compare };

// Throws ConfigError on any schema violation. Relative paths resolve against base_dir.
ExperimentConfig parse_config(const nlohmann::json& j, ConfigUse use, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path, ConfigUse use);
// Replaces every seed with the value of ODAPG_SEED when that variable is set.
void apply_seed_env(ExperimentConfig& cfg);

Graph build_graph(const TopologySpec& spec);
// For odapg_ext the ridge part of the elastic net moves into the locals
// (f_i + mu/2 ||.||^2 with g = sigma ||.||_1), which leaves F unchanged.
CompositeProblem build_problem(const ProblemSpec& spec, int m, Variant variant);
Schedule build_schedule(const SolverSpec& spec, const CompositeProblem& p, const GossipMatrix& w);

struct ThresholdHit {
  double threshold;
  std::optional<long long> gradients;
  std::optional<long long> rounds;
  std::optional<int> iterations;
};

std::vector<ThresholdHit> first_hits(const std::vector<MetricsRecord>& metrics, const std::vector<double>& thresholds);

nlohmann::json summarize(const RunResult& result, const Schedule& sched, const SolverSpec& spec,
                         const GossipMatrix& w, const ExperimentConfig& cfg, const CompositeProblem& p);

// Subcommands. Diagnostics go to err; the topology report also goes to out.
int cli_run(const std::string& config_path, const std::string& out_path, std::ostream& err);
int cli_topology(const std::string& config_path, const std::string& out_path, std::ostream& out, std::ostream& err);
int cli_compare(const std::string& config_path, const std::string& out_dir, std::ostream& err);

}  // namespace odapg::harness
