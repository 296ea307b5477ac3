#include "odapg/harness.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "odapg/consensus.hpp"
#include "odapg/errors.hpp"

namespace odapg::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing required field '" + key + "'");
  return j.at(key);
}

template <class T>
T get_as(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_as<T>(j, key, where);
}

TopologySpec parse_topology(const json& j) {
  const std::string where = "topology";
  TopologySpec t;
  t.kind = get_as<std::string>(j, "kind", where);
  if (t.kind == "matrix") {
    const json& rows = require(j, "matrix", where);
    if (!rows.is_array() || rows.empty()) throw ConfigError("topology.matrix must be a non-empty array of rows");
    const auto m = static_cast<Index>(rows.size());
    Matrix w(m, m);
    for (Index i = 0; i < m; ++i) {
      const json& row = rows[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Index>(row.size()) != m) throw ConfigError("topology.matrix must be square");
      for (Index k = 0; k < m; ++k) {
        if (!row[static_cast<std::size_t>(k)].is_number()) throw ConfigError("topology.matrix entries must be numbers");
        w(i, k) = row[static_cast<std::size_t>(k)].get<double>();
      }
    }
    t.m = static_cast<int>(m);
    t.matrix = std::move(w);
    return t;
  }
  t.m = get_as<int>(j, "m", where);
  if (t.m < 2) throw ConfigError("topology.m must be >= 2");
  if (t.kind == "er") {
    t.p = get_as<double>(j, "p", where);
    if (!(t.p > 0.0 && t.p <= 1.0)) throw ConfigError("topology.p must lie in (0, 1]");
    t.seed = get_opt<std::uint64_t>(j, "seed", where).value_or(0);
  } else if (!parse_builtin_kind(t.kind)) {
    throw ConfigError("topology.kind '" + t.kind + "' is not one of er, ring, path, complete, star, matrix");
  }
  return t;
}

ProblemSpec parse_problem(const json& j, const std::string& base_dir) {
  const std::string where = "problem";
  ProblemSpec p;
  p.source = get_opt<std::string>(j, "source", where).value_or("synthetic");
  p.sigma = get_opt<double>(j, "sigma", where).value_or(0.0);
  p.mu = get_opt<double>(j, "mu", where).value_or(0.0);
  if (p.sigma < 0.0 || p.mu < 0.0) throw ConfigError("problem.sigma and problem.mu must be >= 0");
  p.seed = get_opt<std::uint64_t>(j, "seed", where).value_or(0);
  const auto scheme = get_opt<std::string>(j, "partition", where).value_or("contiguous");
  if (scheme == "contiguous") {
    p.scheme = PartitionScheme::contiguous;
  } else if (scheme == "round_robin") {
    p.scheme = PartitionScheme::round_robin;
  } else {
    throw ConfigError("problem.partition must be contiguous or round_robin");
  }
  if (p.source == "synthetic") {
    p.n_per_agent = get_as<int>(j, "n_per_agent", where);
    p.d = get_as<int>(j, "d", where);
    if (p.n_per_agent < 1 || p.d < 1) throw ConfigError("problem.n_per_agent and problem.d must be positive");
  } else if (p.source == "libsvm") {
    fs::path path = get_as<std::string>(j, "path", where);
    if (path.is_relative()) path = fs::path(base_dir) / path;
    if (!fs::exists(path)) throw ConfigError("problem.path '" + path.string() + "' does not exist");
    p.path = path.string();
    p.n_per_agent = get_opt<int>(j, "n_per_agent", where).value_or(0);
    p.d = get_opt<int>(j, "d", where).value_or(0);
  } else {
    throw ConfigError("problem.source must be synthetic or libsvm");
  }
  return p;
}

SolverSpec parse_solver(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  SolverSpec s;
  const auto variant = get_opt<std::string>(j, "variant", where).value_or("odapg");
  const auto v = parse_variant(variant);
  if (!v) throw ConfigError(where + ".variant '" + variant + "' is not odapg, odapg_ext or baseline");
  s.variant = *v;
  s.name = get_opt<std::string>(j, "name", where).value_or(variant);
  if (const auto r = get_opt<std::string>(j, "regime", where)) {
    s.regime = parse_regime(*r);
    if (!s.regime) throw ConfigError(where + ".regime '" + *r + "' is unknown");
  }
  s.T = get_as<int>(j, "T", where);
  if (s.T < 1) throw ConfigError(where + ".T must be >= 1");
  s.K = get_opt<int>(j, "K", where);
  if (s.K && *s.K < 0) throw ConfigError(where + ".K must be >= 0");
  s.gamma = get_opt<double>(j, "gamma", where);
  s.tau = get_opt<double>(j, "tau", where);
  s.eta = get_opt<double>(j, "eta", where);
  return s;
}

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv(kSeedEnv);
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0') throw ConfigError(std::string(kSeedEnv) + " must be an unsigned integer");
  return v;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NonFiniteState*>(&e) || dynamic_cast<const NoConvergence*>(&e) ||
      dynamic_cast<const SpectralFailure*>(&e)) {
    return kExitNumerical;
  }
  return kExitConfig;
}

json metrics_json(const MetricsRecord& r) {
  return json{{"t", r.t},
              {"suboptimality", r.suboptimality},
              {"sq_dist", r.sq_dist},
              {"consensus_x", r.consensus_x},
              {"consensus_z", r.consensus_z},
              {"consensus_s", r.consensus_s},
              {"grads_cumulative", r.grads_cumulative},
              {"rounds_cumulative", r.rounds_cumulative},
              {"wall_ms", r.wall_ms}};
}

json hits_json(const std::vector<ThresholdHit>& hits) {
  json out = json::array();
  for (const auto& h : hits) {
    json e{{"threshold", h.threshold}};
    if (h.gradients) {
      e["gradients"] = *h.gradients;
      e["rounds"] = *h.rounds;
      e["iterations"] = *h.iterations;
    } else {
      e["gradients"] = "not reached";
      e["rounds"] = "not reached";
      e["iterations"] = "not reached";
    }
    out.push_back(std::move(e));
  }
  return out;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

std::string summary_path_for(const std::string& csv_path) {
  fs::path p(csv_path);
  p.replace_extension(".summary.json");
  return p.string();
}

struct Built {
  Graph graph;
  GossipMatrix w;
};

Built build_network(const TopologySpec& spec) {
  Graph g = build_graph(spec);
  GossipMatrix w = gossip_matrix(g);
  return {std::move(g), std::move(w)};
}

}  // namespace

ExperimentConfig parse_config(const json& j, ConfigUse use, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  cfg.topology = parse_topology(require(j, "topology", "config"));
  if (use == ConfigUse::topology) return cfg;

  if (cfg.topology.kind == "matrix") throw ConfigError("raw matrices are only accepted by the topology subcommand");
  cfg.problem = parse_problem(require(j, "problem", "config"), base_dir);
  if (j.contains("reference")) {
    const json& r = j.at("reference");
    cfg.reference.tol = get_opt<double>(r, "tol", "reference").value_or(cfg.reference.tol);
    cfg.reference.cap = get_opt<int>(r, "cap", "reference").value_or(cfg.reference.cap);
    if (!(cfg.reference.tol > 0.0) || cfg.reference.cap < 1) throw ConfigError("reference.tol and reference.cap must be positive");
  }
  cfg.output = get_opt<std::string>(j, "output", "config");
  cfg.record_wall_time = get_opt<bool>(j, "record_wall_time", "config").value_or(false);
  if (const auto th = get_opt<std::vector<double>>(j, "thresholds", "config")) cfg.thresholds = *th;

  if (use == ConfigUse::run) {
    cfg.solvers.push_back(parse_solver(require(j, "solver", "config"), "solver"));
  } else {
    const json& list = require(j, "solvers", "config");
    if (!list.is_array() || list.size() < 2) throw ConfigError("compare needs at least two entries in 'solvers'");
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.solvers.push_back(parse_solver(list[i], "solvers[" + std::to_string(i) + "]"));
    }
    std::vector<std::string> names;
    for (const auto& s : cfg.solvers) names.push_back(s.name);
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
      throw ConfigError("solver names must be unique (set 'name' explicitly)");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, ConfigUse use) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  const auto base = fs::path(path).parent_path();
  ExperimentConfig cfg = parse_config(j, use, base.empty() ? "." : base.string());
  apply_seed_env(cfg);
  return cfg;
}

void apply_seed_env(ExperimentConfig& cfg) {
  const auto seed = seed_from_env();
  if (!seed) return;
  cfg.topology.seed = *seed;
  if (cfg.problem) cfg.problem->seed = *seed;
}

Graph build_graph(const TopologySpec& spec) {
  if (spec.kind == "er") return generate_er_graph(spec.m, spec.p, spec.seed);
  const auto kind = parse_builtin_kind(spec.kind);
  if (!kind) throw ConfigError("topology.kind '" + spec.kind + "' cannot be built as a graph");
  return builtin_graph(*kind, spec.m);
}

CompositeProblem build_problem(const ProblemSpec& spec, int m, Variant variant) {
  std::vector<Dataset> parts;
  if (spec.source == "synthetic") {
    parts = synth_logistic(m, spec.n_per_agent, spec.d, spec.seed);
  } else {
    LibsvmReadInfo info;
    const auto hint = spec.d > 0 ? std::optional<Index>(spec.d) : std::nullopt;
    Dataset data = read_libsvm(spec.path, hint, &info);
    if (info.remapped_zero_labels > 0) {
      std::clog << "odapg: remapped " << info.remapped_zero_labels << " zero labels to -1\n";
    }
    if (spec.n_per_agent > 0) {
      const Index keep = static_cast<Index>(spec.n_per_agent) * m;
      if (keep > data.samples()) {
        throw ConfigError("dataset has " + std::to_string(data.samples()) + " samples, fewer than m * n_per_agent");
      }
      data.features.conservativeResize(keep, Eigen::NoChange);
      data.labels.conservativeResize(keep);
    }
    parts = partition(data, m, spec.scheme, spec.seed);
  }
  std::vector<LocalPtr> locals = logistic_locals(parts);
  if (variant == Variant::odapg_ext) {
    for (auto& f : locals) f = shifted_local(f, spec.mu);
    return make_problem(std::move(locals), elastic_net(spec.sigma, 0.0));
  }
  return make_problem(std::move(locals), elastic_net(spec.sigma, spec.mu));
}

Schedule build_schedule(const SolverSpec& spec, const CompositeProblem& p, const GossipMatrix& w) {
  const bool overrides = spec.gamma.has_value() || spec.tau.has_value();
  std::optional<Schedule> sched;
  switch (spec.variant) {
    case Variant::odapg: {
      const int K = spec.K.value_or(default_k(w.gap(), MixRegime::main));
      if (overrides || spec.regime == Regime::constant) {
        if (!spec.gamma || !spec.tau) throw ConfigError("constant schedule needs both gamma and tau");
        sched = Schedule::constant(*spec.gamma, *spec.tau, K, spec.T);
        break;
      }
      const Regime regime = spec.regime.value_or(p.mu > 0.0 ? Regime::strongly_convex_g : Regime::general_convex_g);
      if (regime == Regime::strongly_convex_g) {
        sched = Schedule::strongly_convex(p.L, p.mu, K, spec.T);
      } else if (regime == Regime::general_convex_g) {
        sched = Schedule::general_convex(p.L, K, spec.T);
      } else {
        throw ConfigError("variant odapg cannot use regime " + to_string(regime));
      }
      break;
    }
    case Variant::odapg_ext: {
      if (overrides) throw ConfigError("odapg_ext derives gamma and tau from L and mu; overrides are not supported");
      if (spec.regime && *spec.regime != Regime::extension) throw ConfigError("odapg_ext requires regime extension");
      const int K = spec.K.value_or(default_k(w.gap(), MixRegime::extension));
      sched = Schedule::extension(p.L, p.f_mu, K, spec.T);
      break;
    }
    case Variant::baseline: {
      const int K = spec.K.value_or(default_k(w.gap(), MixRegime::main));
      sched = Schedule::constant(spec.gamma.value_or(1.0 / (2.0 * p.L)), 1.0, K, spec.T);
      break;
    }
  }
  sched->with_eta(spec.eta);
  return *sched;
}

std::vector<ThresholdHit> first_hits(const std::vector<MetricsRecord>& metrics, const std::vector<double>& thresholds) {
  std::vector<ThresholdHit> hits;
  for (double th : thresholds) {
    ThresholdHit h{th, std::nullopt, std::nullopt, std::nullopt};
    for (const auto& r : metrics) {
      if (r.suboptimality <= th) {
        h.gradients = r.grads_cumulative;
        h.rounds = r.rounds_cumulative;
        h.iterations = r.t;
        break;
      }
    }
    hits.push_back(h);
  }
  return hits;
}

json summarize(const RunResult& result, const Schedule& sched, const SolverSpec& spec, const GossipMatrix& w,
               const ExperimentConfig& cfg, const CompositeProblem& p) {
  json j;
  j["name"] = spec.name;
  j["variant"] = to_string(spec.variant);
  j["regime"] = to_string(sched.regime());
  j["schedule"] = sched.id();
  j["gamma_first"] = sched.gamma(1);
  j["tau_first"] = sched.tau(1);
  j["gamma_last"] = sched.gamma(sched.T());
  j["tau_last"] = sched.tau(sched.T());
  j["K"] = sched.K();
  j["T"] = sched.T();
  j["eta"] = sched.eta().value_or(w.eta_w());
  j["lambda2"] = w.lambda2();
  j["gap"] = w.gap();
  j["m"] = p.agents();
  j["d"] = p.d;
  j["L"] = p.L;
  j["mu"] = cfg.problem ? cfg.problem->mu : 0.0;
  j["sigma"] = cfg.problem ? cfg.problem->sigma : 0.0;
  j["seed"] = {{"topology", cfg.topology.seed}, {"problem", cfg.problem ? cfg.problem->seed : 0}};
  if (result.reference) {
    j["F_star"] = result.reference->value;
    j["reference_residual"] = result.reference->residual;
    j["reference_iterations"] = result.reference->iterations;
    j["reference_tol"] = result.reference->tol;
  }
  j["ledger"] = {{"gradients", result.state.grads.count}, {"rounds", result.state.comm.rounds}};
  j["clamped_rows"] = result.clamped_rows;
  if (!result.metrics.empty()) j["final"] = metrics_json(result.metrics.back());
  j["targets"] = hits_json(first_hits(result.metrics, cfg.thresholds));
  return j;
}

int cli_run(const std::string& config_path, const std::string& out_path, std::ostream& err) {
  try {
    const ExperimentConfig cfg = load_config(config_path, ConfigUse::run);
    const std::string csv = !out_path.empty() ? out_path : cfg.output.value_or("");
    if (csv.empty()) throw ConfigError("no output path (use --out or set 'output')");
    const SolverSpec& spec = cfg.solvers.front();

    const Built net = build_network(cfg.topology);
    const CompositeProblem p = build_problem(*cfg.problem, cfg.topology.m, spec.variant);
    const Schedule sched = build_schedule(spec, p, net.w);
    const Reference ref = centralized_reference(p, cfg.reference.tol, cfg.reference.cap);
    const RunResult result =
        run(p, net.w, sched, Vector::Zero(p.d), ref, spec.variant, RunOptions{cfg.record_wall_time});

    write_metrics_csv(csv, result.metrics);
    write_json(summary_path_for(csv), summarize(result, sched, spec, net.w, cfg, p));
    return kExitOk;
  } catch (const std::exception& e) {
    err << "odapg run: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cli_topology(const std::string& config_path, const std::string& out_path, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentConfig cfg = load_config(config_path, ConfigUse::topology);
    json j;
    ValidationReport report;
    if (cfg.topology.matrix) {
      report = validate_gossip(*cfg.topology.matrix);
      j["source"] = "matrix";
    } else {
      const Built net = build_network(cfg.topology);
      report = validate_gossip(net.w.matrix(), &net.graph);
      j["source"] = cfg.topology.kind;
      j["edges"] = net.graph.edge_count();
      j["seed"] = cfg.topology.seed;
      j["laplacian_lambda1"] = net.w.laplacian_lambda1();
    }
    j["m"] = cfg.topology.m;
    json clauses = json::array();
    for (const auto& c : report.clauses) clauses.push_back({{"clause", c.name}, {"passed", c.passed}, {"residual", c.residual}});
    j["report"] = clauses;
    j["valid"] = report.all_passed();
    if (report.eigenvalues.size() >= 2) {
      const double lambda2 = std::max(0.0, report.eigenvalues[report.eigenvalues.size() - 2]);
      j["lambda2"] = lambda2;
      j["gap"] = 1.0 - lambda2;
      if (report.all_passed()) {
        j["eta_w"] = 1.0 / (1.0 + std::sqrt(1.0 - lambda2 * lambda2));
        j["default_k"] = {{"main", default_k(1.0 - lambda2, MixRegime::main)},
                          {"extension", default_k(1.0 - lambda2, MixRegime::extension)}};
      }
    }
    out << j.dump(2) << "\n";
    if (!out_path.empty()) write_json(out_path, j);
    return report.all_passed() ? kExitOk : kExitValidationFailed;
  } catch (const std::exception& e) {
    err << "odapg topology: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cli_compare(const std::string& config_path, const std::string& out_dir, std::ostream& err) {
  try {
    const ExperimentConfig cfg = load_config(config_path, ConfigUse::compare);
    const std::string dir = !out_dir.empty() ? out_dir : cfg.output.value_or("");
    if (dir.empty()) throw ConfigError("no output directory (use --out or set 'output')");

    const Built net = build_network(cfg.topology);
    // The reference is computed once on the problem as stated; every variant's
    // problem has the same F.
    const CompositeProblem base = build_problem(*cfg.problem, cfg.topology.m, Variant::odapg);
    const Reference ref = centralized_reference(base, cfg.reference.tol, cfg.reference.cap);

    struct Entry {
      std::string name;
      json summary;
      std::vector<ThresholdHit> hits;
    };
    std::vector<Entry> entries;
    std::vector<std::pair<std::string, std::vector<MetricsRecord>>> csvs;
    bool diverged = false;
    for (const auto& spec : cfg.solvers) {
      const CompositeProblem p =
          spec.variant == Variant::odapg_ext ? build_problem(*cfg.problem, cfg.topology.m, spec.variant) : base;
      const Schedule sched = build_schedule(spec, p, net.w);
      try {
        const RunResult result = run(p, net.w, sched, Vector::Zero(p.d), ref, spec.variant, RunOptions{cfg.record_wall_time});
        entries.push_back({spec.name, summarize(result, sched, spec, net.w, cfg, p), first_hits(result.metrics, cfg.thresholds)});
        csvs.emplace_back(spec.name, result.metrics);
      } catch (const NonFiniteState& e) {
        err << "odapg compare: solver '" << spec.name << "' diverged: " << e.what() << "\n";
        csvs.emplace_back(spec.name, e.metrics);
        diverged = true;
      }
    }

    fs::create_directories(dir);
    for (const auto& [name, rows] : csvs) write_metrics_csv((fs::path(dir) / (name + ".csv")).string(), rows);

    json summary;
    summary["F_star"] = ref.value;
    summary["gap"] = net.w.gap();
    summary["lambda2"] = net.w.lambda2();
    summary["seed"] = {{"topology", cfg.topology.seed}, {"problem", cfg.problem->seed}};
    summary["diverged"] = diverged;
    json runs = json::object();
    for (const auto& e : entries) runs[e.name] = e.summary;
    summary["runs"] = runs;

    json ranking = json::array();
    for (std::size_t k = 0; k < cfg.thresholds.size(); ++k) {
      for (const char* cost : {"gradients", "rounds"}) {
        std::vector<std::pair<std::optional<long long>, std::string>> order;
        for (const auto& e : entries) {
          const auto& h = e.hits[k];
          order.emplace_back(std::string(cost) == "gradients" ? h.gradients : h.rounds, e.name);
        }
        std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
          if (a.first.has_value() != b.first.has_value()) return a.first.has_value();
          return a.first.has_value() && *a.first < *b.first;
        });
        json list = json::array();
        for (const auto& [value, name] : order) {
          list.push_back({{"name", name}, {cost, value ? json(*value) : json("not reached")}});
        }
        ranking.push_back({{"threshold", cfg.thresholds[k]}, {"cost", cost}, {"order", list}});
      }
    }
    summary["ranking"] = ranking;
    write_json((fs::path(dir) / "summary.json").string(), summary);
    return diverged ? kExitNumerical : kExitOk;
  } catch (const std::exception& e) {
    err << "odapg compare: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace odapg::harness
