#include "vne/harness.hpp"

#include <future>
#include <map>
#include <sstream>

#include "vne/embedders.hpp"
#include "vne/metrics.hpp"

namespace vne::harness {

namespace fs = std::filesystem;

Json RunManifest::to_json() const {
  return {{"tool_version", kToolVersion}, {"command", command},
          {"config", config},             {"seeds", seeds},
          {"engine", engine},             {"scenario_hash", scenario_hash},
          {"checkpoint_path", checkpoint_path},
          {"checkpoint_hash", checkpoint_hash},
          {"outputs", outputs}};
}

std::string RunManifest::hash() const {
  Json j = to_json();
  j.erase("outputs");
  j.erase("checkpoint_path");
  return content_hash(j.dump());
}

namespace {

std::string manifest_line(const RunManifest& m) {
  return "# manifest " + m.hash() + "\n";
}

void write_manifest(const fs::path& out_dir, RunManifest& m) {
  Json j = m.to_json();
  j["hash"] = m.hash();
  write_text_file(out_dir / (m.command + ".manifest.json"), dump(j));
}

ScenarioConfig load_config(const Options& opts) {
  ScenarioConfig cfg;
  if (opts.config) cfg = config_from_json(read_json_file(*opts.config));
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.window) cfg.window = *opts.window;
  validate(cfg);
  return cfg;
}

/// Training knobs from --config replace the scenario's own.
void apply_training_overrides(const Options& opts, ScenarioConfig& cfg) {
  if (opts.config) {
    ScenarioConfig over = config_from_json(read_json_file(*opts.config));
    cfg.epochs = over.epochs;
    cfg.learning_rate = over.learning_rate;
    cfg.batch_size = over.batch_size;
    cfg.window = over.window;
    cfg.feature_scaling = over.feature_scaling;
  }
  if (opts.window) cfg.window = *opts.window;
  validate(cfg);
}

Scenario require_scenario(const Options& opts) {
  if (!opts.scenario) throw InvalidConfig("--scenario: required");
  Scenario s = scenario_from_json(read_json_file(*opts.scenario));
  apply_training_overrides(opts, s.config);
  return s;
}

std::string scenario_hash(const Scenario& s) {
  Json j = scenario_to_json(s);
  return content_hash(j.dump());
}

std::optional<PolicyCheckpoint> load_checkpoint(const Options& opts,
                                                std::string& hash) {
  if (!opts.checkpoint) return std::nullopt;
  Json j = read_json_file(*opts.checkpoint);
  j.erase("manifest");
  hash = content_hash(j.dump());
  return checkpoint_from_json(j);
}

}  // namespace

Scenario load_or_generate_scenario(const Options& opts) {
  if (opts.scenario) {
    Scenario s = scenario_from_json(read_json_file(*opts.scenario));
    if (opts.window) s.config.window = *opts.window;
    validate(s.config);
    return s;
  }
  return generate_scenario(load_config(opts));
}

PolicyNetwork initial_policy(const ScenarioConfig& cfg) {
  return PolicyNetwork::random(derive_seed(cfg.seed, SeedStream::policy_init));
}

void cmd_generate(const Options& opts, std::ostream& log) {
  const ScenarioConfig cfg = load_config(opts);
  const Scenario s = generate_scenario(cfg);

  RunManifest m;
  m.command = "generate";
  m.config = config_to_json(cfg);
  m.seeds = {cfg.seed};
  m.scenario_hash = scenario_hash(s);
  const fs::path out = opts.out_dir / "scenario.json";
  m.outputs = {out.string()};

  Json j = scenario_to_json(s);
  j["manifest"] = m.hash();
  write_text_file(out, dump(j));
  write_manifest(opts.out_dir, m);
  log << "wrote " << out.string() << " (" << s.substrate.node_count()
      << " substrate nodes, " << s.substrate.link_count() << " links, "
      << s.requests.size() << " requests)\n";
}

void cmd_train(const Options& opts, std::ostream& log) {
  Scenario s = require_scenario(opts);
  std::string ck_hash;
  auto resumed = load_checkpoint(opts, ck_hash);

  PolicyCheckpoint ck;
  ck.seed = s.config.seed;
  ck.policy = resumed ? resumed->policy : initial_policy(s.config);
  ck.epochs = resumed ? resumed->epochs : 0;

  auto epochs = run_training(s, ck.policy, ck.epochs, s.config.epochs);
  ck.epochs += s.config.epochs;

  RunManifest m;
  m.command = "train";
  m.config = config_to_json(s.config);
  m.seeds = {s.config.seed};
  m.engine = std::string(kEngineNames[0]);
  m.scenario_hash = scenario_hash(s);
  if (opts.checkpoint) m.checkpoint_path = opts.checkpoint->string();
  m.checkpoint_hash = ck_hash;
  const fs::path ck_out = opts.out_dir / "checkpoint.json";
  const fs::path csv_out = opts.out_dir / "training.csv";
  m.outputs = {ck_out.string(), csv_out.string()};

  Json cj = checkpoint_to_json(ck);
  cj["manifest"] = m.hash();
  write_text_file(ck_out, dump(cj));
  std::ostringstream csv;
  csv << manifest_line(m);
  write_epoch_csv(csv, epochs);
  write_text_file(csv_out, csv.str());
  write_manifest(opts.out_dir, m);

  log << "trained " << epochs.size() << " epochs (total " << ck.epochs
      << "); wrote " << ck_out.string() << ", " << csv_out.string() << "\n";
}

namespace {

std::unique_ptr<EmbeddingEngine> engine_for(const std::string& name,
                                            const std::optional<PolicyCheckpoint>& ck,
                                            const ScenarioConfig& cfg) {
  if (engine_needs_policy(name) && !ck)
    throw InvalidConfig("--checkpoint: required for engine " + name);
  return make_engine(name, ck ? &ck->policy : nullptr, cfg.feature_scaling);
}

}  // namespace

void cmd_test(const Options& opts, std::ostream& log) {
  if (opts.engine.empty()) throw InvalidConfig("--engine: required");
  // Validate the name before any expensive work.
  if (!engine_needs_policy(opts.engine)) make_engine(opts.engine);
  Scenario s = require_scenario(opts);
  std::string ck_hash;
  auto ck = engine_needs_policy(opts.engine) ? load_checkpoint(opts, ck_hash)
                                             : std::nullopt;
  auto engine = engine_for(opts.engine, ck, s.config);
  TestResult result = run_test(s, *engine);

  RunManifest m;
  m.command = "test";
  m.config = config_to_json(s.config);
  m.seeds = {s.config.seed};
  m.engine = opts.engine;
  m.scenario_hash = scenario_hash(s);
  if (ck) m.checkpoint_path = opts.checkpoint->string();
  m.checkpoint_hash = ck_hash;
  const fs::path out = opts.out_dir / ("test_" + opts.engine + ".csv");
  m.outputs = {out.string()};

  std::ostringstream csv;
  csv << manifest_line(m);
  write_window_csv(csv, result.ledger.window_series());
  write_text_file(out, csv.str());
  write_manifest(opts.out_dir, m);

  const auto& l = result.ledger;
  log << "summary engine=" << opts.engine << " arrivals=" << l.arrivals()
      << " acceptances=" << l.acceptances()
      << " acceptance_rate=" << format_optional(l.acceptance_rate())
      << " rc_ratio=" << format_optional(l.rc_ratio())
      << " avg_revenue=" << format_optional(l.long_term_average_revenue())
      << "\n";
}

void cmd_compare(const Options& opts, std::ostream& log) {
  const Scenario base = load_or_generate_scenario(opts);
  std::vector<std::uint64_t> seeds = opts.seeds;
  if (seeds.empty()) seeds = {base.config.seed};

  std::string ck_hash;
  const auto ck = load_checkpoint(opts, ck_hash);

  struct Replica {
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, MetricsLedger>> runs;
  };
  auto run_replica = [&](std::uint64_t seed) {
    Scenario s = base;
    if (seed != base.config.seed || opts.scenario == std::nullopt) {
      ScenarioConfig cfg = base.config;
      cfg.seed = seed;
      s = generate_scenario(cfg);
    }
    std::optional<PolicyCheckpoint> policy = ck;
    if (!policy) {
      PolicyCheckpoint trained;
      trained.seed = seed;
      trained.policy = initial_policy(s.config);
      run_training(s, trained.policy, 0, s.config.epochs);
      trained.epochs = s.config.epochs;
      policy = trained;
    }
    Replica rep;
    rep.seed = seed;
    for (auto name : kEngineNames) {
      auto engine = engine_for(std::string(name), policy, s.config);
      rep.runs.emplace_back(std::string(name), run_test(s, *engine).ledger);
    }
    return rep;
  };

  std::vector<std::future<Replica>> futures;
  for (auto seed : seeds)
    futures.push_back(std::async(std::launch::async, run_replica, seed));
  std::vector<Replica> replicas;
  for (auto& f : futures) replicas.push_back(f.get());

  RunManifest m;
  m.command = "compare";
  m.config = config_to_json(base.config);
  m.seeds = seeds;
  m.engine = "all";
  m.scenario_hash = opts.scenario ? scenario_hash(base) : std::string{};
  if (ck) m.checkpoint_path = opts.checkpoint->string();
  m.checkpoint_hash = ck_hash;
  const fs::path out = opts.out_dir / "compare.csv";
  const fs::path summary_out = opts.out_dir / "compare_summary.csv";
  m.outputs = {out.string(), summary_out.string()};

  std::ostringstream csv;
  csv << manifest_line(m);
  csv << "engine,seed,window,time,avg_revenue,rc_ratio,acceptance_rate\n";
  for (auto name : kEngineNames) {
    for (const auto& rep : replicas) {
      for (const auto& [engine, ledger] : rep.runs) {
        if (engine != name) continue;
        const auto& series = ledger.window_series();
        for (std::size_t w = 0; w < series.size(); ++w) {
          const auto& r = series[w];
          csv << engine << ',' << rep.seed << ',' << (w + 1) << ','
              << format_double(r.time) << ',' << format_optional(r.avg_revenue)
              << ',' << format_optional(r.rc_ratio) << ','
              << format_optional(r.acceptance_rate) << '\n';
        }
      }
    }
  }
  write_text_file(out, csv.str());

  // Means over seeds of each engine's final values; absent values are skipped.
  std::ostringstream sum;
  sum << manifest_line(m);
  sum << "engine,seeds,avg_revenue,rc_ratio,acceptance_rate\n";
  for (auto name : kEngineNames) {
    double totals[3] = {0, 0, 0};
    int counts[3] = {0, 0, 0};
    for (const auto& rep : replicas) {
      for (const auto& [engine, ledger] : rep.runs) {
        if (engine != name) continue;
        std::optional<double> vals[3] = {ledger.long_term_average_revenue(),
                                         ledger.rc_ratio(),
                                         ledger.acceptance_rate()};
        for (int i = 0; i < 3; ++i)
          if (vals[i]) {
            totals[i] += *vals[i];
            ++counts[i];
          }
      }
    }
    sum << name << ',' << replicas.size();
    for (int i = 0; i < 3; ++i) {
      std::optional<double> mean;
      if (counts[i] > 0) mean = totals[i] / counts[i];
      sum << ',' << format_optional(mean);
    }
    sum << '\n';
  }
  write_text_file(summary_out, sum.str());
  write_manifest(opts.out_dir, m);
  log << sum.str().substr(sum.str().find('\n') + 1);
}

int report_error(std::ostream& err) {
  try {
    throw;
  } catch (const IoError& e) {
    err << "error: io: " << e.what() << "\n";
    return kIoError;
  } catch (const std::invalid_argument& e) {
    // InvalidConfig and UnknownEngine.
    err << "error: config: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace vne::harness
