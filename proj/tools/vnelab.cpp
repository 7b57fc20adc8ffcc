#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "vne/harness.hpp"

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.front() == '-')
      throw vne::InvalidConfig("--seeds: '" + item + "' is not a seed");
    seeds.push_back(v);
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace vne::harness;

  CLI::App app{"Virtual network embedding lab: generate scenarios, train the "
               "policy-gradient node mapper, test and compare engines."};
  app.require_subcommand(1);

  Options opts;
  std::string config, scenario, checkpoint, out_dir = ".", seeds_text;
  std::uint64_t seed = 0;
  double window = 0.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out-dir", out_dir, "Directory for output files");
    cmd->add_option("--window", window, "Reporting window length in time units");
  };

  auto* gen = app.add_subcommand("generate", "Generate a scenario file");
  gen->add_option("--config", config, "Scenario config JSON");
  gen->add_option("--seed", seed, "Master seed (overrides config)");
  add_common(gen);

  auto* train = app.add_subcommand("train", "Train the qs-drl policy");
  train->add_option("--scenario", scenario, "Scenario JSON")->required();
  train->add_option("--config", config, "Config JSON with training parameters");
  train->add_option("--checkpoint", checkpoint, "Checkpoint to resume from");
  add_common(train);

  auto* test = app.add_subcommand("test", "Run one engine over the test stream");
  test->add_option("--scenario", scenario, "Scenario JSON")->required();
  test->add_option("--engine", opts.engine, "qs-drl, baseline, bl-vne or cnl-vne")
      ->required();
  test->add_option("--checkpoint", checkpoint, "Trained policy (qs-drl only)");
  test->add_option("--config", config, "Config JSON with run parameters");
  add_common(test);

  auto* compare = app.add_subcommand("compare", "Run all engines across seeds");
  compare->add_option("--config", config, "Scenario config JSON");
  compare->add_option("--scenario", scenario, "Scenario JSON");
  compare->add_option("--checkpoint", checkpoint,
                      "Trained policy; trains one per seed when omitted");
  compare->add_option("--seeds", seeds_text, "Comma-separated master seeds");
  add_common(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (!config.empty()) opts.config = config;
    if (!scenario.empty()) opts.scenario = scenario;
    if (!checkpoint.empty()) opts.checkpoint = checkpoint;
    if (gen->count("--seed") > 0) opts.seed = seed;
    if (!seeds_text.empty()) opts.seeds = parse_seed_list(seeds_text);
    opts.out_dir = out_dir;
    for (auto* cmd : app.get_subcommands())
      if (cmd->count("--window") > 0) opts.window = window;

    if (*gen)
      cmd_generate(opts, std::cout);
    else if (*train)
      cmd_train(opts, std::cout);
    else if (*test)
      cmd_test(opts, std::cout);
    else if (*compare)
      cmd_compare(opts, std::cout);
    return kOk;
  } catch (...) {
    return report_error(std::cerr);
  }
}
