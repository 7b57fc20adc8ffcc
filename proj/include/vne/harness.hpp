#ifndef VNE_HARNESS_HPP
#define VNE_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vne/io.hpp"

namespace vne::harness {

inline constexpr const char* kToolVersion = "0.1.0";

/// Process exit codes.
enum ExitCode : int { kOk = 0, kInternalError = 1, kConfigError = 2, kIoError = 3 };

struct Options {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> scenario;
  std::optional<std::filesystem::path> checkpoint;
  std::string engine;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out_dir = ".";
  std::optional<double> window;
};

/// Everything needed to reproduce a command's outputs. The hash covers every
/// field except the output paths.
struct RunManifest {
  std::string command;
  Json config;
  std::vector<std::uint64_t> seeds;
  std::string engine;
  std::string scenario_hash;
  std::string checkpoint_path;
  std::string checkpoint_hash;
  std::vector<std::string> outputs;

  Json to_json() const;
  std::string hash() const;
};

/// Writes <out>/scenario.json.
void cmd_generate(const Options& opts, std::ostream& log);
/// Writes <out>/checkpoint.json and <out>/training.csv. With a checkpoint,
/// training resumes from its parameters and epoch count.
void cmd_train(const Options& opts, std::ostream& log);
/// Writes <out>/test_<engine>.csv and prints a summary line.
void cmd_test(const Options& opts, std::ostream& log);
/// Writes <out>/compare.csv (long format) and <out>/compare_summary.csv.
void cmd_compare(const Options& opts, std::ostream& log);

/// Scenario from --scenario, else generated from --config (or defaults),
/// with --seed and --window applied.
Scenario load_or_generate_scenario(const Options& opts);

/// Policy the first training epoch starts from.
PolicyNetwork initial_policy(const ScenarioConfig& cfg);

/// Maps an exception to its exit code and prints "error: <code>: <msg>".
int report_error(std::ostream& err);

}  // namespace vne::harness

#endif  // VNE_HARNESS_HPP
