#ifndef VNE_IO_HPP
#define VNE_IO_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "vne/policy_net.hpp"
#include "vne/sim.hpp"

namespace vne {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

/// Unknown keys and mistyped values raise InvalidConfig naming the key.
/// Missing keys keep their defaults.
ScenarioConfig config_from_json(const Json& j);
Json config_to_json(const ScenarioConfig& cfg);

Json substrate_to_json(const SubstrateNetwork& net);
SubstrateNetwork substrate_from_json(const Json& j);

Json request_to_json(const VirtualNetworkRequest& vnr);
VirtualNetworkRequest request_from_json(const Json& j);

/// {"config": ..., "substrate": {...}, "requests": [...]}
Json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const Json& j);

struct PolicyCheckpoint {
  PolicyNetwork policy;
  /// Master seed of the scenario it was trained on.
  std::uint64_t seed = 0;
  /// Epochs completed so far.
  std::int64_t epochs = 0;

  friend bool operator==(const PolicyCheckpoint&, const PolicyCheckpoint&) = default;
};

Json checkpoint_to_json(const PolicyCheckpoint& c);
PolicyCheckpoint checkpoint_from_json(const Json& j);

/// Parses a file; IoError if it cannot be read, InvalidConfig if it is not
/// valid JSON.
Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
/// Truncates and writes, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Canonical serialized form: 2-space indent, trailing newline.
std::string dump(const Json& j);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string content_hash(const std::string& bytes);

}  // namespace vne

#endif  // VNE_IO_HPP
