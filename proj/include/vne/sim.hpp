#ifndef VNE_SIM_HPP
#define VNE_SIM_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vne/embedders.hpp"
#include "vne/features.hpp"
#include "vne/metrics.hpp"
#include "vne/network_model.hpp"
#include "vne/policy_net.hpp"

namespace vne {

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Experiment parameters. Defaults reproduce the reference setup: a
/// 100-node/570-link substrate, 2000 requests split 1000/1000, 4 arrivals
/// per 100 time units, 100 training epochs at learning rate 0.005.
struct ScenarioConfig {
  std::int64_t substrate_nodes = 100;
  std::int64_t substrate_links = 570;
  Units substrate_cpu_min = 50;
  Units substrate_cpu_max = 100;
  Units substrate_bw_min = 50;
  Units substrate_bw_max = 100;

  std::int64_t vnr_count = 2000;
  /// The first train_count requests form the training stream, the rest the
  /// test stream.
  std::int64_t train_count = 1000;
  std::int64_t vnr_nodes_min = 2;
  std::int64_t vnr_nodes_max = 10;
  double vnr_link_probability = 0.5;
  Units vnr_cpu_min = 1;
  Units vnr_cpu_max = 50;
  Units vnr_bw_min = 1;
  Units vnr_bw_max = 50;

  /// Arrivals per time unit.
  double arrival_rate = 0.04;
  double mean_lifetime = 500.0;

  std::int64_t epochs = 100;
  double learning_rate = 0.005;
  /// Requests per bookkeeping batch; the per-request accept/reject branches
  /// already apply or clear gradients.
  std::int64_t batch_size = 100;
  double window = 100.0;
  std::uint64_t seed = 1;
  FeatureScaling feature_scaling = FeatureScaling::normalized;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Throws InvalidConfig naming the offending field.
void validate(const ScenarioConfig& cfg);

enum class SeedStream : std::uint64_t {
  topology = 1,
  requests = 2,
  arrivals = 3,
  policy_init = 4,
  sampling = 5,
};

/// Independent sub-seed for one consumer of randomness.
std::uint64_t derive_seed(std::uint64_t master, SeedStream stream,
                          std::uint64_t index = 0);

/// Random spanning tree plus uniformly chosen extra links.
SubstrateNetwork generate_substrate(const ScenarioConfig& cfg, Rng& rng);

/// Topology and demands come from `rng`, arrival gaps and lifetimes from
/// `arrival_rng`. Ids are 0..vnr_count-1 in arrival order.
std::vector<VirtualNetworkRequest> generate_vnrs(const ScenarioConfig& cfg,
                                                 Rng& rng, Rng& arrival_rng);

struct Scenario {
  ScenarioConfig config;
  SubstrateNetwork substrate;
  std::vector<VirtualNetworkRequest> requests;

  std::span<const VirtualNetworkRequest> training_set() const;
  std::span<const VirtualNetworkRequest> test_set() const;
  /// Arrival time of the last training request; the test stream's clock
  /// starts there.
  double test_origin() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Substrate and request stream from the sub-seeds of cfg.seed.
Scenario generate_scenario(const ScenarioConfig& cfg);

enum class EventKind { departure = 0, arrival = 1 };

struct EventRecord {
  double time = 0.0;
  EventKind kind = EventKind::arrival;
  RequestId id = 0;
  /// For arrivals: whether the request was embedded.
  bool accepted = false;
};

/// Allocates on `net` and returns the embedding, or nullopt to reject.
using ArrivalHandler = std::function<std::optional<Embedding>(
    const VirtualNetworkRequest&, SubstrateNetwork&)>;

struct ReplayOptions {
  double window = 100.0;
  /// Rescans conservation and every active embedding after each event.
  bool check_invariants = false;
  std::function<void(const EventRecord&)> on_event;
};

class InvariantBroken : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Plays arrivals and departures in (time, departure-first, id) order with
/// clock zero at `origin`. Windows are snapshotted every opts.window units up
/// to the window containing the last arrival; departures after it still run
/// so that the network drains.
MetricsLedger replay(std::span<const VirtualNetworkRequest> requests,
                     SubstrateNetwork& net, double origin,
                     const ArrivalHandler& on_arrival,
                     const ReplayOptions& opts);

struct EpochRecord {
  std::int64_t epoch = 0;
  std::optional<double> avg_revenue;
  std::optional<double> rc_ratio;
  std::optional<double> acceptance;
  std::optional<double> mean_loss;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

/// Runs epochs [first_epoch, first_epoch + epochs) over the training stream,
/// each on a fresh copy of the substrate. Sampling in epoch e uses its own
/// sub-seed, so a run resumed at epoch e matches an uninterrupted one.
std::vector<EpochRecord> run_training(const Scenario& scenario,
                                      PolicyNetwork& policy,
                                      std::int64_t first_epoch,
                                      std::int64_t epochs,
                                      bool check_invariants = false);

struct TestResult {
  MetricsLedger ledger;
  /// Substrate state after the last departure.
  SubstrateNetwork final_substrate;
};

/// One deterministic pass over the test stream.
TestResult run_test(const Scenario& scenario, const EmbeddingEngine& engine,
                    bool check_invariants = false);

/// epoch,avg_revenue,rc_ratio,acceptance,mean_loss
void write_epoch_csv(std::ostream& out, const std::vector<EpochRecord>& rows);

}  // namespace vne

#endif  // VNE_SIM_HPP
