#ifndef VNE_EMBEDDERS_HPP
#define VNE_EMBEDDERS_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vne/features.hpp"
#include "vne/network_model.hpp"
#include "vne/policy_net.hpp"

namespace vne {

enum class RejectReason { none, no_feasible_node, no_feasible_path };

std::string_view to_string(RejectReason r);

struct EmbedOutcome {
  std::optional<Embedding> embedding;
  RejectReason reason = RejectReason::none;

  bool accepted() const { return embedding.has_value(); }
};

class UnknownEngine : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Virtual nodes by descending CPU demand, ties by id.
std::vector<NodeId> node_mapping_order(const VirtualNetworkRequest& vnr);

/// Virtual links by descending bandwidth demand, ties by position.
std::vector<std::size_t> link_mapping_order(const VirtualNetworkRequest& vnr);

/// Rows whose substrate node is unused and satisfies the node constraints.
FeasibilityMask feasibility_mask(const VirtualNode& vn,
                                 const SubstrateNetwork& net,
                                 const std::vector<bool>& used);

/// Maps each virtual link onto a minimum-hop path whose every hop has the
/// bandwidth and delay level the link needs. Links are placed in
/// link_mapping_order() and each placement reserves its bandwidth before
/// the next search. nullopt if any link cannot be placed.
std::optional<std::vector<Path>> bfs_link_map(
    const VirtualNetworkRequest& vnr, const std::vector<NodeId>& node_assignment,
    const SubstrateNetwork& net);

/// Cross-entropy totals from one training request.
struct TrainStep {
  EmbedOutcome outcome;
  double loss_sum = 0.0;
  int decisions = 0;
  /// revenue / cost when accepted, otherwise 0.
  double reward = 0.0;
};

/// Sampling node mapper. On success the embedding is allocated on `net` and
/// the policy is updated with reward = revenue / cost; on any rejection the
/// accumulated gradients are cleared and `net` is left untouched.
TrainStep drl_embed_train(const VirtualNetworkRequest& vnr,
                          SubstrateNetwork& net, PolicyNetwork& policy,
                          Rng& rng, double learning_rate,
                          FeatureScaling scaling = FeatureScaling::normalized);

/// Argmax node mapper. Pure: neither the policy nor the network is modified.
EmbedOutcome drl_embed_test(const VirtualNetworkRequest& vnr,
                            const SubstrateNetwork& net,
                            const PolicyNetwork& policy,
                            FeatureScaling scaling = FeatureScaling::normalized);

/// cpu_remaining times remaining adjacent bandwidth.
Units node_rank(NodeId node, const SubstrateNetwork& net);

/// Highest node_rank feasible node per virtual node.
EmbedOutcome baseline_embed(const VirtualNetworkRequest& vnr,
                            const SubstrateNetwork& net);

/// Feasible node with the most remaining CPU per virtual node.
EmbedOutcome greedy_embed(const VirtualNetworkRequest& vnr,
                          const SubstrateNetwork& net);

/// Security-first mapper: among nodes meeting the security requirement,
/// prefer the smallest security surplus, then the highest node_rank.
EmbedOutcome secure_embed(const VirtualNetworkRequest& vnr,
                          const SubstrateNetwork& net);

/// Planning interface used by the test loop. embed() never mutates.
class EmbeddingEngine {
 public:
  virtual ~EmbeddingEngine() = default;
  virtual std::string_view name() const = 0;
  virtual EmbedOutcome embed(const VirtualNetworkRequest& vnr,
                             const SubstrateNetwork& net) const = 0;
};

inline constexpr std::string_view kEngineNames[] = {"qs-drl", "baseline",
                                                    "bl-vne", "cnl-vne"};

bool engine_needs_policy(std::string_view name);

/// Throws UnknownEngine (message lists valid names), or std::invalid_argument
/// when qs-drl is requested without a policy.
std::unique_ptr<EmbeddingEngine> make_engine(
    std::string_view name, const PolicyNetwork* policy = nullptr,
    FeatureScaling scaling = FeatureScaling::normalized);

}  // namespace vne

#endif  // VNE_EMBEDDERS_HPP
