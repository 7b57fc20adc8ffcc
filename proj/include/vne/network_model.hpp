#ifndef VNE_NETWORK_MODEL_HPP
#define VNE_NETWORK_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vne {

using NodeId = std::size_t;
using LinkId = std::size_t;
using RequestId = std::uint64_t;
/// CPU and bandwidth are integral resource units.
using Units = std::int64_t;
/// Delay and security levels, 1 (lowest) to 3 (highest).
using Level = int;

inline constexpr Level kMinLevel = 1;
inline constexpr Level kMaxLevel = 3;

inline bool valid_level(Level l) { return l >= kMinLevel && l <= kMaxLevel; }

class ConstraintViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownRequest : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidNetwork : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SubstrateNode {
  NodeId id = 0;
  Units cpu_initial = 0;
  Units cpu_remaining = 0;
  Level delay_level = kMinLevel;
  Level security_level = kMinLevel;

  friend bool operator==(const SubstrateNode&, const SubstrateNode&) = default;
};

/// Undirected; endpoints are stored with a < b.
struct SubstrateLink {
  NodeId a = 0;
  NodeId b = 0;
  Units bw_initial = 0;
  Units bw_remaining = 0;
  Level delay_level = kMinLevel;

  NodeId other(NodeId n) const { return n == a ? b : a; }
  friend bool operator==(const SubstrateLink&, const SubstrateLink&) = default;
};

struct VirtualNode {
  NodeId id = 0;
  Units cpu_demand = 0;
  Level delay_requirement = kMaxLevel;
  Level security_requirement = kMinLevel;

  friend bool operator==(const VirtualNode&, const VirtualNode&) = default;
};

struct VirtualLink {
  NodeId a = 0;
  NodeId b = 0;
  Units bw_demand = 0;
  Level delay_requirement = kMaxLevel;

  friend bool operator==(const VirtualLink&, const VirtualLink&) = default;
};

/// Virtual node ids are dense: nodes[i].id == i.
struct VirtualNetworkRequest {
  RequestId id = 0;
  std::vector<VirtualNode> nodes;
  std::vector<VirtualLink> links;
  double arrival_time = 0.0;
  double lifetime = 1.0;

  friend bool operator==(const VirtualNetworkRequest&,
                         const VirtualNetworkRequest&) = default;
};

/// Throws InvalidNetwork on duplicate/self links, out-of-range levels,
/// non-positive demands, a disconnected virtual graph, or lifetime <= 0.
void validate(const VirtualNetworkRequest& vnr);

bool is_connected(std::size_t node_count,
                  std::span<const std::pair<NodeId, NodeId>> edges);

using Path = std::vector<LinkId>;

struct Embedding {
  /// Indexed by virtual node id.
  std::vector<NodeId> node_assignment;
  /// Indexed by virtual link position in the request.
  std::vector<Path> link_assignment;

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// CPU capacity, delay ceiling and security floor for one node pair.
bool node_embeddable(const VirtualNode& vn, const SubstrateNode& sn);

/// Bandwidth and delay ceiling, enforced on every hop of the path.
bool link_embeddable(const VirtualLink& vl,
                     std::span<const SubstrateLink* const> path);

class SubstrateNetwork {
 public:
  struct Allocation {
    std::vector<std::pair<NodeId, Units>> cpu;
    std::vector<std::pair<LinkId, Units>> bw;
    Embedding embedding;

    friend bool operator==(const Allocation&, const Allocation&) = default;
  };

  SubstrateNetwork() = default;

  /// Takes initial capacities; remaining values are reset to the initial ones.
  SubstrateNetwork(std::vector<SubstrateNode> nodes,
                   std::vector<SubstrateLink> links);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }
  const std::vector<SubstrateNode>& nodes() const { return nodes_; }
  const std::vector<SubstrateLink>& links() const { return links_; }
  const SubstrateNode& node(NodeId id) const { return nodes_.at(id); }
  const SubstrateLink& link(LinkId id) const { return links_.at(id); }

  /// (neighbor, link) pairs sorted by neighbor id.
  const std::vector<std::pair<NodeId, LinkId>>& neighbors(NodeId id) const {
    return adjacency_.at(id);
  }

  /// Link joining the two nodes, if any.
  std::optional<LinkId> find_link(NodeId u, NodeId v) const;

  bool connected() const;

  /// Initial CPU minus the demands of every active allocation, recomputed
  /// from the ledger rather than read from the stored residual.
  Units remaining_cpu(NodeId id) const;
  /// Initial bandwidth minus every active traversing demand, from the ledger.
  Units remaining_bw(LinkId id) const;

  /// Commits the whole embedding or nothing. Throws ConstraintViolation.
  void allocate(const VirtualNetworkRequest& vnr, const Embedding& emb);

  /// Throws UnknownRequest when no allocation is held under the id.
  void release(RequestId id);

  bool holds(RequestId id) const { return allocations_.contains(id); }
  const std::map<RequestId, Allocation>& allocations() const {
    return allocations_;
  }

  /// Full rescan: stored residuals equal ledger sums and lie in
  /// [0, initial]. Returns a description of the first violation, or empty.
  std::string conservation_error() const;

  /// Copy with every allocation dropped.
  SubstrateNetwork pristine() const;

  friend bool operator==(const SubstrateNetwork& x,
                         const SubstrateNetwork& y) {
    return x.nodes_ == y.nodes_ && x.links_ == y.links_ &&
           x.allocations_ == y.allocations_;
  }

 private:
  std::vector<SubstrateNode> nodes_;
  std::vector<SubstrateLink> links_;
  std::vector<std::vector<std::pair<NodeId, LinkId>>> adjacency_;
  std::map<RequestId, Allocation> allocations_;
};

/// Independent check of an embedding against the network's current
/// residuals: shape, injectivity, simple contiguous paths, node and link
/// capacity/level constraints, and
/// aggregate bandwidth when several virtual links share a substrate link.
/// Returns a description of the first problem, or empty if feasible.
std::string embedding_error(const VirtualNetworkRequest& vnr,
                            const Embedding& emb,
                            const SubstrateNetwork& net);

/// Re-verifies a held allocation against the state it was admitted to,
/// i.e. with its own reservations added back.
std::string active_embedding_error(const VirtualNetworkRequest& vnr,
                                   const SubstrateNetwork& net);

}  // namespace vne

#endif  // VNE_NETWORK_MODEL_HPP
