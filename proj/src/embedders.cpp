#include "vne/embedders.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>

#include "vne/metrics.hpp"

namespace vne {

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::none: return "none";
    case RejectReason::no_feasible_node: return "no_feasible_node";
    case RejectReason::no_feasible_path: return "no_feasible_path";
  }
  return "unknown";
}

std::vector<NodeId> node_mapping_order(const VirtualNetworkRequest& vnr) {
  std::vector<NodeId> order(vnr.nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](NodeId x, NodeId y) {
    return vnr.nodes[x].cpu_demand > vnr.nodes[y].cpu_demand;
  });
  return order;
}

std::vector<std::size_t> link_mapping_order(const VirtualNetworkRequest& vnr) {
  std::vector<std::size_t> order(vnr.links.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return vnr.links[x].bw_demand > vnr.links[y].bw_demand;
  });
  return order;
}

FeasibilityMask feasibility_mask(const VirtualNode& vn,
                                 const SubstrateNetwork& net,
                                 const std::vector<bool>& used) {
  FeasibilityMask mask(net.node_count(), false);
  for (NodeId i = 0; i < net.node_count(); ++i)
    mask[i] = !used[i] && node_embeddable(vn, net.node(i));
  return mask;
}

std::optional<std::vector<Path>> bfs_link_map(
    const VirtualNetworkRequest& vnr, const std::vector<NodeId>& node_assignment,
    const SubstrateNetwork& net) {
  std::vector<Units> residual(net.link_count());
  for (LinkId l = 0; l < net.link_count(); ++l)
    residual[l] = net.link(l).bw_remaining;

  constexpr LinkId kNone = static_cast<LinkId>(-1);
  std::vector<Path> paths(vnr.links.size());
  std::vector<LinkId> via(net.node_count());
  std::vector<bool> seen(net.node_count());

  for (std::size_t li : link_mapping_order(vnr)) {
    const auto& vl = vnr.links[li];
    const NodeId src = node_assignment.at(vl.a);
    const NodeId dst = node_assignment.at(vl.b);
    if (src == dst) continue;

    std::fill(via.begin(), via.end(), kNone);
    std::fill(seen.begin(), seen.end(), false);
    std::deque<NodeId> frontier{src};
    seen[src] = true;
    while (!frontier.empty() && !seen[dst]) {
      NodeId u = frontier.front();
      frontier.pop_front();
      for (auto [v, lid] : net.neighbors(u)) {
        if (seen[v]) continue;
        const auto& sl = net.link(lid);
        if (residual[lid] < vl.bw_demand || sl.delay_level > vl.delay_requirement)
          continue;
        seen[v] = true;
        via[v] = lid;
        frontier.push_back(v);
      }
    }
    if (!seen[dst]) return std::nullopt;

    Path& path = paths[li];
    for (NodeId at = dst; at != src;) {
      LinkId lid = via[at];
      path.push_back(lid);
      residual[lid] -= vl.bw_demand;
      at = net.link(lid).other(at);
    }
    std::reverse(path.begin(), path.end());
  }
  return paths;
}

namespace {

EmbedOutcome finish_with_links(const VirtualNetworkRequest& vnr,
                               std::vector<NodeId> hosts,
                               const SubstrateNetwork& net) {
  auto paths = bfs_link_map(vnr, hosts, net);
  if (!paths) return {std::nullopt, RejectReason::no_feasible_path};
  return {Embedding{std::move(hosts), std::move(*paths)}, RejectReason::none};
}

/// Node mapping by a fixed preference: `better(x, y)` is true when substrate
/// node x should be chosen over y. Ties fall to the lower id.
EmbedOutcome ranked_embed(
    const VirtualNetworkRequest& vnr, const SubstrateNetwork& net,
    const std::function<bool(const VirtualNode&, NodeId, NodeId)>& better) {
  std::vector<bool> used(net.node_count(), false);
  std::vector<NodeId> hosts(vnr.nodes.size());
  for (NodeId v : node_mapping_order(vnr)) {
    const auto& vn = vnr.nodes[v];
    std::optional<NodeId> best;
    for (NodeId s = 0; s < net.node_count(); ++s) {
      if (used[s] || !node_embeddable(vn, net.node(s))) continue;
      if (!best || better(vn, s, *best)) best = s;
    }
    if (!best) return {std::nullopt, RejectReason::no_feasible_node};
    hosts[v] = *best;
    used[*best] = true;
  }
  return finish_with_links(vnr, std::move(hosts), net);
}

}  // namespace

Units node_rank(NodeId node, const SubstrateNetwork& net) {
  return net.node(node).cpu_remaining * sum_adjacent_bw(node, net);
}

EmbedOutcome baseline_embed(const VirtualNetworkRequest& vnr,
                            const SubstrateNetwork& net) {
  std::vector<Units> rank(net.node_count());
  for (NodeId s = 0; s < net.node_count(); ++s) rank[s] = node_rank(s, net);
  return ranked_embed(vnr, net, [&](const VirtualNode&, NodeId x, NodeId y) {
    return rank[x] > rank[y];
  });
}

EmbedOutcome greedy_embed(const VirtualNetworkRequest& vnr,
                          const SubstrateNetwork& net) {
  return ranked_embed(vnr, net, [&](const VirtualNode&, NodeId x, NodeId y) {
    return net.node(x).cpu_remaining > net.node(y).cpu_remaining;
  });
}

EmbedOutcome secure_embed(const VirtualNetworkRequest& vnr,
                          const SubstrateNetwork& net) {
  std::vector<Units> rank(net.node_count());
  for (NodeId s = 0; s < net.node_count(); ++s) rank[s] = node_rank(s, net);
  return ranked_embed(vnr, net, [&](const VirtualNode& vn, NodeId x, NodeId y) {
    Level surplus_x = net.node(x).security_level - vn.security_requirement;
    Level surplus_y = net.node(y).security_level - vn.security_requirement;
    if (surplus_x != surplus_y) return surplus_x < surplus_y;
    return rank[x] > rank[y];
  });
}

namespace {

// The substrate is not modified while nodes are chosen (each host takes at
// most one virtual node), so one feature matrix serves the whole request.
template <class Choose>
std::pair<std::optional<std::vector<NodeId>>, int> policy_node_map(
    const VirtualNetworkRequest& vnr, const SubstrateNetwork& net,
    const PolicyNetwork& policy, FeatureScaling scaling, Choose&& choose) {
  const FeatureMatrix m = extract_feature_matrix(net, scaling);
  std::vector<bool> used(net.node_count(), false);
  std::vector<NodeId> hosts(vnr.nodes.size());
  int decisions = 0;
  for (NodeId v : node_mapping_order(vnr)) {
    FeasibilityMask mask = feasibility_mask(vnr.nodes[v], net, used);
    if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; }))
      return {std::nullopt, decisions};
    ActionDistribution dist = policy.forward(m, mask);
    std::size_t row = choose(m, dist);
    ++decisions;
    hosts[v] = m.node_index[row];
    used[hosts[v]] = true;
  }
  return {std::move(hosts), decisions};
}

}  // namespace

TrainStep drl_embed_train(const VirtualNetworkRequest& vnr,
                          SubstrateNetwork& net, PolicyNetwork& policy,
                          Rng& rng, double learning_rate,
                          FeatureScaling scaling) {
  TrainStep step;
  const PolicyNetwork& scorer = policy;
  auto [hosts, decisions] = policy_node_map(
      vnr, net, scorer, scaling,
      [&](const FeatureMatrix& m, const ActionDistribution& dist) {
        std::size_t row = sample_action(dist, rng);
        step.loss_sum += policy.accumulate_gradient(m, dist, row);
        return row;
      });
  step.decisions = decisions;

  auto reject = [&](RejectReason why) {
    policy.clear_gradients();
    step.outcome = {std::nullopt, why};
    return step;
  };
  if (!hosts) return reject(RejectReason::no_feasible_node);

  // Whole-request re-check of the node constraints before link mapping.
  for (std::size_t v = 0; v < vnr.nodes.size(); ++v)
    if (!node_embeddable(vnr.nodes[v], net.node((*hosts)[v])))
      return reject(RejectReason::no_feasible_node);

  EmbedOutcome outcome = finish_with_links(vnr, std::move(*hosts), net);
  if (!outcome.accepted()) return reject(outcome.reason);

  net.allocate(vnr, *outcome.embedding);
  step.reward = static_cast<double>(revenue(vnr)) /
                static_cast<double>(cost(vnr, *outcome.embedding));
  if (policy.batch_count() > 0)
    policy.apply_reward_update(step.reward, learning_rate);
  step.outcome = std::move(outcome);
  return step;
}

EmbedOutcome drl_embed_test(const VirtualNetworkRequest& vnr,
                            const SubstrateNetwork& net,
                            const PolicyNetwork& policy,
                            FeatureScaling scaling) {
  auto [hosts, decisions] = policy_node_map(
      vnr, net, policy, scaling,
      [](const FeatureMatrix&, const ActionDistribution& dist) {
        return argmax_action(dist);
      });
  if (!hosts) return {std::nullopt, RejectReason::no_feasible_node};
  return finish_with_links(vnr, std::move(*hosts), net);
}

namespace {

class FunctionEngine : public EmbeddingEngine {
 public:
  using Fn = EmbedOutcome (*)(const VirtualNetworkRequest&,
                              const SubstrateNetwork&);
  FunctionEngine(std::string_view name, Fn fn) : name_(name), fn_(fn) {}
  std::string_view name() const override { return name_; }
  EmbedOutcome embed(const VirtualNetworkRequest& vnr,
                     const SubstrateNetwork& net) const override {
    return fn_(vnr, net);
  }

 private:
  std::string_view name_;
  Fn fn_;
};

class PolicyEngine : public EmbeddingEngine {
 public:
  PolicyEngine(PolicyNetwork policy, FeatureScaling scaling)
      : policy_(std::move(policy)), scaling_(scaling) {}
  std::string_view name() const override { return kEngineNames[0]; }
  EmbedOutcome embed(const VirtualNetworkRequest& vnr,
                     const SubstrateNetwork& net) const override {
    return drl_embed_test(vnr, net, policy_, scaling_);
  }

 private:
  PolicyNetwork policy_;
  FeatureScaling scaling_;
};

std::string valid_engine_list() {
  std::string out;
  for (auto n : kEngineNames) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

}  // namespace

bool engine_needs_policy(std::string_view name) { return name == kEngineNames[0]; }

std::unique_ptr<EmbeddingEngine> make_engine(std::string_view name,
                                             const PolicyNetwork* policy,
                                             FeatureScaling scaling) {
  if (name == kEngineNames[0]) {
    if (!policy)
      throw std::invalid_argument("engine qs-drl requires a trained policy");
    return std::make_unique<PolicyEngine>(*policy, scaling);
  }
  if (name == kEngineNames[1])
    return std::make_unique<FunctionEngine>(kEngineNames[1], &baseline_embed);
  if (name == kEngineNames[2])
    return std::make_unique<FunctionEngine>(kEngineNames[2], &greedy_embed);
  if (name == kEngineNames[3])
    return std::make_unique<FunctionEngine>(kEngineNames[3], &secure_embed);
  throw UnknownEngine("unknown engine '" + std::string(name) +
                      "'; valid engines: " + valid_engine_list());
}

}  // namespace vne
