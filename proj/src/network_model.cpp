#include "vne/network_model.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace vne {

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

bool is_connected(std::size_t node_count,
                  std::span<const std::pair<NodeId, NodeId>> edges) {
  if (node_count == 0) return true;
  std::vector<std::size_t> parent(node_count);
  std::iota(parent.begin(), parent.end(), 0);
  std::size_t components = node_count;
  for (auto [u, v] : edges) {
    auto ru = find_root(parent, u);
    auto rv = find_root(parent, v);
    if (ru != rv) {
      parent[ru] = rv;
      --components;
    }
  }
  return components == 1;
}

void validate(const VirtualNetworkRequest& vnr) {
  auto fail = [&](const std::string& what) {
    throw InvalidNetwork("request " + std::to_string(vnr.id) + ": " + what);
  };
  if (!(vnr.lifetime > 0.0)) fail("lifetime must be positive");
  for (std::size_t i = 0; i < vnr.nodes.size(); ++i) {
    const auto& n = vnr.nodes[i];
    if (n.id != i) fail("virtual node ids must be 0..n-1 in order");
    if (n.cpu_demand <= 0) fail("cpu demand must be positive");
    if (!valid_level(n.delay_requirement) || !valid_level(n.security_requirement))
      fail("node level out of range");
  }
  std::set<std::pair<NodeId, NodeId>> seen;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const auto& l : vnr.links) {
    if (l.a >= vnr.nodes.size() || l.b >= vnr.nodes.size())
      fail("link endpoint out of range");
    if (l.a == l.b) fail("self link");
    if (!seen.insert(std::minmax(l.a, l.b)).second) fail("parallel link");
    if (l.bw_demand <= 0) fail("bandwidth demand must be positive");
    if (!valid_level(l.delay_requirement)) fail("link level out of range");
    edges.emplace_back(l.a, l.b);
  }
  if (!is_connected(vnr.nodes.size(), edges)) fail("virtual graph is not connected");
}

bool node_embeddable(const VirtualNode& vn, const SubstrateNode& sn) {
  return vn.cpu_demand <= sn.cpu_remaining &&
         vn.delay_requirement >= sn.delay_level &&
         vn.security_requirement <= sn.security_level;
}

bool link_embeddable(const VirtualLink& vl,
                     std::span<const SubstrateLink* const> path) {
  return std::all_of(path.begin(), path.end(), [&](const SubstrateLink* l) {
    return vl.bw_demand <= l->bw_remaining &&
           vl.delay_requirement >= l->delay_level;
  });
}

SubstrateNetwork::SubstrateNetwork(std::vector<SubstrateNode> nodes,
                                   std::vector<SubstrateLink> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
  adjacency_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto& n = nodes_[i];
    if (n.id != i)
      throw InvalidNetwork("substrate node ids must be 0..n-1 in order");
    if (n.cpu_initial < 0) throw InvalidNetwork("negative cpu capacity");
    if (!valid_level(n.delay_level) || !valid_level(n.security_level))
      throw InvalidNetwork("substrate node level out of range");
    n.cpu_remaining = n.cpu_initial;
  }
  std::set<std::pair<NodeId, NodeId>> seen;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    auto& l = links_[i];
    if (l.a >= nodes_.size() || l.b >= nodes_.size())
      throw InvalidNetwork("link endpoint out of range");
    if (l.a == l.b) throw InvalidNetwork("self link");
    if (l.a > l.b) std::swap(l.a, l.b);
    if (!seen.insert({l.a, l.b}).second)
      throw InvalidNetwork("parallel substrate link");
    if (l.bw_initial < 0) throw InvalidNetwork("negative bandwidth capacity");
    if (!valid_level(l.delay_level))
      throw InvalidNetwork("substrate link level out of range");
    l.bw_remaining = l.bw_initial;
    adjacency_[l.a].emplace_back(l.b, i);
    adjacency_[l.b].emplace_back(l.a, i);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

std::optional<LinkId> SubstrateNetwork::find_link(NodeId u, NodeId v) const {
  if (u >= adjacency_.size()) return std::nullopt;
  const auto& adj = adjacency_[u];
  auto it = std::lower_bound(adj.begin(), adj.end(),
                             std::pair<NodeId, LinkId>{v, 0});
  if (it != adj.end() && it->first == v) return it->second;
  return std::nullopt;
}

bool SubstrateNetwork::connected() const {
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(links_.size());
  for (const auto& l : links_) edges.emplace_back(l.a, l.b);
  return is_connected(nodes_.size(), edges);
}

Units SubstrateNetwork::remaining_cpu(NodeId id) const {
  Units used = 0;
  for (const auto& [rid, alloc] : allocations_)
    for (auto [n, demand] : alloc.cpu)
      if (n == id) used += demand;
  return nodes_.at(id).cpu_initial - used;
}

Units SubstrateNetwork::remaining_bw(LinkId id) const {
  Units used = 0;
  for (const auto& [rid, alloc] : allocations_)
    for (auto [l, demand] : alloc.bw)
      if (l == id) used += demand;
  return links_.at(id).bw_initial - used;
}

std::string embedding_error(const VirtualNetworkRequest& vnr,
                            const Embedding& emb,
                            const SubstrateNetwork& net) {
  std::ostringstream err;
  if (emb.node_assignment.size() != vnr.nodes.size())
    return "node assignment does not cover the request";
  if (emb.link_assignment.size() != vnr.links.size())
    return "link assignment does not cover the request";

  std::set<NodeId> used;
  for (std::size_t i = 0; i < vnr.nodes.size(); ++i) {
    NodeId host = emb.node_assignment[i];
    if (host >= net.node_count()) return "host out of range";
    if (!used.insert(host).second) {
      err << "substrate node " << host << " hosts two virtual nodes";
      return err.str();
    }
    if (!node_embeddable(vnr.nodes[i], net.node(host))) {
      err << "virtual node " << i << " violates constraints on substrate node "
          << host;
      return err.str();
    }
  }

  std::map<LinkId, Units> demand_per_link;
  for (std::size_t i = 0; i < vnr.links.size(); ++i) {
    const auto& vl = vnr.links[i];
    const auto& path = emb.link_assignment[i];
    NodeId at = emb.node_assignment[vl.a];
    NodeId target = emb.node_assignment[vl.b];
    std::set<NodeId> visited{at};
    std::vector<const SubstrateLink*> hops;
    for (LinkId lid : path) {
      if (lid >= net.link_count()) return "path link out of range";
      const auto& sl = net.link(lid);
      if (sl.a != at && sl.b != at) {
        err << "path of virtual link " << i << " is not contiguous";
        return err.str();
      }
      at = sl.other(at);
      if (!visited.insert(at).second) {
        err << "path of virtual link " << i << " is not simple";
        return err.str();
      }
      hops.push_back(&sl);
      demand_per_link[lid] += vl.bw_demand;
    }
    if (at != target) {
      err << "path of virtual link " << i << " does not reach its endpoint";
      return err.str();
    }
    if (!link_embeddable(vl, hops)) {
      err << "virtual link " << i << " violates constraints on its path";
      return err.str();
    }
  }
  for (auto [lid, total] : demand_per_link) {
    if (total > net.link(lid).bw_remaining) {
      err << "substrate link " << lid << " oversubscribed";
      return err.str();
    }
  }
  return {};
}

void SubstrateNetwork::allocate(const VirtualNetworkRequest& vnr,
                                const Embedding& emb) {
  if (allocations_.contains(vnr.id))
    throw ConstraintViolation("request " + std::to_string(vnr.id) +
                              " is already allocated");
  if (auto e = embedding_error(vnr, emb, *this); !e.empty())
    throw ConstraintViolation("request " + std::to_string(vnr.id) + ": " + e);

  Allocation alloc;
  alloc.embedding = emb;
  for (std::size_t i = 0; i < vnr.nodes.size(); ++i) {
    NodeId host = emb.node_assignment[i];
    nodes_[host].cpu_remaining -= vnr.nodes[i].cpu_demand;
    alloc.cpu.emplace_back(host, vnr.nodes[i].cpu_demand);
  }
  for (std::size_t i = 0; i < vnr.links.size(); ++i) {
    for (LinkId lid : emb.link_assignment[i]) {
      links_[lid].bw_remaining -= vnr.links[i].bw_demand;
      alloc.bw.emplace_back(lid, vnr.links[i].bw_demand);
    }
  }
  allocations_.emplace(vnr.id, std::move(alloc));
}

void SubstrateNetwork::release(RequestId id) {
  auto it = allocations_.find(id);
  if (it == allocations_.end())
    throw UnknownRequest("no active allocation for request " +
                         std::to_string(id));
  for (auto [n, demand] : it->second.cpu) nodes_[n].cpu_remaining += demand;
  for (auto [l, demand] : it->second.bw) links_[l].bw_remaining += demand;
  allocations_.erase(it);
}

std::string SubstrateNetwork::conservation_error() const {
  std::vector<Units> cpu_used(nodes_.size(), 0);
  std::vector<Units> bw_used(links_.size(), 0);
  for (const auto& [rid, alloc] : allocations_) {
    for (auto [n, d] : alloc.cpu) cpu_used[n] += d;
    for (auto [l, d] : alloc.bw) bw_used[l] += d;
  }
  std::ostringstream err;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.cpu_remaining < 0 || n.cpu_remaining > n.cpu_initial ||
        n.cpu_initial - n.cpu_remaining != cpu_used[i]) {
      err << "cpu ledger mismatch on substrate node " << i;
      return err.str();
    }
  }
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const auto& l = links_[i];
    if (l.bw_remaining < 0 || l.bw_remaining > l.bw_initial ||
        l.bw_initial - l.bw_remaining != bw_used[i]) {
      err << "bandwidth ledger mismatch on substrate link " << i;
      return err.str();
    }
  }
  return {};
}

SubstrateNetwork SubstrateNetwork::pristine() const {
  return SubstrateNetwork(nodes_, links_);
}

std::string active_embedding_error(const VirtualNetworkRequest& vnr,
                                   const SubstrateNetwork& net) {
  auto it = net.allocations().find(vnr.id);
  if (it == net.allocations().end()) return "request is not active";
  SubstrateNetwork before = net;
  before.release(vnr.id);
  return embedding_error(vnr, it->second.embedding, before);
}

}  // namespace vne
