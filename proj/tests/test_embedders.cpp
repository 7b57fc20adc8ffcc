#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "vne/embedders.hpp"
#include "vne/metrics.hpp"

using namespace vne;
using namespace vne::testing;

namespace {

std::size_t min_feasible_hops(const SubstrateNetwork& net, const VirtualLink& vl,
                              NodeId from, NodeId to,
                              const std::vector<Units>& residual) {
  std::size_t best = SIZE_MAX;
  for (const auto& p : all_simple_paths(net, from, to)) {
    bool ok = true;
    for (LinkId l : p)
      ok = ok && residual[l] >= vl.bw_demand &&
           net.link(l).delay_level <= vl.delay_requirement;
    if (ok) best = std::min(best, p.size());
  }
  return best;
}

/// Brute-force replica of the ranked node-mapping rule: for each virtual
/// node in mapping order, scan all substrate nodes and keep the best key.
template <class Key>
std::optional<std::vector<NodeId>> oracle_ranked_hosts(const VirtualNetworkRequest& vnr,
                                                       const SubstrateNetwork& net,
                                                       Key key) {
  std::vector<NodeId> order(vnr.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return vnr.nodes[a].cpu_demand > vnr.nodes[b].cpu_demand;
  });
  std::vector<NodeId> hosts(vnr.nodes.size());
  std::set<NodeId> used;
  for (NodeId v : order) {
    std::optional<std::pair<decltype(key(vnr.nodes[v], 0)), NodeId>> best;
    for (NodeId s = 0; s < net.node_count(); ++s) {
      const auto& sn = net.nodes()[s];
      const auto& vn = vnr.nodes[v];
      if (used.count(s) || vn.cpu_demand > sn.cpu_remaining ||
          vn.delay_requirement < sn.delay_level ||
          vn.security_requirement > sn.security_level)
        continue;
      // Larger key wins; lower id wins ties because ids ascend.
      auto k = key(vn, s);
      if (!best || k > best->first) best = std::pair{k, s};
    }
    if (!best) return std::nullopt;
    hosts[v] = best->second;
    used.insert(best->second);
  }
  return hosts;
}

Units oracle_rank(const SubstrateNetwork& net, NodeId s) {
  Units bw = 0;
  for (const auto& l : net.links())
    if (l.a == s || l.b == s) bw += l.bw_remaining;
  return net.nodes()[s].cpu_remaining * bw;
}

}  // namespace

TEST_CASE("bfs maps adjacent hosts onto their direct link") {
  SubstrateNetwork net({snode(0, 100), snode(1, 100)}, {slink(0, 1, 100)});
  auto vnr = worked_example_request();
  auto paths = bfs_link_map(vnr, {0, 1}, net);
  REQUIRE(paths);
  CHECK((*paths)[0] == Path{0});
  CHECK(cost(vnr, Embedding{{0, 1}, *paths}) == 25);
}

TEST_CASE("bfs detours around a thin direct link") {
  SubstrateNetwork net({snode(0, 100), snode(1, 100), snode(2, 100)},
                       {slink(0, 1, 6), slink(0, 2, 50), slink(1, 2, 50)});
  auto vnr = worked_example_request();
  auto paths = bfs_link_map(vnr, {0, 1}, net);
  REQUIRE(paths);
  CHECK((*paths)[0] == Path{1, 2});
  CHECK(cost(vnr, Embedding{{0, 1}, *paths}) == 32);
}

TEST_CASE("bfs rejects when no path satisfies delay") {
  SubstrateNetwork net({snode(0, 100), snode(1, 100)}, {slink(0, 1, 100, 3)});
  auto vnr = worked_example_request();
  vnr.links[0].delay_requirement = 2;
  CHECK_FALSE(bfs_link_map(vnr, {0, 1}, net));
}

TEST_CASE("bfs reserves bandwidth for links mapped earlier") {
  // Both virtual links want substrate link 0; only one fits.
  SubstrateNetwork net({snode(0, 100), snode(1, 100), snode(2, 100), snode(3, 100)},
                       {slink(0, 1, 30), slink(1, 2, 100), slink(0, 3, 100),
                        slink(3, 1, 100)});
  VirtualNetworkRequest r;
  r.id = 3;
  r.nodes = {{0, 1, 3, 1}, {1, 1, 3, 1}, {2, 1, 3, 1}};
  r.links = {{0, 1, 10, 3}, {0, 2, 20, 3}};
  auto paths = bfs_link_map(r, {0, 1, 2}, net);
  REQUIRE(paths);
  // The larger link (20) goes first and takes 0-1; the 10 then still fits.
  CHECK((*paths)[1] == Path{0, 1});
  CHECK((*paths)[0] == Path{0});
  r.links[0].bw_demand = 15;
  paths = bfs_link_map(r, {0, 1, 2}, net);
  REQUIRE(paths);
  CHECK((*paths)[0] == Path{2, 3});
}

TEST_CASE("bfs hop counts equal brute-force minima on random 5-node graphs") {
  std::mt19937_64 rng(555);
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    auto net = random_small_substrate(rng, 5, 0.4, 50, 100, 5, 40);
    auto vnr = random_small_request(rng, t, 3, 10, 25);
    std::vector<NodeId> hosts{0, 1, 2};
    std::shuffle(hosts.begin(), hosts.end(), rng);
    auto paths = bfs_link_map(vnr, hosts, net);
    if (!paths) continue;
    std::vector<Units> residual;
    for (const auto& l : net.links()) residual.push_back(l.bw_remaining);
    for (std::size_t li : link_mapping_order(vnr)) {
      const auto& vl = vnr.links[li];
      CHECK((*paths)[li].size() ==
            min_feasible_hops(net, vl, hosts[vl.a], hosts[vl.b], residual));
      for (LinkId l : (*paths)[li]) residual[l] -= vl.bw_demand;
      ++checked;
    }
  }
  CHECK(checked > 150);
}

TEST_CASE("baseline rank arithmetic and ordering") {
  // Node 0: CPU 100, adjacent BW 200. Node 1: CPU 90, adjacent BW 150.
  SubstrateNetwork net({snode(0, 100), snode(1, 90), snode(2, 100), snode(3, 100),
                        snode(4, 100)},
                       {slink(0, 2, 100), slink(0, 3, 100), slink(1, 2, 75),
                        slink(1, 3, 75)});
  CHECK(node_rank(0, net) == 20000);
  CHECK(node_rank(1, net) == 13500);
  CHECK(node_rank(4, net) == 0);

  VirtualNetworkRequest r;
  r.id = 1;
  r.nodes = {{0, 5, 3, 1}};
  auto out = baseline_embed(r, net);
  REQUIRE(out.accepted());
  CHECK(out.embedding->node_assignment[0] == 0);
}

TEST_CASE("greedy picks the most remaining CPU among feasible nodes") {
  SubstrateNetwork net({snode(0, 82), snode(1, 95, 1, 1), snode(2, 60)},
                       {slink(0, 1, 100), slink(1, 2, 100)});
  VirtualNetworkRequest r;
  r.id = 1;
  r.nodes = {{0, 5, 3, 1}};
  CHECK(greedy_embed(r, net).embedding->node_assignment[0] == 1);
  r.nodes[0].security_requirement = 2;
  CHECK(greedy_embed(r, net).embedding->node_assignment[0] == 0);
}

TEST_CASE("secure mapper") {
  SubstrateNetwork net({snode(0, 100, 1, 1), snode(1, 100, 1, 2), snode(2, 50, 1, 3)},
                       {slink(0, 1, 100), slink(1, 2, 100)});
  VirtualNetworkRequest r;
  r.id = 1;
  r.nodes = {{0, 5, 3, 3}};
  SUBCASE("one candidate") {
    CHECK(secure_embed(r, net).embedding->node_assignment[0] == 2);
  }
  SUBCASE("no candidate") {
    SubstrateNetwork weak({snode(0, 100, 1, 2), snode(1, 100, 1, 1)}, {slink(0, 1, 100)});
    auto out = secure_embed(r, weak);
    CHECK_FALSE(out.accepted());
    CHECK(out.reason == RejectReason::no_feasible_node);
  }
  SUBCASE("smallest security surplus first") {
    r.nodes[0].security_requirement = 2;
    // Node 1 meets the requirement exactly; node 2 has a surplus of 1.
    CHECK(secure_embed(r, net).embedding->node_assignment[0] == 1);
    CHECK(baseline_embed(r, net).embedding->node_assignment[0] == 1);
    r.nodes[0].security_requirement = 1;
    CHECK(secure_embed(r, net).embedding->node_assignment[0] == 0);
    CHECK(baseline_embed(r, net).embedding->node_assignment[0] == 1);
  }
}

TEST_CASE("ranked engines match brute-force replicas of their rules") {
  std::mt19937_64 rng(31337);
  for (int t = 0; t < 200; ++t) {
    auto net = random_small_substrate(rng, 5, 0.5, 20, 60, 20, 60);
    auto vnr = random_small_request(rng, t, 1 + t % 3, 40, 30);
    auto check = [&](const EmbedOutcome& out, const auto& hosts) {
      if (!hosts) {
        CHECK_FALSE(out.accepted());
        CHECK(out.reason == RejectReason::no_feasible_node);
        return;
      }
      auto paths = bfs_link_map(vnr, *hosts, net);
      CHECK(out.accepted() == paths.has_value());
      if (out.accepted()) CHECK(out.embedding->node_assignment == *hosts);
    };
    check(baseline_embed(vnr, net),
          oracle_ranked_hosts(vnr, net, [&](const VirtualNode&, NodeId s) {
            return oracle_rank(net, s);
          }));
    check(greedy_embed(vnr, net),
          oracle_ranked_hosts(vnr, net, [&](const VirtualNode&, NodeId s) {
            return net.nodes()[s].cpu_remaining;
          }));
    check(secure_embed(vnr, net),
          oracle_ranked_hosts(vnr, net, [&](const VirtualNode& vn, NodeId s) {
            return std::pair{vn.security_requirement - net.nodes()[s].security_level,
                             oracle_rank(net, s)};
          }));
  }
}

TEST_CASE("drl training with a single feasible host per virtual node") {
  // Virtual node 0 fits only node 2, virtual node 1 only node 0.
  SubstrateNetwork net({snode(0, 100, 1, 1), snode(1, 100, 3, 1), snode(2, 100, 1, 3)},
                       {slink(0, 1, 100), slink(1, 2, 100), slink(0, 2, 100)});
  VirtualNetworkRequest r;
  r.id = 1;
  r.nodes = {{0, 20, 1, 3}, {1, 10, 1, 1}};
  r.links = {{0, 1, 5, 3}};
  // Node 2 is taken first (larger demand), leaving node 0 as the only
  // delay-1 host for virtual node 1.
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 99ull}) {
    auto live = net;
    auto policy = PolicyNetwork::random(seed);
    Rng rng(seed);
    auto step = drl_embed_train(r, live, policy, rng, 0.005);
    REQUIRE(step.outcome.accepted());
    CHECK(step.outcome.embedding->node_assignment == std::vector<NodeId>{2, 0});
    CHECK(step.loss_sum == doctest::Approx(0.0));
    CHECK(step.decisions == 2);
    CHECK(step.reward == 1.0);
    CHECK(live.holds(1));
  }
}

TEST_CASE("drl training rejection clears gradients and leaves state") {
  SubstrateNetwork net({snode(0, 100, 1, 1), snode(1, 100, 1, 2), snode(2, 100, 1, 2)},
                       {slink(0, 1, 100), slink(1, 2, 100)});
  VirtualNetworkRequest r;
  r.id = 1;
  r.nodes = {{0, 10, 3, 1}, {1, 10, 3, 3}};
  r.links = {{0, 1, 5, 3}};
  auto live = net;
  auto policy = PolicyNetwork::random(7);
  const auto params = policy;
  Rng rng(7);
  auto step = drl_embed_train(r, live, policy, rng, 0.005);
  CHECK_FALSE(step.outcome.accepted());
  CHECK(step.outcome.reason == RejectReason::no_feasible_node);
  CHECK(live == net);
  CHECK(policy == params);
  CHECK(policy.batch_count() == 0);
}

TEST_CASE("drl training: accepted requests move the policy, path failures do not") {
  std::mt19937_64 gen(12);
  auto net = random_small_substrate(gen, 6, 0.6, 80, 100, 60, 100);
  VirtualNetworkRequest r;
  r.id = 4;
  r.nodes = {{0, 5, 3, 1}, {1, 5, 3, 1}};
  r.links = {{0, 1, 5, 3}};
  auto policy = PolicyNetwork::random(1);
  const auto before = policy;
  auto live = net;
  Rng rng(3);
  auto step = drl_embed_train(r, live, policy, rng, 0.005);
  REQUIRE(step.outcome.accepted());
  CHECK(step.loss_sum > 0.0);
  CHECK_FALSE(policy.kernel() == before.kernel());
  CHECK(policy.batch_count() == 0);

  // Bandwidth no substrate link can carry: nodes map, links fail.
  r.id = 5;
  r.links[0].bw_demand = 1000;
  const auto mid = policy;
  auto snapshot = live;
  step = drl_embed_train(r, live, policy, rng, 0.005);
  CHECK_FALSE(step.outcome.accepted());
  CHECK(step.outcome.reason == RejectReason::no_feasible_path);
  CHECK(policy == mid);
  CHECK(live == snapshot);
}

TEST_CASE("drl test mode is deterministic and uses the tie-break") {
  std::mt19937_64 gen(21);
  auto net = random_small_substrate(gen, 8, 0.5, 50, 100, 50, 100);
  auto vnr = random_small_request(gen, 1, 3, 20, 20);
  const auto policy = PolicyNetwork::random(5);
  auto a = drl_embed_test(vnr, net, policy);
  auto b = drl_embed_test(vnr, net, policy);
  CHECK(a.accepted() == b.accepted());
  if (a.accepted()) CHECK(*a.embedding == *b.embedding);

  PolicyNetwork zero;
  auto out = drl_embed_test(vnr, net, zero);
  auto expect = oracle_ranked_hosts(vnr, net, [](const VirtualNode&, NodeId) { return 0; });
  if (expect && out.accepted()) CHECK(out.embedding->node_assignment == *expect);
  if (!expect) CHECK_FALSE(out.accepted());
}

TEST_CASE("every engine returns feasible embeddings on random instances") {
  std::mt19937_64 gen(404);
  const auto policy = PolicyNetwork::random(17);
  for (int t = 0; t < 150; ++t) {
    auto net = random_small_substrate(gen, 6, 0.4, 20, 80, 10, 60);
    auto vnr = random_small_request(gen, t, 1 + t % 3, 40, 40);
    for (auto name : kEngineNames) {
      auto engine = make_engine(name, &policy);
      auto out = engine->embed(vnr, net);
      if (out.accepted()) {
        CHECK(oracle_feasible(vnr, *out.embedding, net));
        CHECK(embedding_error(vnr, *out.embedding, net).empty());
      }
    }
  }
}

TEST_CASE("engine registry") {
  CHECK(make_engine("baseline")->name() == "baseline");
  CHECK(make_engine("bl-vne")->name() == "bl-vne");
  CHECK(make_engine("cnl-vne")->name() == "cnl-vne");
  PolicyNetwork p;
  CHECK(make_engine("qs-drl", &p)->name() == "qs-drl");
  CHECK_THROWS_AS(make_engine("qs-drl"), std::invalid_argument);
  try {
    make_engine("vineyard");
    FAIL("expected UnknownEngine");
  } catch (const UnknownEngine& e) {
    std::string msg = e.what();
    for (auto n : kEngineNames) CHECK(msg.find(n) != std::string::npos);
  }
}
