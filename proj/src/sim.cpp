#include "vne/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <tuple>

namespace vne {

void validate(const ScenarioConfig& cfg) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw InvalidConfig(field + ": " + why);
  };
  if (cfg.substrate_nodes < 1) fail("substrate_nodes", "must be at least 1");
  const std::int64_t n = cfg.substrate_nodes;
  if (cfg.substrate_links < n - 1)
    fail("substrate_links", "fewer than substrate_nodes - 1 cannot connect the graph");
  if (cfg.substrate_links > n * (n - 1) / 2)
    fail("substrate_links", "exceeds n(n-1)/2 for substrate_nodes = " +
                                std::to_string(n));
  if (cfg.substrate_cpu_min < 0 || cfg.substrate_cpu_max < cfg.substrate_cpu_min)
    fail("substrate_cpu_min/substrate_cpu_max", "need 0 <= min <= max");
  if (cfg.substrate_bw_min < 0 || cfg.substrate_bw_max < cfg.substrate_bw_min)
    fail("substrate_bw_min/substrate_bw_max", "need 0 <= min <= max");
  if (cfg.vnr_count < 0) fail("vnr_count", "must be non-negative");
  if (cfg.train_count < 0 || cfg.train_count > cfg.vnr_count)
    fail("train_count", "must lie in [0, vnr_count]");
  if (cfg.vnr_nodes_min < 1 || cfg.vnr_nodes_max < cfg.vnr_nodes_min)
    fail("vnr_nodes_min/vnr_nodes_max", "need 1 <= min <= max");
  if (!(cfg.vnr_link_probability >= 0.0 && cfg.vnr_link_probability <= 1.0))
    fail("vnr_link_probability", "must lie in [0, 1]");
  if (cfg.vnr_cpu_min < 1 || cfg.vnr_cpu_max < cfg.vnr_cpu_min)
    fail("vnr_cpu_min/vnr_cpu_max", "need 1 <= min <= max");
  if (cfg.vnr_bw_min < 1 || cfg.vnr_bw_max < cfg.vnr_bw_min)
    fail("vnr_bw_min/vnr_bw_max", "need 1 <= min <= max");
  if (!(cfg.arrival_rate > 0.0) || !std::isfinite(cfg.arrival_rate))
    fail("arrival_rate", "must be positive");
  if (!(cfg.mean_lifetime > 0.0) || !std::isfinite(cfg.mean_lifetime))
    fail("mean_lifetime", "must be positive");
  if (cfg.epochs < 0) fail("epochs", "must be non-negative");
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate))
    fail("learning_rate", "must be non-negative");
  if (cfg.batch_size < 1) fail("batch_size", "must be positive");
  if (!(cfg.window > 0.0) || !std::isfinite(cfg.window))
    fail("window", "must be positive");
}

std::uint64_t derive_seed(std::uint64_t master, SeedStream stream,
                          std::uint64_t index) {
  auto s = static_cast<std::uint64_t>(stream);
  std::seed_seq seq{static_cast<std::uint32_t>(master),
                    static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(s),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace {

Level draw_level(Rng& rng) {
  return std::uniform_int_distribution<Level>(kMinLevel, kMaxLevel)(rng);
}

Units draw_units(Rng& rng, Units lo, Units hi) {
  return std::uniform_int_distribution<Units>(lo, hi)(rng);
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

}  // namespace

SubstrateNetwork generate_substrate(const ScenarioConfig& cfg, Rng& rng) {
  validate(cfg);
  const auto n = static_cast<std::size_t>(cfg.substrate_nodes);
  const auto m = static_cast<std::size_t>(cfg.substrate_links);

  std::vector<SubstrateNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].id = i;
    nodes[i].cpu_initial = draw_units(rng, cfg.substrate_cpu_min, cfg.substrate_cpu_max);
    nodes[i].delay_level = draw_level(rng);
    nodes[i].security_level = draw_level(rng);
  }

  std::vector<std::vector<bool>> joined(n, std::vector<bool>(n, false));
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 1; i < n; ++i) {
    NodeId u = order[i];
    NodeId v = order[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)];
    edges.emplace_back(std::min(u, v), std::max(u, v));
    joined[u][v] = joined[v][u] = true;
  }
  std::vector<std::pair<NodeId, NodeId>> spare;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (!joined[u][v]) spare.emplace_back(u, v);
  std::shuffle(spare.begin(), spare.end(), rng);
  spare.resize(m - edges.size());
  edges.insert(edges.end(), spare.begin(), spare.end());
  std::sort(edges.begin(), edges.end());

  std::vector<SubstrateLink> links;
  links.reserve(edges.size());
  for (auto [u, v] : edges) {
    SubstrateLink l;
    l.a = u;
    l.b = v;
    l.bw_initial = draw_units(rng, cfg.substrate_bw_min, cfg.substrate_bw_max);
    l.delay_level = draw_level(rng);
    links.push_back(l);
  }
  return SubstrateNetwork(std::move(nodes), std::move(links));
}

std::vector<VirtualNetworkRequest> generate_vnrs(const ScenarioConfig& cfg,
                                                 Rng& rng, Rng& arrival_rng) {
  validate(cfg);
  std::exponential_distribution<double> gap(cfg.arrival_rate);
  std::exponential_distribution<double> life(1.0 / cfg.mean_lifetime);
  std::bernoulli_distribution coin(cfg.vnr_link_probability);

  std::vector<VirtualNetworkRequest> out;
  out.reserve(static_cast<std::size_t>(cfg.vnr_count));
  double clock = 0.0;
  for (std::int64_t r = 0; r < cfg.vnr_count; ++r) {
    VirtualNetworkRequest vnr;
    vnr.id = static_cast<RequestId>(r);
    const auto size = static_cast<std::size_t>(
        draw_units(rng, cfg.vnr_nodes_min, cfg.vnr_nodes_max));
    for (std::size_t i = 0; i < size; ++i) {
      vnr.nodes.push_back({i, draw_units(rng, cfg.vnr_cpu_min, cfg.vnr_cpu_max),
                           draw_level(rng), draw_level(rng)});
    }

    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId u = 0; u < size; ++u)
      for (NodeId v = u + 1; v < size; ++v)
        if (coin(rng)) edges.emplace_back(u, v);

    // Join components with one edge each, from a random member of the next
    // component to a random member of those already joined.
    std::vector<std::size_t> parent(size);
    std::iota(parent.begin(), parent.end(), 0);
    for (auto [u, v] : edges) parent[find_root(parent, u)] = find_root(parent, v);
    std::vector<std::vector<NodeId>> components;
    std::vector<std::size_t> component_of(size, size);
    for (NodeId u = 0; u < size; ++u) {
      auto root = find_root(parent, u);
      if (component_of[root] == size) {
        component_of[root] = components.size();
        components.emplace_back();
      }
      components[component_of[root]].push_back(u);
    }
    std::vector<NodeId> joined = components.front();
    for (std::size_t c = 1; c < components.size(); ++c) {
      const auto& comp = components[c];
      NodeId u = comp[std::uniform_int_distribution<std::size_t>(0, comp.size() - 1)(rng)];
      NodeId v = joined[std::uniform_int_distribution<std::size_t>(0, joined.size() - 1)(rng)];
      edges.emplace_back(std::min(u, v), std::max(u, v));
      joined.insert(joined.end(), comp.begin(), comp.end());
    }
    std::sort(edges.begin(), edges.end());

    for (auto [u, v] : edges)
      vnr.links.push_back(
          {u, v, draw_units(rng, cfg.vnr_bw_min, cfg.vnr_bw_max), draw_level(rng)});

    clock += gap(arrival_rng);
    vnr.arrival_time = clock;
    do {
      vnr.lifetime = life(arrival_rng);
    } while (!(vnr.lifetime > 0.0));
    out.push_back(std::move(vnr));
  }
  return out;
}

std::span<const VirtualNetworkRequest> Scenario::training_set() const {
  auto k = std::min<std::size_t>(static_cast<std::size_t>(config.train_count),
                                 requests.size());
  return std::span(requests).first(k);
}

std::span<const VirtualNetworkRequest> Scenario::test_set() const {
  return std::span(requests).subspan(training_set().size());
}

double Scenario::test_origin() const {
  auto train = training_set();
  return train.empty() ? 0.0 : train.back().arrival_time;
}

Scenario generate_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  Rng topo(derive_seed(cfg.seed, SeedStream::topology));
  Rng reqs(derive_seed(cfg.seed, SeedStream::requests));
  Rng arrivals(derive_seed(cfg.seed, SeedStream::arrivals));
  Scenario s;
  s.config = cfg;
  s.substrate = generate_substrate(cfg, topo);
  s.requests = generate_vnrs(cfg, reqs, arrivals);
  return s;
}

namespace {

struct QueuedEvent {
  double time;
  EventKind kind;
  RequestId id;
  std::size_t index;  // into the request span

  auto key() const { return std::tuple(time, static_cast<int>(kind), id); }
  bool operator>(const QueuedEvent& o) const { return key() > o.key(); }
};

void rescan(const SubstrateNetwork& net,
            std::span<const VirtualNetworkRequest> requests,
            const std::vector<std::size_t>& index_of_active) {
  if (auto e = net.conservation_error(); !e.empty()) throw InvariantBroken(e);
  for (std::size_t idx : index_of_active) {
    if (auto e = active_embedding_error(requests[idx], net); !e.empty())
      throw InvariantBroken("request " + std::to_string(requests[idx].id) +
                            ": " + e);
  }
}

}  // namespace

MetricsLedger replay(std::span<const VirtualNetworkRequest> requests,
                     SubstrateNetwork& net, double origin,
                     const ArrivalHandler& on_arrival,
                     const ReplayOptions& opts) {
  if (!(opts.window > 0.0)) throw InvalidConfig("window: must be positive");
  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, std::greater<>> queue;
  double last_arrival = 0.0;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    double t = requests[i].arrival_time - origin;
    queue.push({t, EventKind::arrival, requests[i].id, i});
    last_arrival = std::max(last_arrival, t);
  }
  const std::int64_t window_count =
      requests.empty()
          ? 0
          : std::max<std::int64_t>(
                1, static_cast<std::int64_t>(std::ceil(last_arrival / opts.window)));

  MetricsLedger ledger;
  std::int64_t next_window = 1;
  std::vector<std::size_t> active;
  auto flush_windows_before = [&](double t) {
    while (next_window <= window_count &&
           static_cast<double>(next_window) * opts.window < t) {
      ledger.snapshot_window(static_cast<double>(next_window) * opts.window);
      ++next_window;
    }
  };

  while (!queue.empty()) {
    QueuedEvent ev = queue.top();
    queue.pop();
    flush_windows_before(ev.time);
    const auto& vnr = requests[ev.index];
    EventRecord rec{ev.time, ev.kind, ev.id, false};
    if (ev.kind == EventKind::arrival) {
      ledger.record_arrival();
      if (auto emb = on_arrival(vnr, net)) {
        ledger.record_acceptance(revenue(vnr), cost(vnr, *emb));
        queue.push({ev.time + vnr.lifetime, EventKind::departure, ev.id, ev.index});
        rec.accepted = true;
        if (opts.check_invariants) active.push_back(ev.index);
      }
    } else {
      net.release(ev.id);
      if (opts.check_invariants) std::erase(active, ev.index);
    }
    if (opts.check_invariants) rescan(net, requests, active);
    if (opts.on_event) opts.on_event(rec);
  }
  flush_windows_before(std::numeric_limits<double>::infinity());
  return ledger;
}

std::vector<EpochRecord> run_training(const Scenario& scenario,
                                      PolicyNetwork& policy,
                                      std::int64_t first_epoch,
                                      std::int64_t epochs,
                                      bool check_invariants) {
  const auto& cfg = scenario.config;
  validate(cfg);
  std::vector<EpochRecord> out;
  ReplayOptions opts;
  opts.window = cfg.window;
  opts.check_invariants = check_invariants;
  for (std::int64_t e = first_epoch; e < first_epoch + epochs; ++e) {
    SubstrateNetwork net = scenario.substrate.pristine();
    Rng rng(derive_seed(cfg.seed, SeedStream::sampling,
                        static_cast<std::uint64_t>(e)));
    double loss_sum = 0.0;
    std::int64_t decisions = 0;
    policy.clear_gradients();
    auto handler = [&](const VirtualNetworkRequest& vnr,
                       SubstrateNetwork& live) -> std::optional<Embedding> {
      TrainStep step = drl_embed_train(vnr, live, policy, rng, cfg.learning_rate,
                                       cfg.feature_scaling);
      loss_sum += step.loss_sum;
      decisions += step.decisions;
      return step.outcome.embedding;
    };
    MetricsLedger ledger = replay(scenario.training_set(), net, 0.0, handler, opts);
    EpochRecord rec;
    rec.epoch = e + 1;
    rec.avg_revenue = ledger.long_term_average_revenue();
    rec.rc_ratio = ledger.rc_ratio();
    rec.acceptance = ledger.acceptance_rate();
    if (decisions > 0) rec.mean_loss = loss_sum / static_cast<double>(decisions);
    out.push_back(rec);
  }
  return out;
}

TestResult run_test(const Scenario& scenario, const EmbeddingEngine& engine,
                    bool check_invariants) {
  validate(scenario.config);
  ReplayOptions opts;
  opts.window = scenario.config.window;
  opts.check_invariants = check_invariants;
  SubstrateNetwork net = scenario.substrate.pristine();
  auto handler = [&](const VirtualNetworkRequest& vnr,
                     SubstrateNetwork& live) -> std::optional<Embedding> {
    EmbedOutcome out = engine.embed(vnr, live);
    if (out.accepted()) live.allocate(vnr, *out.embedding);
    return out.embedding;
  };
  TestResult result;
  result.ledger = replay(scenario.test_set(), net, scenario.test_origin(), handler, opts);
  result.final_substrate = std::move(net);
  return result;
}

void write_epoch_csv(std::ostream& out, const std::vector<EpochRecord>& rows) {
  out << "epoch,avg_revenue,rc_ratio,acceptance,mean_loss\n";
  for (const auto& r : rows) {
    out << r.epoch << ',' << format_optional(r.avg_revenue) << ','
        << format_optional(r.rc_ratio) << ',' << format_optional(r.acceptance)
        << ',' << format_optional(r.mean_loss) << '\n';
  }
}

}  // namespace vne
