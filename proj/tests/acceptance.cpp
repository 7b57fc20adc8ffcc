// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vne/embedders.hpp"
#include "vne/harness.hpp"
#include "vne/metrics.hpp"
#include "vne/policy_net.hpp"
#include "vne/sim.hpp"

using namespace vne;
using namespace vne::testing;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

// 1: exact revenue, cost and ratio of the two-node worked example.
Verdict worked_example() {
  auto vnr = worked_example_request();
  auto net = worked_example_substrate();
  Embedding near{{0, 1}, {{0}}}, far{{5, 3}, {{4, 3}}};
  bool ok = embedding_error(vnr, near, net).empty() && embedding_error(vnr, far, net).empty();
  const Units rev = revenue(vnr), c1 = cost(vnr, near), c2 = cost(vnr, far);
  MetricsLedger l1, l2;
  l1.record_arrival();
  l1.record_acceptance(rev, c1);
  l2.record_arrival();
  l2.record_acceptance(rev, c2);
  ok = ok && rev == 25 && c1 == 25 && c2 == 32 && *l1.rc_ratio() == 1.0 &&
       *l2.rc_ratio() == 0.78125;
  std::ostringstream d;
  d << "revenue=" << rev << " cost=" << c1 << "/" << c2 << " rc=" << *l1.rc_ratio() << "/"
    << *l2.rc_ratio();
  return {ok, d.str()};
}

// 2: analytic gradient against central differences.
Verdict gradient_check() {
  std::mt19937_64 rng(8675309);
  std::uniform_real_distribution<double> w(-2, 2), u(0, 1);
  const double h = 1e-5;
  const int fixtures = 200;
  double worst = 0;
  for (int t = 0; t < fixtures; ++t) {
    const std::size_t k = 2 + t % 15;
    FeatureMatrix m;
    for (std::size_t i = 0; i < k; ++i) {
      m.rows.push_back({u(rng), u(rng), u(rng), u(rng)});
      m.node_index.push_back(i);
    }
    FeasibilityMask mask(k);
    for (std::size_t i = 0; i < k; ++i) mask[i] = rng() % 4 != 0;
    const std::size_t label = rng() % k;
    mask[label] = true;
    PolicyNetwork::Kernel kernel{w(rng), w(rng), w(rng), w(rng)};
    const double bias = w(rng);
    PolicyNetwork net(kernel, bias);
    net.accumulate_gradient(m, mask, label);
    double diff = 0, na = 0, nn = 0;
    for (int j = 0; j < 5; ++j) {
      auto kp = kernel, km = kernel;
      double bp = bias, bm = bias;
      if (j < 4) {
        kp[j] += h;
        km[j] -= h;
      } else {
        bp += h;
        bm -= h;
      }
      const double num = (naive_masked_xent(m.rows, mask, kp, bp, label) -
                          naive_masked_xent(m.rows, mask, km, bm, label)) /
                         (2 * h);
      const double ana = j < 4 ? net.grad_kernel()[j] : net.grad_bias();
      diff += (ana - num) * (ana - num);
      na += ana * ana;
      nn += num * num;
    }
    worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(std::max(na, nn)), 1e-12));
  }
  std::ostringstream d;
  d << fixtures << " fixtures, max relative error " << worst;
  return {worst < 1e-6, d.str()};
}

// 3: random allocate/release churn keeps every invariant.
Verdict conservation() {
  std::mt19937_64 rng(4242);
  ScenarioConfig cfg;
  cfg.substrate_nodes = 30;
  cfg.substrate_links = 80;
  cfg.substrate_cpu_min = 20;
  cfg.substrate_cpu_max = 60;
  cfg.substrate_bw_min = 20;
  cfg.substrate_bw_max = 60;
  auto net = generate_substrate(cfg, rng);
  const auto pristine = net;
  auto engines = std::vector<std::unique_ptr<EmbeddingEngine>>{};
  for (auto name : {"baseline", "bl-vne", "cnl-vne"}) engines.push_back(make_engine(name));
  auto policy = PolicyNetwork::random(1);
  engines.push_back(make_engine("qs-drl", &policy));

  std::vector<std::pair<VirtualNetworkRequest, Embedding>> active;
  const int steps = 3000;
  int accepted = 0;
  for (int step = 0; step < steps; ++step) {
    if (!active.empty() && (rng() % 3 == 0)) {
      const std::size_t i = rng() % active.size();
      net.release(active[i].first.id);
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      auto vnr = random_small_request(rng, static_cast<RequestId>(step), 2 + rng() % 5, 25, 25);
      auto out = engines[rng() % engines.size()]->embed(vnr, net);
      if (out.accepted()) {
        if (!embedding_error(vnr, *out.embedding, net).empty())
          return {false, "engine produced an infeasible embedding at step " +
                             std::to_string(step)};
        net.allocate(vnr, *out.embedding);
        active.emplace_back(vnr, *out.embedding);
        ++accepted;
      }
    }
    for (const auto& n : net.nodes())
      if (n.cpu_remaining < 0) return {false, "negative cpu at step " + std::to_string(step)};
    for (const auto& l : net.links())
      if (l.bw_remaining < 0) return {false, "negative bw at step " + std::to_string(step)};
    if (!net.conservation_error().empty())
      return {false, "conservation broken at step " + std::to_string(step)};
    for (const auto& [vnr, emb] : active)
      if (!active_embedding_error(vnr, net).empty())
        return {false, "active embedding no longer verifies at step " + std::to_string(step)};
  }
  for (const auto& [vnr, emb] : active) net.release(vnr.id);
  const bool restored = net == pristine;
  std::ostringstream d;
  d << steps << " steps, " << accepted << " embeddings, restored=" << restored;
  return {restored, d.str()};
}

// 4: every engine output is in the brute-force feasible set, and every
// mapped path has the minimum hop count available.
Verdict brute_force() {
  std::mt19937_64 rng(31337);
  auto policy = PolicyNetwork::random(2);
  std::vector<std::unique_ptr<EmbeddingEngine>> engines;
  for (auto name : kEngineNames) engines.push_back(make_engine(std::string(name), &policy));
  const int instances = 300;
  int embedded = 0, paths_checked = 0;
  for (int t = 0; t < instances; ++t) {
    auto net = random_small_substrate(rng, 3 + rng() % 4, 0.4, 5, 40, 5, 40);
    auto vnr = random_small_request(rng, 1, 2 + rng() % 2, 20, 20);
    const auto feasible = enumerate_feasible(vnr, net);
    for (const auto& e : engines) {
      auto out = e->embed(vnr, net);
      if (!out.accepted()) continue;
      ++embedded;
      const auto& emb = *out.embedding;
      if (std::find(feasible.begin(), feasible.end(), emb) == feasible.end())
        return {false, std::string(e->name()) + " output outside feasible set on instance " +
                           std::to_string(t)};
    }
    // Hop minimality of the link mapper for a fixed node placement, with
    // earlier links reserved as the mapper does.
    for (const auto& cand : feasible) {
      auto paths = bfs_link_map(vnr, cand.node_assignment, net);
      // Sequential placement can strand a later link even when some joint
      // assignment exists; minimality is only checked where it succeeds.
      if (!paths) continue;
      std::vector<Units> reserved(net.link_count(), 0);
      for (std::size_t li : link_mapping_order(vnr)) {
        const auto& vl = vnr.links[li];
        std::size_t best = SIZE_MAX;
        for (const auto& p : all_simple_paths(net, cand.node_assignment[vl.a],
                                              cand.node_assignment[vl.b])) {
          bool ok = true;
          for (LinkId id : p) {
            const auto& l = net.link(id);
            if (l.bw_remaining - reserved[id] < vl.bw_demand ||
                l.delay_level > vl.delay_requirement)
              ok = false;
          }
          if (ok) best = std::min(best, p.size());
        }
        if (best == SIZE_MAX || (*paths)[li].size() != best)
          return {false, "non-minimal path on instance " + std::to_string(t)};
        for (LinkId id : (*paths)[li]) reserved[id] += vl.bw_demand;
      }
      ++paths_checked;
    }
  }
  std::ostringstream d;
  d << instances << " instances, " << embedded << " engine embeddings, " << paths_checked
    << " placements path-checked";
  return {true, d.str()};
}

// 5: inter-arrival gaps of the request generator.
Verdict arrival_rate() {
  ScenarioConfig cfg;
  cfg.vnr_count = 10000;
  cfg.train_count = 0;
  Rng rng(derive_seed(77, SeedStream::requests)), arr(derive_seed(77, SeedStream::arrivals));
  auto vnrs = generate_vnrs(cfg, rng, arr);
  const double mean = vnrs.back().arrival_time / static_cast<double>(vnrs.size());
  std::ostringstream d;
  d << "mean gap " << mean << " over " << vnrs.size() << " arrivals";
  return {std::abs(mean - 25.0) <= 1.25, d.str()};
}

// 6: training loss trends down on a mid-size scenario.
Verdict loss_trend() {
  ScenarioConfig cfg;
  cfg.substrate_nodes = 50;
  cfg.substrate_links = 200;
  cfg.epochs = 100;
  cfg.learning_rate = 0.005;
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<std::future<std::pair<double, double>>> jobs;
  for (auto seed : seeds) {
    jobs.push_back(std::async(std::launch::async, [cfg, seed]() mutable {
      cfg.seed = seed;
      auto s = generate_scenario(cfg);
      auto policy = PolicyNetwork::random(derive_seed(seed, SeedStream::policy_init));
      auto rows = run_training(s, policy, 0, cfg.epochs);
      double first = 0, last = 0;
      for (int i = 0; i < 10; ++i) {
        first += rows[i].mean_loss.value_or(0.0);
        last += rows[rows.size() - 10 + i].mean_loss.value_or(0.0);
      }
      return std::pair(first / 10, last / 10);
    }));
  }
  int improved = 0;
  std::ostringstream d;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto [first, last] = jobs[i].get();
    if (last < first) ++improved;
    d << " seed" << seeds[i] << ":" << first << "->" << last;
  }
  return {improved >= 4, std::to_string(improved) + "/5 seeds improved;" + d.str()};
}

// 7: the trained policy against the max-CPU greedy mapper.
Verdict drl_vs_greedy() {
  ScenarioConfig cfg;
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  struct Row {
    double drl_acc, drl_rc, greedy_acc, greedy_rc;
  };
  std::vector<std::future<Row>> jobs;
  for (auto seed : seeds) {
    jobs.push_back(std::async(std::launch::async, [cfg, seed]() mutable {
      cfg.seed = seed;
      auto s = generate_scenario(cfg);
      auto policy = PolicyNetwork::random(derive_seed(seed, SeedStream::policy_init));
      run_training(s, policy, 0, cfg.epochs);
      auto drl = run_test(s, *make_engine("qs-drl", &policy)).ledger;
      auto greedy = run_test(s, *make_engine("bl-vne")).ledger;
      return Row{drl.acceptance_rate().value_or(0), drl.rc_ratio().value_or(0),
                 greedy.acceptance_rate().value_or(0), greedy.rc_ratio().value_or(0)};
    }));
  }
  Row mean{0, 0, 0, 0};
  for (auto& j : jobs) {
    auto r = j.get();
    mean.drl_acc += r.drl_acc / 5;
    mean.drl_rc += r.drl_rc / 5;
    mean.greedy_acc += r.greedy_acc / 5;
    mean.greedy_rc += r.greedy_rc / 5;
  }
  std::ostringstream d;
  d << "acceptance qs-drl=" << mean.drl_acc << " bl-vne=" << mean.greedy_acc
    << "; rc qs-drl=" << mean.drl_rc << " bl-vne=" << mean.greedy_rc;
  return {mean.drl_acc >= mean.greedy_acc && mean.drl_rc >= mean.greedy_rc, d.str()};
}

// 8: the same manifest inputs give byte-identical CSV files, run through
// the command layer end to end.
Verdict reproducibility() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "vne_acceptance_repro";
  fs::remove_all(root);
  fs::create_directories(root);
  ScenarioConfig cfg;
  cfg.substrate_nodes = 30;
  cfg.substrate_links = 90;
  cfg.vnr_count = 400;
  cfg.train_count = 200;
  cfg.epochs = 5;
  write_text_file(root / "config.json", dump(config_to_json(cfg)));

  std::ostringstream sink;
  auto run = [&](const std::string& tag) {
    harness::Options opts;
    opts.config = root / "config.json";
    opts.seeds = {99, 100};
    opts.out_dir = root / tag;
    harness::cmd_compare(opts, sink);
    return read_text_file(opts.out_dir / "compare.csv") +
           read_text_file(opts.out_dir / "compare_summary.csv");
  };
  const auto a = run("a"), b = run("b");
  return {a == b && !a.empty(), std::to_string(a.size()) + " bytes compared"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 worked example revenue/cost/ratio", worked_example},
      {"2 gradient finite-difference check", gradient_check},
      {"3 resource conservation under churn", conservation},
      {"4 engines agree with brute-force feasibility", brute_force},
      {"5 arrival rate", arrival_rate},
      {"6 training loss decreases", loss_trend},
      {"7 qs-drl matches or beats bl-vne", drl_vs_greedy},
      {"8 byte-identical reruns", reproducibility},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%s) [%.1fs]\n", v.pass ? "PASS" : "FAIL", name.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
