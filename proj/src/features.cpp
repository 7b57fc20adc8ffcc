#include "vne/features.hpp"

#include <algorithm>

#include "vne/metrics.hpp"

namespace vne {

Units sum_adjacent_bw(NodeId node, const SubstrateNetwork& net) {
  Units total = 0;
  for (auto [neighbor, lid] : net.neighbors(node))
    total += net.link(lid).bw_remaining;
  return total;
}

FeatureMatrix extract_feature_matrix(const SubstrateNetwork& net,
                                     FeatureScaling scaling) {
  const std::size_t k = net.node_count();
  std::vector<Units> bw_sum(k);
  Units max_cpu = 0;
  Units max_bw = 0;
  for (NodeId i = 0; i < k; ++i) {
    bw_sum[i] = sum_adjacent_bw(i, net);
    max_cpu = std::max(max_cpu, net.node(i).cpu_remaining);
    max_bw = std::max(max_bw, bw_sum[i]);
  }

  auto scale = [](Units v, Units max) {
    return max > 0 ? static_cast<double>(v) / static_cast<double>(max) : 0.0;
  };

  FeatureMatrix m;
  m.rows.reserve(k);
  m.node_index.reserve(k);
  for (NodeId i = 0; i < k; ++i) {
    const auto& n = net.node(i);
    if (scaling == FeatureScaling::normalized) {
      m.rows.push_back({scale(n.cpu_remaining, max_cpu), scale(bw_sum[i], max_bw),
                        n.delay_level / static_cast<double>(kMaxLevel),
                        n.security_level / static_cast<double>(kMaxLevel)});
    } else {
      m.rows.push_back({static_cast<double>(n.cpu_remaining),
                        static_cast<double>(bw_sum[i]),
                        static_cast<double>(n.delay_level),
                        static_cast<double>(n.security_level)});
    }
    m.node_index.push_back(i);
  }
  return m;
}

void write_feature_csv(std::ostream& out, const FeatureMatrix& m) {
  out << "node_id,cpu,bw_sum,delay,security\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << m.node_index[i];
    for (double v : m.rows[i]) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace vne
