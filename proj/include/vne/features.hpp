#ifndef VNE_FEATURES_HPP
#define VNE_FEATURES_HPP

#include <array>
#include <ostream>
#include <vector>

#include "vne/network_model.hpp"

namespace vne {

inline constexpr std::size_t kFeatureDim = 4;

/// (cpu, adjacent bandwidth sum, delay level, security level).
using FeatureVector = std::array<double, kFeatureDim>;

enum class FeatureScaling {
  /// CPU and bandwidth divided by their maximum over nodes, levels by 3.
  normalized,
  /// Attributes as stored.
  raw,
};

struct FeatureMatrix {
  std::vector<FeatureVector> rows;
  /// Substrate node id of each row.
  std::vector<NodeId> node_index;

  std::size_t size() const { return rows.size(); }
};

/// Remaining bandwidth summed over the links incident to the node.
Units sum_adjacent_bw(NodeId node, const SubstrateNetwork& net);

/// One row per substrate node in id order.
FeatureMatrix extract_feature_matrix(
    const SubstrateNetwork& net,
    FeatureScaling scaling = FeatureScaling::normalized);

/// node_id,cpu,bw_sum,delay,security
void write_feature_csv(std::ostream& out, const FeatureMatrix& m);

}  // namespace vne

#endif  // VNE_FEATURES_HPP
