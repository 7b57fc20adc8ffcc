#ifndef VNE_POLICY_NET_HPP
#define VNE_POLICY_NET_HPP

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "vne/features.hpp"

namespace vne {

class NoFeasibleNode : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleLabel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyAccumulator : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// true where the row's substrate node may host the current virtual node.
using FeasibilityMask = std::vector<bool>;

struct ActionDistribution {
  /// Zero on masked rows.
  std::vector<double> probabilities;
  /// Affine scores, computed for every row including masked ones.
  std::vector<double> scores;
};

using Rng = std::mt19937_64;

/// Shared-kernel affine scorer followed by a softmax over feasible rows.
/// Gradients of the cross-entropy of chosen rows are accumulated until a
/// reward-scaled update or a clear.
class PolicyNetwork {
 public:
  using Kernel = std::array<double, kFeatureDim>;

  PolicyNetwork() = default;
  PolicyNetwork(const Kernel& kernel, double bias)
      : kernel_(kernel), bias_(bias) {}

  /// Kernel and bias uniform in [-0.1, 0.1].
  static PolicyNetwork random(std::uint64_t seed);

  const Kernel& kernel() const { return kernel_; }
  double bias() const { return bias_; }
  const Kernel& grad_kernel() const { return grad_kernel_; }
  double grad_bias() const { return grad_bias_; }
  int batch_count() const { return batch_count_; }

  /// Throws NoFeasibleNode if the mask has no true entry.
  ActionDistribution forward(const FeatureMatrix& m,
                             const FeasibilityMask& mask) const;

  /// Adds d(-log p_label)/d(kernel, bias) to the accumulator and returns the
  /// loss of this decision. Throws InfeasibleLabel.
  double accumulate_gradient(const FeatureMatrix& m, const FeasibilityMask& mask,
                             std::size_t label);

  /// Same as above with a distribution already computed by forward().
  double accumulate_gradient(const FeatureMatrix& m,
                             const ActionDistribution& dist, std::size_t label);

  /// params -= learning_rate * reward * accumulated gradient, then clears.
  /// Throws EmptyAccumulator if nothing has been accumulated.
  void apply_reward_update(double reward, double learning_rate);

  void clear_gradients();

  friend bool operator==(const PolicyNetwork&, const PolicyNetwork&) = default;

 private:
  Kernel kernel_{};
  double bias_ = 0.0;
  Kernel grad_kernel_{};
  double grad_bias_ = 0.0;
  int batch_count_ = 0;
};

/// -log p[label]. Throws InfeasibleLabel when p[label] is 0.
double cross_entropy_loss(std::size_t label, const ActionDistribution& dist);

/// Draws a row with probability p_i.
std::size_t sample_action(const ActionDistribution& dist, Rng& rng);

/// Most probable row; the lowest index wins ties.
std::size_t argmax_action(const ActionDistribution& dist);

}  // namespace vne

#endif  // VNE_POLICY_NET_HPP
