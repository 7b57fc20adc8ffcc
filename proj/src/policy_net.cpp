#include "vne/policy_net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace vne {

PolicyNetwork PolicyNetwork::random(std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> init(-0.1, 0.1);
  Kernel k{};
  for (auto& w : k) w = init(rng);
  double bias = init(rng);
  return PolicyNetwork(k, bias);
}

ActionDistribution PolicyNetwork::forward(const FeatureMatrix& m,
                                          const FeasibilityMask& mask) const {
  const std::size_t k = m.size();
  if (mask.size() != k)
    throw std::invalid_argument("mask length does not match feature rows");

  ActionDistribution dist;
  dist.scores.resize(k);
  dist.probabilities.assign(k, 0.0);
  double max_score = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < k; ++i) {
    double r = bias_;
    for (std::size_t j = 0; j < kFeatureDim; ++j) r += kernel_[j] * m.rows[i][j];
    dist.scores[i] = r;
    if (mask[i]) {
      any = true;
      max_score = std::max(max_score, r);
    }
  }
  if (!any) throw NoFeasibleNode("no substrate node satisfies the constraints");

  double z = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!mask[i]) continue;
    dist.probabilities[i] = std::exp(dist.scores[i] - max_score);
    z += dist.probabilities[i];
  }
  for (auto& p : dist.probabilities) p /= z;
  return dist;
}

double cross_entropy_loss(std::size_t label, const ActionDistribution& dist) {
  if (label >= dist.probabilities.size() || !(dist.probabilities[label] > 0.0))
    throw InfeasibleLabel("row " + std::to_string(label) +
                          " has zero probability");
  return -std::log(dist.probabilities[label]);
}

double PolicyNetwork::accumulate_gradient(const FeatureMatrix& m,
                                          const FeasibilityMask& mask,
                                          std::size_t label) {
  return accumulate_gradient(m, forward(m, mask), label);
}

double PolicyNetwork::accumulate_gradient(const FeatureMatrix& m,
                                          const ActionDistribution& dist,
                                          std::size_t label) {
  double loss = cross_entropy_loss(label, dist);
  // dLoss/dr_i = p_i - [i == label]; masked rows have p_i = 0 and i != label.
  for (std::size_t i = 0; i < m.size(); ++i) {
    double delta = dist.probabilities[i] - (i == label ? 1.0 : 0.0);
    if (delta == 0.0) continue;
    for (std::size_t j = 0; j < kFeatureDim; ++j)
      grad_kernel_[j] += delta * m.rows[i][j];
    grad_bias_ += delta;
  }
  ++batch_count_;
  return loss;
}

void PolicyNetwork::apply_reward_update(double reward, double learning_rate) {
  if (batch_count_ == 0)
    throw EmptyAccumulator("no gradient accumulated since the last update");
  const double scale = learning_rate * reward;
  for (std::size_t j = 0; j < kFeatureDim; ++j)
    kernel_[j] -= scale * grad_kernel_[j];
  bias_ -= scale * grad_bias_;
  clear_gradients();
}

void PolicyNetwork::clear_gradients() {
  grad_kernel_.fill(0.0);
  grad_bias_ = 0.0;
  batch_count_ = 0;
}

std::size_t sample_action(const ActionDistribution& dist, Rng& rng) {
  const auto& p = dist.probabilities;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  double cumulative = 0.0;
  std::size_t last_positive = p.size();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    last_positive = i;
    cumulative += p[i];
    if (u < cumulative) return i;
  }
  // Rounding left the cumulative sum just under u.
  if (last_positive == p.size())
    throw NoFeasibleNode("distribution has no positive entry");
  return last_positive;
}

std::size_t argmax_action(const ActionDistribution& dist) {
  const auto& p = dist.probabilities;
  if (p.empty()) throw NoFeasibleNode("empty distribution");
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) -
                                  p.begin());
}

}  // namespace vne
