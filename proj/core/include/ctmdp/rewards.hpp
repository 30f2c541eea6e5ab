#pragma once

#include "ctmdp/random.hpp"

namespace ctmdp {

/// Result of the satisfaction reward: the reward and whether it ends the episode.
struct SatOutcome {
  double reward = 0.0;
  bool terminal = false;
};

/// Coin-flip reward for satisfaction learning. A transition out of an
/// accepting product state pays 1 with probability 1-ζ, standing in for the
/// jump to the accepting sink of the ζ-augmented product.
class SatReward {
 public:
  /// Throws ValidationError unless 0 < zeta < 1.
  SatReward(double zeta, RngHandle coin);

  /// Consumes one coin draw iff `from_accepting`.
  SatOutcome operator()(bool from_accepting) noexcept;

  double zeta() const noexcept { return zeta_; }
  const RngHandle& coin() const noexcept { return coin_; }

 private:
  double zeta_;
  RngHandle coin_;
};

/// Dwell-time reward for expectation learning: `dwell` if the state left was
/// accepting, 0 otherwise. Throws ValidationError for negative dwell.
double exp_reward(bool state_accepting, double dwell);

}  // namespace ctmdp
