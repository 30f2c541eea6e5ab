#include "ctmdp/rewards.hpp"

#include <string>

#include "ctmdp/errors.hpp"

namespace ctmdp {

SatReward::SatReward(double zeta, RngHandle coin) : zeta_(zeta), coin_(coin) {
  if (!(zeta > 0.0 && zeta < 1.0)) {
    throw ValidationError("zeta must lie strictly between 0 and 1, got " + std::to_string(zeta));
  }
}

SatOutcome SatReward::operator()(bool from_accepting) noexcept {
  if (!from_accepting) return {};
  // u < 1 - ζ happens with probability exactly 1 - ζ for u uniform in [0,1)
  if (coin_.uniform() < 1.0 - zeta_) return {1.0, true};
  return {};
}

double exp_reward(bool state_accepting, double dwell) {
  if (!(dwell >= 0.0)) throw ValidationError("dwell time must be nonnegative");
  return state_accepting ? dwell : 0.0;
}

}  // namespace ctmdp
