#ifndef RTCC_RL_ACTION_H_
#define RTCC_RL_ACTION_H_

#include "rtcc/controller.h"

namespace rtcc {

struct RateState {
  double prev_rate_kbps = kInitialRateKbps;  // x_{t-1}
  double tput_200ms_kbps = 0.0;              // gamma, throughput over 200 ms
};

// Continuous action a in [-1, 1] to sending rate:
//   a >= 0: x = x_prev * (1 + a)   (up to a 2x increase)
//   a <  0: x = gamma * (1 + a)    (throughput-anchored decrease)
// clamped to the global rate limits.
double MapAction(double action, const RateState& rate_state);

}  // namespace rtcc

#endif  // RTCC_RL_ACTION_H_
