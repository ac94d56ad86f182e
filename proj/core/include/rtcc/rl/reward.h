#ifndef RTCC_RL_REWARD_H_
#define RTCC_RL_REWARD_H_

#include <vector>

#include "rtcc/rl/observation.h"

namespace rtcc {

enum class RewardKind { kNetwork, kNvc };

struct RewardConfig {
  RewardKind kind = RewardKind::kNvc;
  // Network-level reward coefficients (throughput kbps, latency s, loss frac).
  double net_a = 120.0;
  double net_b = -1000.0;
  double net_c = -2000.0;
  // Codec-aware reward: latency penalty per second of RTT.
  double nvc_a = 0.1;
};

struct NetworkRewardSample {
  double tput_kbps = 0.0;
  double latency_s = 0.0;
  double loss = 0.0;  // fraction
};

struct NvcRewardSample {
  double normalized_quality = 0.0;  // (q - q_min) / (q_max - q_min), [0, 1]
  double latency_s = 0.0;           // mean RTT of the frame's packets
};

// R = (1/n) * sum(a*Tput_i + b*Lat_i + c*Loss_i). Zero for empty input.
double RewardNetwork(const std::vector<NetworkRewardSample>& samples,
                     const RewardConfig& cfg);

// R = (1/n) * sum(qbar_i - a*Lat_i); qbar clamped to [0, 1] with a warning.
double RewardNvc(const std::vector<NvcRewardSample>& samples,
                 const RewardConfig& cfg);

NetworkRewardSample WindowToNetworkSample(const WindowStats& window,
                                          double window_s);

}  // namespace rtcc

#endif  // RTCC_RL_REWARD_H_
