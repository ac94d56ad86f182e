#include "rtcc/rl/reward.h"

#include <algorithm>
#include <cstdio>

namespace rtcc {

double RewardNetwork(const std::vector<NetworkRewardSample>& samples,
                     const RewardConfig& cfg) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : samples)
    sum += cfg.net_a * s.tput_kbps + cfg.net_b * s.latency_s + cfg.net_c * s.loss;
  return sum / static_cast<double>(samples.size());
}

double RewardNvc(const std::vector<NvcRewardSample>& samples,
                 const RewardConfig& cfg) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : samples) {
    double q = s.normalized_quality;
    if (q < 0.0 || q > 1.0) {
      static int warned = 0;
      if (warned++ < 3)
        std::fprintf(stderr, "rtcc: normalized quality %.3f outside [0,1]\n", q);
      q = std::clamp(q, 0.0, 1.0);
    }
    sum += q - cfg.nvc_a * s.latency_s;
  }
  return sum / static_cast<double>(samples.size());
}

NetworkRewardSample WindowToNetworkSample(const WindowStats& window,
                                          double window_s) {
  NetworkRewardSample s;
  if (window_s > 0.0)
    s.tput_kbps = window.bytes_acked * 8.0 / 1000.0 / window_s;
  s.latency_s = window.mean_rtt_ms / 1000.0;
  if (window.packets_sent > 0)
    s.loss = std::max(
        0.0, 1.0 - static_cast<double>(window.packets_acked) /
                       static_cast<double>(window.packets_sent));
  return s;
}

}  // namespace rtcc
