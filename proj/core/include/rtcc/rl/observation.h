#ifndef RTCC_RL_OBSERVATION_H_
#define RTCC_RL_OBSERVATION_H_

#include <array>
#include <deque>

#include "rtcc/controller.h"

namespace rtcc {

constexpr int kHistoryWindows = 10;
constexpr int kFeaturesPerWindow = 3;
constexpr int kStateSize = kHistoryWindows * kFeaturesPerWindow;

using StateVector = std::array<double, kStateSize>;

struct WindowStats {
  double mean_rtt_ms = 0.0;
  double min_historic_mean_rtt_ms = 0.0;
  double rtt_slope = 0.0;  // latency gradient, ms of RTT per ms of time
  int64_t packets_sent = 0;
  int64_t packets_acked = 0;
  int64_t bytes_acked = 0;
  int64_t window_index = 0;
};

// Converts one feedback window into stats, carrying the running minimum of
// per-window mean RTTs. Windows without acks inherit the previous mean.
WindowStats MakeWindowStats(const FeedbackReport& feedback,
                            const WindowStats* previous);

// Per-window features, most recent window first:
//   latency_gradient, latency_ratio (mean / historic min, >= 1),
//   sending_ratio (sent / max(acked, 1)).
// Histories shorter than 10 windows are padded with neutral (0, 1, 1).
StateVector ExtractObservation(const std::deque<WindowStats>& history);

}  // namespace rtcc

#endif  // RTCC_RL_OBSERVATION_H_
