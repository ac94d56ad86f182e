#ifndef RTCC_METRICS_H_
#define RTCC_METRICS_H_

#include <vector>

#include "rtcc/session.h"

namespace rtcc {

struct QoEReport {
  double mean_quality_db = 0.0;
  double p98_frame_delay_ms = 0.0;
  double stalls_per_sec = 0.0;
  double stall_time_ratio = 0.0;
  double tput_mbps = 0.0;
  double p98_packet_delay_ms = 0.0;
  double loss_pct = 0.0;          // frame-level: missed-deadline / sent
  double network_loss_pct = 0.0;  // dropped-in-network / sent
};

// SSIM-dB mapping: -10 * log10(1 - ssim). Throws for ssim >= 1 or < 0.
double SsimDb(double ssim);

// Nearest-rank 98th percentile: sorted value at index ceil(0.98 * N).
// Throws on empty input.
double P98(std::vector<double> values);

struct StallStats {
  int stalls = 0;
  double stalls_per_sec = 0.0;
  double stall_time_ratio = 0.0;
};

// A stall is a consecutive-decode gap strictly greater than 200 ms; only the
// excess beyond the threshold counts as stall time.
StallStats CountStalls(const std::vector<double>& decode_times_ms,
                       double duration_s);

constexpr double kStallThresholdMs = 200.0;

// Reduces a complete session log to the QoE / network-level report.
// Throws std::invalid_argument on a log without frames.
QoEReport SessionQoE(const SessionLog& log);

}  // namespace rtcc

#endif  // RTCC_METRICS_H_
