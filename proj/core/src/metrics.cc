#include "rtcc/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rtcc {

double SsimDb(double ssim) {
  if (ssim < 0.0 || ssim >= 1.0)
    throw std::invalid_argument("ssim must lie in [0, 1)");
  return -10.0 * std::log10(1.0 - ssim);
}

double P98(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("p98 of empty list");
  std::sort(values.begin(), values.end());
  size_t rank = static_cast<size_t>(
      std::ceil(0.98 * static_cast<double>(values.size())));
  rank = std::max<size_t>(rank, 1);
  return values[rank - 1];
}

StallStats CountStalls(const std::vector<double>& decode_times_ms,
                       double duration_s) {
  StallStats stats;
  if (decode_times_ms.size() < 2) {
    std::fprintf(stderr, "rtcc: count_stalls with < 2 decode events\n");
    return stats;
  }
  double stall_ms = 0.0;
  for (size_t i = 1; i < decode_times_ms.size(); ++i) {
    double gap = decode_times_ms[i] - decode_times_ms[i - 1];
    if (gap > kStallThresholdMs) {
      stats.stalls += 1;
      stall_ms += gap - kStallThresholdMs;
    }
  }
  if (duration_s > 0.0) {
    stats.stalls_per_sec = stats.stalls / duration_s;
    stats.stall_time_ratio = (stall_ms / 1000.0) / duration_s;
  }
  return stats;
}

QoEReport SessionQoE(const SessionLog& log) {
  if (log.frames.empty())
    throw std::invalid_argument("session log has no frames");

  QoEReport report;

  double quality_sum = 0.0;
  int decoded = 0;
  std::vector<double> frame_delays_ms;
  std::vector<double> decode_times_ms;
  int64_t frame_pkts = 0;
  int64_t frame_pkts_missed = 0;
  for (const FrameRecord& f : log.frames) {
    frame_pkts += f.packet_count;
    frame_pkts_missed += static_cast<int64_t>(
        std::lround(f.loss_rate * f.packet_count));
    if (!f.decoded) continue;
    ++decoded;
    quality_sum += f.quality_db;
    frame_delays_ms.push_back(UsToMs(f.decode_us - f.encode_us));
    decode_times_ms.push_back(UsToMs(f.decode_us));
  }
  if (decoded == 0) throw std::invalid_argument("no decoded frames in log");
  report.mean_quality_db = quality_sum / decoded;
  report.p98_frame_delay_ms = P98(frame_delays_ms);

  std::sort(decode_times_ms.begin(), decode_times_ms.end());
  StallStats stalls = CountStalls(decode_times_ms, log.duration_s);
  report.stalls_per_sec = stalls.stalls_per_sec;
  report.stall_time_ratio = stalls.stall_time_ratio;

  int64_t delivered_bytes = 0;
  int64_t sent = 0, dropped = 0;
  std::vector<double> packet_delays_ms;
  for (const Packet& p : log.packets) {
    ++sent;
    if (p.deliver_time_us.has_value()) {
      delivered_bytes += p.size_bytes;
      packet_delays_ms.push_back(UsToMs(*p.deliver_time_us - p.enqueue_time_us));
    } else if (p.drop_cause.has_value()) {
      ++dropped;
    }
  }
  if (log.duration_s > 0.0)
    report.tput_mbps = delivered_bytes * 8.0 / 1e6 / log.duration_s;
  if (!packet_delays_ms.empty())
    report.p98_packet_delay_ms = P98(packet_delays_ms);
  if (sent > 0) report.network_loss_pct = 100.0 * dropped / sent;
  if (frame_pkts > 0)
    report.loss_pct = 100.0 * frame_pkts_missed / frame_pkts;
  return report;
}

}  // namespace rtcc
