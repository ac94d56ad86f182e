#ifndef RTCC_CONTROLLER_H_
#define RTCC_CONTROLLER_H_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "rtcc/link.h"

namespace rtcc {

constexpr Micros kFeedbackIntervalUs = 50 * kMicrosPerMs;
constexpr double kMinRateKbps = 100.0;
constexpr double kMaxRateKbps = 8000.0;
constexpr double kInitialRateKbps = 300.0;

inline double ClampRate(double kbps) {
  return std::clamp(kbps, kMinRateKbps, kMaxRateKbps);
}

// One RTCP-style feedback window, composed at the receiver over
// [window_start, window_end) and delivered to the sender one OWD later.
struct FeedbackReport {
  Micros window_start_us = 0;
  Micros window_end_us = 0;
  std::vector<int64_t> acked_ids;
  std::vector<double> rtt_ms;        // aligned with acked_ids
  std::vector<Micros> ack_time_us;   // receiver-side delivery times
  int64_t bytes_acked = 0;
  int64_t packets_sent_in_window = 0;
  int64_t bytes_sent_in_window = 0;
};

enum class ControlMode { kRl, kFallback, kRule, kOracle };

struct ControllerDecision {
  double rate_kbps = kInitialRateKbps;
  ControlMode mode = ControlMode::kRule;
  Micros time_us = 0;
};

struct SwitchEvent {
  Micros time_us = 0;
  ControlMode from = ControlMode::kRl;
  ControlMode to = ControlMode::kFallback;
};

class Controller {
 public:
  virtual ~Controller() = default;

  virtual ControllerDecision OnFeedback(const FeedbackReport& feedback,
                                        Micros now_us) = 0;

  // Extra times at which the session should poll OnTick (used by the oracle
  // to re-decide exactly at bandwidth breakpoints).
  virtual std::vector<Micros> ExtraDecisionTimesUs(Micros /*duration_us*/) const {
    return {};
  }
  virtual std::optional<ControllerDecision> OnTick(Micros /*now_us*/) {
    return std::nullopt;
  }

  virtual double InitialRateKbps() const { return kInitialRateKbps; }
};

}  // namespace rtcc

#endif  // RTCC_CONTROLLER_H_
