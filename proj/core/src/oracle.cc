#include "rtcc/oracle.h"

#include <algorithm>

namespace rtcc {

double OracleRateKbps(const NetworkTrace& trace, double t_s, double headroom) {
  double t = std::clamp(t_s, 0.0, trace.duration_s);
  return ClampRate(trace.BandwidthAtMbps(t) * 1000.0 * headroom);
}

OracleController::OracleController(NetworkTrace trace, double headroom)
    : trace_(std::move(trace)), headroom_(headroom) {}

double OracleController::RateAt(Micros now_us) const {
  return OracleRateKbps(trace_, static_cast<double>(now_us) / kMicrosPerSec,
                        headroom_);
}

double OracleController::InitialRateKbps() const { return RateAt(0); }

ControllerDecision OracleController::OnFeedback(const FeedbackReport&,
                                                Micros now_us) {
  return {RateAt(now_us), ControlMode::kOracle, now_us};
}

std::vector<Micros> OracleController::ExtraDecisionTimesUs(
    Micros duration_us) const {
  std::vector<Micros> times;
  for (const auto& bp : trace_.breakpoints) {
    Micros t = static_cast<Micros>(bp.time_s * kMicrosPerSec);
    if (t > 0 && t < duration_us) times.push_back(t);
  }
  return times;
}

std::optional<ControllerDecision> OracleController::OnTick(Micros now_us) {
  return ControllerDecision{RateAt(now_us), ControlMode::kOracle, now_us};
}

}  // namespace rtcc
