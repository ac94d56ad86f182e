#ifndef RTCC_SAFEGUARD_H_
#define RTCC_SAFEGUARD_H_

#include <deque>
#include <memory>

#include "rtcc/controller.h"
#include "rtcc/gcc_like.h"

namespace rtcc {

struct SafeguardConfig {
  // Higher sensitivity lowers the trigger threshold (threshold = running
  // median jitter / sensitivity, floored), so a more sensitive safeguard
  // never triggers on fewer windows.
  double sensitivity = 1.0;
  int dwell_windows = 2;          // calm windows required before RL resumes
  double switch_penalty = -1.0;   // reward penalty on the triggering action
  double threshold_floor_ms = 2.0;
  int median_window = 20;
};

// Implemented by wrapped controllers that need to stay in sync while the
// fallback is driving (the RL controller tracks history and applied rate).
class SafeguardAware {
 public:
  virtual ~SafeguardAware() = default;
  virtual void ObserveFallback(const FeedbackReport& feedback, Micros now_us,
                               double applied_rate_kbps) = 0;
  virtual void PenalizeLastAction(double penalty) = 0;
};

// Jitter-triggered mode switcher: while the per-window RTT jitter exceeds a
// dynamically adjusted threshold, a GCC-style fallback overrides the wrapped
// controller; control returns after dwell_windows consecutive calm windows.
class SafeguardController : public Controller {
 public:
  SafeguardController(std::unique_ptr<Controller> wrapped, SafeguardConfig cfg,
                      GccConfig fallback_cfg = {});

  ControllerDecision OnFeedback(const FeedbackReport& feedback,
                                Micros now_us) override;
  double InitialRateKbps() const override;

  const std::vector<SwitchEvent>& switches() const { return switches_; }
  // Windows whose jitter exceeded the threshold (monotone in sensitivity).
  int64_t triggered_windows() const { return triggered_windows_; }
  Micros fallback_time_us() const { return fallback_time_us_; }
  Controller& wrapped() { return *wrapped_; }

 private:
  double ThresholdMs() const;

  std::unique_ptr<Controller> wrapped_;
  SafeguardConfig cfg_;
  GccLikeController fallback_;
  ControlMode mode_ = ControlMode::kRl;
  std::deque<double> jitter_history_ms_;
  int calm_windows_ = 0;
  int64_t triggered_windows_ = 0;
  Micros fallback_time_us_ = 0;
  double last_rate_kbps_;
  std::vector<SwitchEvent> switches_;
};

// Standard deviation of the window's RTT samples (0 with < 2 samples).
double WindowJitterMs(const FeedbackReport& feedback);

}  // namespace rtcc

#endif  // RTCC_SAFEGUARD_H_
