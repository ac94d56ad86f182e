#ifndef RTCC_GCC_LIKE_H_
#define RTCC_GCC_LIKE_H_

#include <deque>

#include "rtcc/controller.h"

namespace rtcc {

struct GccConfig {
  double backoff = 0.85;                // multiplicative decrease
  double increase_per_window = 0.08;    // multiplicative increase
  double loss_decrease_threshold = 0.10;
  double initial_threshold_ms = 2.0;    // adaptive overuse threshold gamma
  double threshold_gain_up = 0.12;      // gamma adaptation when |m| > gamma
  double threshold_gain_down = 0.018;   // gamma adaptation when |m| < gamma
  double threshold_min_ms = 0.5;
  double threshold_max_ms = 60.0;
  Micros min_decrease_interval_us = 200 * kMicrosPerMs;
  double throughput_cap_factor = 1.5;   // rate <= factor * measured throughput
};

// Delay-gradient rate controller in the GCC mold: an overuse detector on the
// per-window RTT trend with an adaptive threshold drives increase/hold/
// decrease; loss above 10% also forces a decrease.
class GccLikeController : public Controller {
 public:
  explicit GccLikeController(GccConfig config = {},
                             double initial_rate_kbps = kInitialRateKbps);

  ControllerDecision OnFeedback(const FeedbackReport& feedback,
                                Micros now_us) override;
  double InitialRateKbps() const override { return rate_kbps_; }

  // Used by the safeguard so the fallback resumes from the actual sent rate.
  void ResetRate(double kbps) { rate_kbps_ = ClampRate(kbps); }

 private:
  enum class Signal { kNormal, kOveruse, kUnderuse };

  GccConfig config_;
  double rate_kbps_;
  double threshold_ms_;
  double last_mean_rtt_ms_ = -1.0;
  Micros last_decrease_us_ = -1;
  std::deque<double> recent_tput_kbps_;  // last few windows, for the cap
};

// Per-window delay trend in ms: least-squares slope of RTT over receive time,
// scaled by the window length. Zero with fewer than two samples.
double DelayTrendMs(const FeedbackReport& feedback);

}  // namespace rtcc

#endif  // RTCC_GCC_LIKE_H_
