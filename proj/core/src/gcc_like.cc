#include "rtcc/gcc_like.h"

#include <cmath>
#include <numeric>

namespace rtcc {

double DelayTrendMs(const FeedbackReport& feedback) {
  const size_t n = feedback.rtt_ms.size();
  if (n < 2) return 0.0;
  double mean_t = 0.0, mean_r = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mean_t += UsToMs(feedback.ack_time_us[i]);
    mean_r += feedback.rtt_ms[i];
  }
  mean_t /= n;
  mean_r /= n;
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dt = UsToMs(feedback.ack_time_us[i]) - mean_t;
    num += dt * (feedback.rtt_ms[i] - mean_r);
    den += dt * dt;
  }
  if (den <= 0.0) return 0.0;
  double slope = num / den;  // ms of RTT per ms of time
  return slope * UsToMs(feedback.window_end_us - feedback.window_start_us);
}

GccLikeController::GccLikeController(GccConfig config,
                                     double initial_rate_kbps)
    : config_(config),
      rate_kbps_(ClampRate(initial_rate_kbps)),
      threshold_ms_(config.initial_threshold_ms) {}

ControllerDecision GccLikeController::OnFeedback(const FeedbackReport& feedback,
                                                 Micros now_us) {
  double loss = 0.0;
  if (feedback.packets_sent_in_window > 0) {
    loss = 1.0 - static_cast<double>(feedback.acked_ids.size()) /
                     static_cast<double>(feedback.packets_sent_in_window);
    loss = std::max(loss, 0.0);
  }

  double trend_ms = DelayTrendMs(feedback);
  Signal signal = Signal::kNormal;
  if (trend_ms > threshold_ms_) {
    signal = Signal::kOveruse;
  } else if (trend_ms < -threshold_ms_) {
    signal = Signal::kUnderuse;
  }

  // Adapt the threshold toward the observed trend magnitude, faster when the
  // trend exceeds it (standard overuse-detector adaptation).
  double gain = std::abs(trend_ms) > threshold_ms_ ? config_.threshold_gain_up
                                                   : config_.threshold_gain_down;
  threshold_ms_ += gain * (std::abs(trend_ms) - threshold_ms_);
  threshold_ms_ = std::clamp(threshold_ms_, config_.threshold_min_ms,
                             config_.threshold_max_ms);

  double window_s = static_cast<double>(feedback.window_end_us -
                                        feedback.window_start_us) /
                    kMicrosPerSec;
  double tput_kbps =
      window_s > 0.0 ? feedback.bytes_acked * 8.0 / 1000.0 / window_s : 0.0;
  recent_tput_kbps_.push_back(tput_kbps);
  if (recent_tput_kbps_.size() > 8) recent_tput_kbps_.pop_front();

  bool decrease = signal == Signal::kOveruse ||
                  loss > config_.loss_decrease_threshold;
  if (decrease) {
    if (last_decrease_us_ < 0 ||
        now_us - last_decrease_us_ >= config_.min_decrease_interval_us) {
      rate_kbps_ *= config_.backoff;
      last_decrease_us_ = now_us;
    }
  } else if (signal == Signal::kNormal) {
    rate_kbps_ *= 1.0 + config_.increase_per_window;
  }
  // Underuse: hold while the queue drains.

  double max_tput =
      recent_tput_kbps_.empty()
          ? kMaxRateKbps
          : *std::max_element(recent_tput_kbps_.begin(), recent_tput_kbps_.end());
  if (max_tput > 0.0)
    rate_kbps_ = std::min(rate_kbps_, config_.throughput_cap_factor * max_tput);
  rate_kbps_ = ClampRate(rate_kbps_);

  last_mean_rtt_ms_ =
      feedback.rtt_ms.empty()
          ? last_mean_rtt_ms_
          : std::accumulate(feedback.rtt_ms.begin(), feedback.rtt_ms.end(), 0.0) /
                feedback.rtt_ms.size();

  return {rate_kbps_, ControlMode::kRule, now_us};
}

}  // namespace rtcc
