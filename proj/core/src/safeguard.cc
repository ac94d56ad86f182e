#include "rtcc/safeguard.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rtcc {

double WindowJitterMs(const FeedbackReport& feedback) {
  const size_t n = feedback.rtt_ms.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double r : feedback.rtt_ms) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : feedback.rtt_ms) var += (r - mean) * (r - mean);
  return std::sqrt(var / n);
}

SafeguardController::SafeguardController(std::unique_ptr<Controller> wrapped,
                                         SafeguardConfig cfg,
                                         GccConfig fallback_cfg)
    : wrapped_(std::move(wrapped)),
      cfg_(cfg),
      fallback_(fallback_cfg),
      last_rate_kbps_(wrapped_->InitialRateKbps()) {
  if (cfg_.sensitivity <= 0.0)
    throw std::invalid_argument("safeguard sensitivity must be > 0");
  if (cfg_.dwell_windows < 1)
    throw std::invalid_argument("safeguard dwell_windows must be >= 1");
}

double SafeguardController::InitialRateKbps() const {
  return wrapped_->InitialRateKbps();
}

double SafeguardController::ThresholdMs() const {
  if (jitter_history_ms_.empty()) return cfg_.threshold_floor_ms;
  std::vector<double> sorted(jitter_history_ms_.begin(),
                             jitter_history_ms_.end());
  std::sort(sorted.begin(), sorted.end());
  double median = sorted[sorted.size() / 2];
  return std::max(cfg_.threshold_floor_ms, median / cfg_.sensitivity);
}

ControllerDecision SafeguardController::OnFeedback(
    const FeedbackReport& feedback, Micros now_us) {
  double jitter = WindowJitterMs(feedback);
  double threshold = ThresholdMs();
  bool triggered = jitter > threshold;
  if (triggered) ++triggered_windows_;

  jitter_history_ms_.push_back(jitter);
  if (static_cast<int>(jitter_history_ms_.size()) > cfg_.median_window)
    jitter_history_ms_.pop_front();

  auto* aware = dynamic_cast<SafeguardAware*>(wrapped_.get());

  ControllerDecision decision;
  if (mode_ == ControlMode::kRl) {
    if (triggered) {
      // The jitter spike is the consequence of the wrapped controller's most
      // recent action; that action carries the penalty.
      if (aware) aware->PenalizeLastAction(cfg_.switch_penalty);
      switches_.push_back({now_us, ControlMode::kRl, ControlMode::kFallback});
      mode_ = ControlMode::kFallback;
      calm_windows_ = 0;
      fallback_.ResetRate(last_rate_kbps_);
      decision = fallback_.OnFeedback(feedback, now_us);
      decision.mode = ControlMode::kFallback;
      if (aware) aware->ObserveFallback(feedback, now_us, decision.rate_kbps);
    } else {
      decision = wrapped_->OnFeedback(feedback, now_us);
      decision.mode = ControlMode::kRl;
    }
  } else {
    if (!triggered && ++calm_windows_ >= cfg_.dwell_windows) {
      switches_.push_back({now_us, ControlMode::kFallback, ControlMode::kRl});
      mode_ = ControlMode::kRl;
      decision = wrapped_->OnFeedback(feedback, now_us);
      decision.mode = ControlMode::kRl;
    } else {
      if (triggered) calm_windows_ = 0;
      decision = fallback_.OnFeedback(feedback, now_us);
      decision.mode = ControlMode::kFallback;
      fallback_time_us_ += kFeedbackIntervalUs;
      if (aware) aware->ObserveFallback(feedback, now_us, decision.rate_kbps);
    }
  }
  decision.time_us = now_us;
  last_rate_kbps_ = decision.rate_kbps;
  return decision;
}

}  // namespace rtcc
