#include "rtcc/rl/rl_controller.h"

#include <algorithm>
#include <cmath>

namespace rtcc {

RlController::RlController(const PolicyNetwork* net, uint64_t seed,
                           bool stochastic)
    : net_(net), rng_(seed), stochastic_(stochastic) {
  rate_state_.prev_rate_kbps = kInitialRateKbps;
}

void RlController::Ingest(const FeedbackReport& feedback) {
  const WindowStats* prev = history_.empty() ? nullptr : &history_.front();
  WindowStats w = MakeWindowStats(feedback, prev);
  history_.push_front(w);
  if (history_.size() > kHistoryWindows) history_.pop_back();
}

double RlController::Throughput200msKbps() const {
  // gamma: throughput over the last 4 feedback windows (200 ms).
  int64_t bytes = 0;
  int windows = 0;
  for (const WindowStats& w : history_) {
    bytes += w.bytes_acked;
    if (++windows == 4) break;
  }
  if (windows == 0) return 0.0;
  double seconds = windows * 0.05;
  return bytes * 8.0 / 1000.0 / seconds;
}

ControllerDecision RlController::OnFeedback(const FeedbackReport& feedback,
                                            Micros now_us) {
  Ingest(feedback);
  rate_state_.tput_200ms_kbps = Throughput200msKbps();

  RlStep step;
  step.state = ExtractObservation(history_);
  auto out = net_->Forward(step.state);
  double action = out.mean;
  if (stochastic_) {
    std::normal_distribution<double> noise(0.0, std::exp(out.log_std));
    action = std::clamp(out.mean + noise(rng_), -1.0, 1.0);
  }
  step.action = action;
  step.log_prob = GaussianLogProb(action, out.mean, out.log_std);
  step.value = out.value;
  step.time_us = now_us;
  step.window = WindowToNetworkSample(
      history_.front(),
      static_cast<double>(feedback.window_end_us - feedback.window_start_us) /
          kMicrosPerSec);
  steps_.push_back(step);
  all_windows_.emplace_back(now_us, step.window);

  double rate = MapAction(action, rate_state_);
  rate_state_.prev_rate_kbps = rate;
  return {rate, ControlMode::kRl, now_us};
}

void RlController::ObserveFallback(const FeedbackReport& feedback,
                                   Micros now_us, double applied_rate_kbps) {
  Ingest(feedback);
  rate_state_.tput_200ms_kbps = Throughput200msKbps();
  rate_state_.prev_rate_kbps = ClampRate(applied_rate_kbps);
  all_windows_.emplace_back(
      now_us, WindowToNetworkSample(
                  history_.front(),
                  static_cast<double>(feedback.window_end_us -
                                      feedback.window_start_us) /
                      kMicrosPerSec));
}

void RlController::PenalizeLastAction(double penalty) {
  if (!steps_.empty()) steps_.back().penalty += penalty;
}

}  // namespace rtcc
