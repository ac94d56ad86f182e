#ifndef RTCC_RL_RL_CONTROLLER_H_
#define RTCC_RL_RL_CONTROLLER_H_

#include <deque>
#include <random>

#include "rtcc/rl/action.h"
#include "rtcc/rl/observation.h"
#include "rtcc/rl/policy.h"
#include "rtcc/rl/reward.h"
#include "rtcc/safeguard.h"

namespace rtcc {

// One decision step taken by the RL policy within a session. Rewards are
// filled in after the session from the logged windows/frames.
struct RlStep {
  StateVector state{};
  double action = 0.0;
  double log_prob = 0.0;
  double value = 0.0;
  Micros time_us = 0;
  double reward = 0.0;
  double penalty = 0.0;  // safeguard switch penalty, if this step triggered
  NetworkRewardSample window;  // stats of the window observed at this step
};

// Wraps a PolicyNetwork as a session controller: one Gaussian action per
// feedback window, mapped to a sending rate. In deterministic mode the mean
// is used directly (validation / evaluation).
class RlController : public Controller, public SafeguardAware {
 public:
  RlController(const PolicyNetwork* net, uint64_t seed, bool stochastic = true);

  ControllerDecision OnFeedback(const FeedbackReport& feedback,
                                Micros now_us) override;

  // SafeguardAware: keep observations and the applied rate in sync while the
  // fallback is driving, without sampling an action.
  void ObserveFallback(const FeedbackReport& feedback, Micros now_us,
                       double applied_rate_kbps) override;
  void PenalizeLastAction(double penalty) override;

  std::vector<RlStep>& steps() { return steps_; }
  // Every observed window (RL and fallback), in time order.
  const std::vector<std::pair<Micros, NetworkRewardSample>>& all_windows()
      const {
    return all_windows_;
  }

 private:
  void Ingest(const FeedbackReport& feedback);
  double Throughput200msKbps() const;

  const PolicyNetwork* net_;
  std::mt19937_64 rng_;
  bool stochastic_;
  std::deque<WindowStats> history_;  // most recent first
  RateState rate_state_;
  std::vector<RlStep> steps_;
  std::vector<std::pair<Micros, NetworkRewardSample>> all_windows_;
};

}  // namespace rtcc

#endif  // RTCC_RL_RL_CONTROLLER_H_
