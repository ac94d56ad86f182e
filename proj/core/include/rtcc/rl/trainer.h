#ifndef RTCC_RL_TRAINER_H_
#define RTCC_RL_TRAINER_H_

#include <functional>
#include <optional>
#include <string>

#include "rtcc/codec.h"
#include "rtcc/rl/ppo.h"
#include "rtcc/rl/rl_controller.h"
#include "rtcc/session.h"
#include "rtcc/trace.h"

namespace rtcc {

struct TrainConfig {
  RewardConfig reward;
  std::optional<SafeguardConfig> safeguard;
  int64_t total_steps = 50000;  // environment steps (50 ms windows)
  uint64_t seed = 1;

  // Episode environments: explicit traces round-robin, or generated per
  // episode from `env` when `fixed_traces` is empty.
  TraceGenParams env;
  std::vector<NetworkTrace> fixed_traces;
  std::vector<CodecProfile> profiles;  // sampled uniformly per episode

  PpoHyper ppo;
  SessionConfig session;

  int64_t eval_interval_steps = 2500;
  int num_validation_traces = 4;
  uint64_t validation_seed = 90001;
  std::vector<NetworkTrace> validation_traces;  // overrides generation

  // Resume support: continue from an existing policy / step count.
  std::optional<PolicyNetwork> resume_net;
  int64_t resume_steps = 0;
};

struct CurvePoint {
  int64_t steps = 0;
  double wall_seconds = 0.0;
  double validation_reward = 0.0;      // under the training reward kind
  double validation_reward_nvc = 0.0;  // always the codec-aware reward
  int64_t mode_switches = 0;           // cumulative over training
};

struct TrainResult {
  PolicyNetwork net;
  std::vector<CurvePoint> curve;
  int64_t steps_done = 0;
  int64_t switch_count = 0;
  Micros fallback_time_us = 0;
  int64_t actions_increase = 0;  // sampled RL actions > 0
  int64_t actions_total = 0;
  std::vector<double> action_samples;  // for CDF diagnostics (downsampled)

  double increase_share() const {
    return actions_total > 0
               ? static_cast<double>(actions_increase) / actions_total
               : 0.0;
  }
};

using ProgressFn = std::function<void(const CurvePoint&)>;

TrainResult Train(const TrainConfig& config, const ProgressFn& progress = {});

// Rewards for the RL steps of one finished session, under `cfg.reward`:
// each step is paid over the windows/frames observed until the next step.
void AssignRewards(RlController& rl, const SessionLog& log,
                   const CodecProfile& profile, const RewardConfig& reward);

// Mean per-step reward of a deterministic policy rollout (validation).
struct ValidationScore {
  double own_kind = 0.0;
  double nvc_kind = 0.0;
};
ValidationScore Validate(const PolicyNetwork& net,
                         const std::vector<NetworkTrace>& traces,
                         const std::vector<CodecProfile>& profiles,
                         const RewardConfig& reward,
                         const SessionConfig& session);

// Earliest curve index after which every later value within `horizon`
// points stays inside +-band of that value; nullopt if none.
std::optional<size_t> CheckConvergence(const std::vector<double>& values,
                                       double band = 0.10,
                                       size_t horizon = SIZE_MAX);

void SaveCurveCsv(const std::vector<CurvePoint>& curve,
                  const std::string& path, bool append = false);
std::vector<CurvePoint> LoadCurveCsv(const std::string& path);

}  // namespace rtcc

#endif  // RTCC_RL_TRAINER_H_
