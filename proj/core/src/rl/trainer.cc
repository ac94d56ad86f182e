#include "rtcc/rl/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rtcc {

namespace {

double NormalizedQuality(const CodecProfile& profile, const FrameRecord& f) {
  double lo = profile.RowMinDb(f.bitrate_kbps);
  double hi = profile.RowMaxDb(f.bitrate_kbps);
  if (hi <= lo) return 0.0;
  return std::clamp((f.quality_db - lo) / (hi - lo), 0.0, 1.0);
}

std::vector<NetworkTrace> MakeValidationTraces(const TrainConfig& config) {
  if (!config.validation_traces.empty()) return config.validation_traces;
  std::vector<NetworkTrace> traces;
  for (int i = 0; i < config.num_validation_traces; ++i)
    traces.push_back(GenerateTrace(config.env, config.validation_seed + i));
  return traces;
}

}  // namespace

void AssignRewards(RlController& rl, const SessionLog& log,
                   const CodecProfile& profile, const RewardConfig& reward) {
  auto& steps = rl.steps();
  if (steps.empty()) return;
  const Micros end_us =
      static_cast<Micros>(log.duration_s * kMicrosPerSec) + kMicrosPerSec;

  for (size_t i = 0; i < steps.size(); ++i) {
    Micros from = steps[i].time_us;
    Micros to = (i + 1 < steps.size()) ? steps[i + 1].time_us : end_us;

    if (reward.kind == RewardKind::kNetwork) {
      std::vector<NetworkRewardSample> samples;
      for (const auto& [t, w] : rl.all_windows())
        if (t > from && t <= to) samples.push_back(w);
      steps[i].reward = RewardNetwork(samples, reward) + steps[i].penalty;
    } else {
      std::vector<NvcRewardSample> samples;
      for (const FrameRecord& f : log.frames) {
        if (!f.decoded || f.decode_us <= from || f.decode_us > to) continue;
        samples.push_back({NormalizedQuality(profile, f),
                           f.mean_rtt_ms / 1000.0});
      }
      steps[i].reward = RewardNvc(samples, reward) + steps[i].penalty;
    }
  }
}

ValidationScore Validate(const PolicyNetwork& net,
                         const std::vector<NetworkTrace>& traces,
                         const std::vector<CodecProfile>& profiles,
                         const RewardConfig& reward,
                         const SessionConfig& session) {
  ValidationScore score;
  int64_t steps = 0;
  double own = 0.0, nvc = 0.0;
  RewardConfig own_cfg = reward;
  RewardConfig nvc_cfg = reward;
  nvc_cfg.kind = RewardKind::kNvc;

  for (size_t ti = 0; ti < traces.size(); ++ti) {
    const CodecProfile& profile = profiles[ti % profiles.size()];
    SessionConfig cfg = session;
    cfg.seed = session.seed + ti;
    RlController rl(&net, /*seed=*/7, /*stochastic=*/false);
    SessionLog log = RunSession(traces[ti], rl, profile, cfg);

    AssignRewards(rl, log, profile, own_cfg);
    for (const RlStep& s : rl.steps()) own += s.reward;

    AssignRewards(rl, log, profile, nvc_cfg);
    for (const RlStep& s : rl.steps()) nvc += s.reward;

    steps += static_cast<int64_t>(rl.steps().size());
  }
  if (steps > 0) {
    score.own_kind = own / steps;
    score.nvc_kind = nvc / steps;
  }
  return score;
}

TrainResult Train(const TrainConfig& config, const ProgressFn& progress) {
  if (config.profiles.empty())
    throw std::invalid_argument("train: at least one codec profile required");

  TrainResult result;
  result.net = config.resume_net ? *config.resume_net
                                 : PolicyNetwork(config.seed);
  result.steps_done = config.resume_steps;

  AdamOptimizer opt(PolicyNetwork::ParamCount(), config.ppo.learning_rate);
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<NetworkTrace> validation = MakeValidationTraces(config);
  std::vector<Transition> buffer;
  const auto wall_start = std::chrono::steady_clock::now();

  auto WallSeconds = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         wall_start)
        .count();
  };
  auto Evaluate = [&] {
    ValidationScore score = Validate(result.net, validation, config.profiles,
                                     config.reward, config.session);
    CurvePoint point{result.steps_done, WallSeconds(), score.own_kind,
                     score.nvc_kind, result.switch_count};
    result.curve.push_back(point);
    if (progress) progress(point);
  };

  // total_steps is the absolute step target, so resumed runs continue
  // monotonically. A zero-step request returns the initialized net as-is.
  if (config.total_steps <= result.steps_done) return result;

  Evaluate();  // baseline point at the starting step count

  int64_t next_eval = result.steps_done + config.eval_interval_steps;
  int64_t episode = 0;
  while (result.steps_done < config.total_steps) {
    NetworkTrace trace =
        config.fixed_traces.empty()
            ? GenerateTrace(config.env, rng())
            : config.fixed_traces[episode % config.fixed_traces.size()];
    const CodecProfile& profile =
        config.profiles[episode % config.profiles.size()];
    ++episode;

    SessionConfig session_cfg = config.session;
    session_cfg.seed = rng();

    auto rl_owner = std::make_unique<RlController>(&result.net, rng());
    RlController* rl = rl_owner.get();
    std::unique_ptr<Controller> controller;
    SafeguardController* guard = nullptr;
    if (config.safeguard) {
      auto sg = std::make_unique<SafeguardController>(std::move(rl_owner),
                                                      *config.safeguard);
      guard = sg.get();
      controller = std::move(sg);
    } else {
      controller = std::move(rl_owner);
    }

    SessionLog log = RunSession(trace, *controller, profile, session_cfg);
    AssignRewards(*rl, log, profile, config.reward);

    for (size_t i = 0; i < rl->steps().size(); ++i) {
      const RlStep& s = rl->steps()[i];
      Transition t;
      t.state = s.state;
      t.action = s.action;
      t.log_prob = s.log_prob;
      t.value = s.value;
      t.reward = s.reward;
      t.episode_end = i + 1 == rl->steps().size();
      buffer.push_back(t);

      result.actions_total += 1;
      if (s.action > 0.0) result.actions_increase += 1;
      if (result.action_samples.size() < 200000)
        result.action_samples.push_back(s.action);
    }

    // Every window consumed in the environment counts against the step
    // budget, including windows handed to the fallback: that is exactly the
    // sample-efficiency cost of safeguarding.
    result.steps_done += static_cast<int64_t>(rl->all_windows().size());
    if (guard) {
      result.switch_count += static_cast<int64_t>(guard->switches().size());
      result.fallback_time_us += guard->fallback_time_us();
    }

    if (static_cast<int>(buffer.size()) >= config.ppo.rollout_steps) {
      PpoUpdate(result.net, opt, buffer, config.ppo, rng());
      buffer.clear();
    }

    if (result.steps_done >= next_eval) {
      Evaluate();
      next_eval += config.eval_interval_steps;
    }
  }

  if (result.curve.empty() || result.curve.back().steps != result.steps_done)
    Evaluate();
  return result;
}

std::optional<size_t> CheckConvergence(const std::vector<double>& values,
                                       double band, size_t horizon) {
  for (size_t i = 0; i < values.size(); ++i) {
    double ref = values[i];
    double tol = band * std::abs(ref);
    bool stable = true;
    size_t last = horizon >= values.size() - i
                      ? values.size()
                      : i + 1 + horizon;
    for (size_t j = i + 1; j < last; ++j) {
      if (std::abs(values[j] - ref) > tol) {
        stable = false;
        break;
      }
    }
    if (stable) return i;
  }
  return std::nullopt;
}

void SaveCurveCsv(const std::vector<CurvePoint>& curve,
                  const std::string& path, bool append) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write curve: " + path);
  if (!append)
    out << "steps,wall_seconds,validation_reward,validation_reward_nvc,"
           "mode_switches\n";
  out.precision(17);
  for (const CurvePoint& p : curve)
    out << p.steps << "," << p.wall_seconds << "," << p.validation_reward
        << "," << p.validation_reward_nvc << "," << p.mode_switches << "\n";
}

std::vector<CurvePoint> LoadCurveCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open curve: " + path);
  std::vector<CurvePoint> curve;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CurvePoint p;
    char comma;
    std::istringstream ls(line);
    if (!(ls >> p.steps >> comma >> p.wall_seconds >> comma >>
          p.validation_reward >> comma >> p.validation_reward_nvc >> comma >>
          p.mode_switches))
      throw std::runtime_error("malformed curve line: " + line);
    curve.push_back(p);
  }
  return curve;
}

}  // namespace rtcc
