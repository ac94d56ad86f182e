// End-to-end acceptance checks for the rtcc project. Each criterion prints a
// single PASS/FAIL line; the process exits non-zero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rtcc/codec.h"
#include "rtcc/experiment.h"
#include "rtcc/gcc_like.h"
#include "rtcc/link.h"
#include "rtcc/metrics.h"
#include "rtcc/oracle.h"
#include "rtcc/rl/ppo.h"
#include "rtcc/rl/reward.h"
#include "rtcc/rl/rl_controller.h"
#include "rtcc/rl/trainer.h"
#include "rtcc/safeguard.h"
#include "rtcc/session.h"
#include "rtcc/trace.h"

using namespace rtcc;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void Report(int number, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("CRITERION %2d [%s] %s%s%s\n", number, pass ? "PASS" : "FAIL",
              name.c_str(), detail.empty() ? "" : " — ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string Fmt(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double Mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

NetworkTrace MakeTrace(std::vector<TraceBreakpoint> bp, double rtt_ms,
                       int queue, double loss, double duration_s = 30.0) {
  NetworkTrace t;
  t.breakpoints = std::move(bp);
  t.min_rtt_ms = rtt_ms;
  t.queue_capacity_packets = queue;
  t.random_loss_rate = loss;
  t.duration_s = duration_s;
  return t;
}

// Low bitrates offer almost no quality headroom under reference damage,
// which rewards policies that actually track capacity.
CodecProfile SteepProfile() {
  CodecProfile p = DefaultNvcProfile();
  for (size_t b = 0; b < p.bitrates_kbps.size(); ++b) {
    double base = 2.0 + 5.5 * std::log(p.bitrates_kbps[b] / 90.0);
    for (size_t l = 0; l < p.losses.size(); ++l)
      p.quality_db[b][l] = base * (1.0 - p.losses[l] * p.losses[l]);
  }
  p.label = "steep";
  p.Validate();
  return p;
}

CodecProfile ScaledProfile(double factor) {
  CodecProfile p = DefaultNvcProfile();
  for (auto& row : p.quality_db)
    for (double& q : row) q *= factor;
  p.label = "scaled";
  return p;
}

// The shared training environment: three fixed traces spanning flat, step
// and oscillating capacity, all with shallow-ish queues, plus two profiles.
std::vector<NetworkTrace> TrainingTraces() {
  return {
      MakeTrace({{0.0, 0.6}}, 40.0, 20, 0.12),
      MakeTrace({{0.0, 1.0}, {10.0, 0.5}, {20.0, 0.8}}, 50.0, 15, 0.15),
      MakeTrace({{0.0, 0.4}, {8.0, 1.2}, {16.0, 0.7}, {24.0, 1.0}}, 30.0, 25,
                0.10),
  };
}

std::vector<NetworkTrace> ValidationTraces() {
  return {
      MakeTrace({{0.0, 0.7}}, 40.0, 20, 0.12),
      MakeTrace({{0.0, 0.5}, {12.0, 1.1}}, 50.0, 18, 0.10),
      MakeTrace({{0.0, 1.2}, {10.0, 0.4}, {20.0, 0.9}}, 30.0, 22, 0.15),
      MakeTrace({{0.0, 0.45}, {15.0, 0.9}}, 60.0, 15, 0.12),
      MakeTrace({{0.0, 0.9}}, 35.0, 25, 0.15),
      MakeTrace({{0.0, 0.6}, {10.0, 1.0}, {20.0, 0.5}}, 45.0, 20, 0.12),
      MakeTrace({{0.0, 1.1}, {15.0, 0.6}}, 55.0, 18, 0.10),
      MakeTrace({{0.0, 0.5}}, 40.0, 15, 0.15),
  };
}

struct AgentRuns {
  std::vector<TrainResult> results;        // one per seed
  std::vector<double> convergence_steps;   // curve steps at convergence
  std::vector<double> final_nvc_rewards;   // final codec-aware validation
  std::vector<double> increase_shares;
};

AgentRuns TrainAgent(RewardKind kind, std::optional<SafeguardConfig> safeguard,
                     int64_t total_steps,
                     const std::vector<uint64_t>& seeds) {
  AgentRuns out;
  for (uint64_t seed : seeds) {
    TrainConfig cfg;
    cfg.reward.kind = kind;
    cfg.safeguard = safeguard;
    cfg.total_steps = total_steps;
    cfg.seed = seed;
    cfg.fixed_traces = TrainingTraces();
    cfg.profiles = {SteepProfile(), DefaultNvcProfile()};
    cfg.validation_traces = ValidationTraces();
    cfg.eval_interval_steps = 2500;
    cfg.ppo.learning_rate = 1e-3;
    cfg.ppo.entropy_coef = 0.0;
    cfg.ppo.value_coef = 0.05;
    cfg.ppo.discount = 0.8;
    cfg.ppo.gae_lambda = 0.9;
    cfg.ppo.rollout_steps = 2048;
    cfg.ppo.epochs = 16;
    cfg.ppo.minibatch = 128;
    TrainResult r = Train(cfg);

    std::vector<double> own;
    for (const CurvePoint& p : r.curve)
      own.push_back(p.validation_reward_nvc);
    auto idx = CheckConvergence(own, 0.10);
    out.convergence_steps.push_back(
        idx ? static_cast<double>(r.curve[*idx].steps)
            : static_cast<double>(total_steps));
    out.final_nvc_rewards.push_back(r.curve.back().validation_reward_nvc);
    out.increase_shares.push_back(r.increase_share());
    out.results.push_back(std::move(r));
  }
  return out;
}

int64_t FallbackSwitches(const std::vector<SwitchEvent>& switches) {
  int64_t n = 0;
  for (const SwitchEvent& s : switches)
    if (s.to == ControlMode::kFallback) ++n;
  return n;
}

std::string ReadAll(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  const std::vector<uint64_t> kSeeds{1, 2, 3};
  const int64_t kSteps = 50000;

  // Shared training runs feed criteria 1, 3 and 4.
  std::printf("training 3 agents x 3 seeds (%lld steps each)...\n",
              static_cast<long long>(kSteps));
  std::fflush(stdout);
  SafeguardConfig sg;
  sg.sensitivity = 1.0;
  sg.dwell_windows = 2;
  sg.switch_penalty = -500.0;  // matched to the network-reward scale
  AgentRuns nvc_agent = TrainAgent(RewardKind::kNvc, std::nullopt, kSteps,
                                   kSeeds);
  AgentRuns net_agent = TrainAgent(RewardKind::kNetwork, std::nullopt, kSteps,
                                   kSeeds);
  AgentRuns net_sg_agent = TrainAgent(RewardKind::kNetwork, sg, kSteps,
                                      kSeeds);

  // --- 1. Training efficiency: the codec-aware agent converges earliest and
  // ends with the highest codec-aware validation reward.
  {
    double conv_a = Median(nvc_agent.convergence_steps);
    double conv_b = Median(net_agent.convergence_steps);
    double conv_c = Median(net_sg_agent.convergence_steps);
    double fin_a = Median(nvc_agent.final_nvc_rewards);
    double fin_b = Median(net_agent.final_nvc_rewards);
    double fin_c = Median(net_sg_agent.final_nvc_rewards);
    bool pass = conv_a < conv_b && conv_a < conv_c && fin_a > fin_b &&
                fin_a > fin_c;
    Report(1, "codec-aware training converges faster and higher", pass,
           Fmt("median convergence steps a=%.0f b=%.0f c=%.0f; "
               "final codec-aware reward a=%.4f b=%.4f c=%.4f",
               conv_a, conv_b, conv_c, fin_a, fin_b, fin_c));
  }

  // --- 2. Safeguard activity: an untrained stochastic policy on a shallow
  // queue triggers frequent fallback.
  {
    NetworkTrace trace = MakeTrace({{0.0, 1.5}}, 50.0, 25, 0.0);
    PolicyNetwork fresh(7);
    auto rl = std::make_unique<RlController>(&fresh, 7, /*stochastic=*/true);
    SafeguardConfig cfg = sg;
    SafeguardController guard(std::move(rl), cfg);
    SessionConfig scfg;
    RunSession(trace, guard, DefaultNvcProfile(), scfg);
    int64_t switches = FallbackSwitches(guard.switches());
    double fallback_s = UsToMs(guard.fallback_time_us()) / 1000.0;
    bool pass = switches >= 50 && fallback_s >= 3.0;
    Report(2, "safeguard engages often for an untrained policy", pass,
           Fmt("%lld fallback switches, %.2f s cumulative fallback",
               static_cast<long long>(switches), fallback_s));
  }

  // --- 3. Action distribution: training under the safeguard leaves the
  // policy free to probe upward far more often.
  {
    double share_sg = Median(net_sg_agent.increase_shares);
    double share_plain = Median(nvc_agent.increase_shares);
    bool pass = share_sg >= 0.6 && share_plain <= share_sg - 0.1;
    Report(3, "safeguarded training probes upward more", pass,
           Fmt("increase share safeguarded=%.3f plain=%.3f", share_sg,
               share_plain));
  }

  // --- 4. QoE ordering on held-out traces: perfect knowledge beats the
  // codec-aware agent, which beats the other agents and the rule-based
  // controller in mean quality; the rule-based controller loses the least.
  {
    TraceGenParams gen;
    gen.bandwidth_mbps = {0.4, 1.5};
    gen.min_rtt_ms = {20.0, 80.0};
    gen.random_loss_rate = {0.08, 0.16};
    gen.queue_capacity_packets = {10.0, 40.0};
    gen.change_interval_s = {4.0, 12.0};
    std::vector<NetworkTrace> traces;
    for (int i = 0; i < 20; ++i) traces.push_back(GenerateTrace(gen, 5000 + i));
    std::vector<CodecProfile> profiles;
    for (double f : {1.0, 0.9, 0.95, 1.05, 1.1})
      profiles.push_back(ScaledProfile(f));

    // Per-agent nets: the seed with the best final validation reward.
    auto best_net = [](const AgentRuns& a) -> const PolicyNetwork& {
      size_t best = 0;
      for (size_t i = 1; i < a.results.size(); ++i)
        if (a.final_nvc_rewards[i] > a.final_nvc_rewards[best]) best = i;
      return a.results[best].net;
    };
    const PolicyNetwork& net_a = best_net(nvc_agent);
    const PolicyNetwork& net_b = best_net(net_agent);
    const PolicyNetwork& net_c = best_net(net_sg_agent);

    enum { kOracle, kNvcCc, kAurora, kOnrl, kGcc, kNumControllers };
    const char* names[] = {"oracle", "nvc-cc", "aurora", "onrl", "gcc"};
    std::vector<std::vector<double>> quality(kNumControllers);
    std::vector<std::vector<double>> loss(kNumControllers);
    for (const NetworkTrace& trace : traces) {
      for (const CodecProfile& profile : profiles) {
        for (int c = 0; c < kNumControllers; ++c) {
          std::unique_ptr<Controller> ctl;
          switch (c) {
            case kOracle:
              ctl = std::make_unique<OracleController>(trace);
              break;
            case kNvcCc:
              ctl = std::make_unique<RlController>(&net_a, 1, false);
              break;
            case kAurora:
              ctl = std::make_unique<RlController>(&net_b, 1, false);
              break;
            case kOnrl:
              ctl = std::make_unique<SafeguardController>(
                  std::make_unique<RlController>(&net_c, 1, false), sg);
              break;
            case kGcc:
              ctl = std::make_unique<GccLikeController>();
              break;
          }
          SessionConfig scfg;
          SessionLog log = RunSession(trace, *ctl, profile, scfg);
          QoEReport q = SessionQoE(log);
          quality[c].push_back(q.mean_quality_db);
          loss[c].push_back(q.loss_pct);
        }
      }
    }
    double mq[kNumControllers], ml[kNumControllers];
    for (int c = 0; c < kNumControllers; ++c) {
      mq[c] = Mean(quality[c]);
      ml[c] = Mean(loss[c]);
    }
    bool order = mq[kOracle] > mq[kNvcCc] && mq[kNvcCc] >= mq[kAurora] &&
                 mq[kNvcCc] >= mq[kOnrl] && mq[kNvcCc] >= mq[kGcc];
    bool gcc_loss = ml[kGcc] <= ml[kNvcCc] && ml[kGcc] <= ml[kAurora] &&
                    ml[kGcc] <= ml[kOnrl];
    std::string detail;
    for (int c = 0; c < kNumControllers; ++c)
      detail += Fmt("%s q=%.2f loss=%.2f%% ", names[c], mq[c], ml[c]);
    Report(4, "held-out QoE ordering", order && gcc_loss, detail);
  }

  // --- 5. Link invariants over one million randomized events.
  {
    std::mt19937_64 rng(20240915);
    std::uniform_int_distribution<int> size_dist(100, kMtuBytes);
    std::uniform_int_distribution<Micros> gap_dist(0, 3000);
    int64_t events = 0;
    int64_t violations = 0;
    for (int round = 0; round < 100; ++round) {
      NetworkTrace trace = MakeTrace({{0.0, 0.5 + 0.05 * round}},
                                     10.0 + round % 40,
                                     1 + static_cast<int>(rng() % 50),
                                     (round % 5) * 0.05, 1e6);
      BottleneckLink link(trace, rng());
      Micros now = 0;
      int64_t queued = 0, delivered = 0, sent = 0;
      Micros last_deliver = -1;
      int64_t last_id = -1;
      for (int i = 0; i < 10000; ++i) {
        now += gap_dist(rng);
        Packet pkt;
        pkt.id = i;
        pkt.size_bytes = size_dist(rng);
        pkt.enqueue_time_us = now;
        if (link.Enqueue(pkt, now) == EnqueueResult::kQueued) ++queued;
        ++sent;
        ++events;
        if (link.QueueOccupancy() > link.QueueCapacity()) ++violations;
        for (const Packet& p : link.Service(now)) {
          ++delivered;
          if (*p.deliver_time_us - p.enqueue_time_us < link.OwdUs())
            ++violations;
          if (p.id <= last_id || *p.deliver_time_us < last_deliver)
            ++violations;
          last_id = p.id;
          last_deliver = *p.deliver_time_us;
        }
      }
      for (const Packet& p : link.Service(now + 1000 * kMicrosPerSec)) {
        ++delivered;
        if (p.id <= last_id) ++violations;
        last_id = p.id;
      }
      if (delivered != queued) ++violations;
      if (sent != delivered + static_cast<int64_t>(link.drops().size()))
        ++violations;
    }
    Report(5, "link conservation/FIFO/delay-floor/queue-bound invariants",
           events >= 1000000 && violations == 0,
           Fmt("%lld events, %lld violations", static_cast<long long>(events),
               static_cast<long long>(violations)));
  }

  // --- 6. Analytic policy gradient matches central finite differences.
  {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      PolicyNetwork net(200 + trial);
      PpoHyper hyper;
      hyper.entropy_coef = 0.01;
      hyper.value_coef = 0.5;
      int n = 3 + static_cast<int>(rng() % 18);
      std::vector<PpoSample> batch(n);
      for (PpoSample& s : batch) {
        for (double& x : s.state) x = nd(rng);
        s.action = nd(rng);
        s.old_log_prob = GaussianLogProb(s.action, 0.3 * nd(rng),
                                         std::log(0.5) + 0.2 * nd(rng));
        s.advantage = nd(rng);
        s.ret = nd(rng);
      }
      std::vector<double> analytic = PpoGrad(net, batch, hyper);
      std::vector<double> numeric = PpoGradFiniteDiff(net, batch, hyper);
      for (size_t i = 0; i < analytic.size(); ++i) {
        double denom = std::max({1e-3, std::abs(analytic[i]),
                                 std::abs(numeric[i])});
        worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
      }
      (void)ud;
    }
    Report(6, "policy gradient vs finite differences", worst < 1e-4,
           Fmt("max relative error %.3g", worst));
  }

  // --- 7. Metric golden values.
  {
    bool pass = std::abs(SsimDb(0.9) - 10.0) <= 1e-9;
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> len_dist(1, 300);
    std::uniform_real_distribution<double> val_dist(-100.0, 100.0);
    for (int i = 0; i < 1000 && pass; ++i) {
      std::vector<double> vals(len_dist(rng));
      for (double& v : vals) v = val_dist(rng);
      std::vector<double> sorted = vals;
      std::sort(sorted.begin(), sorted.end());
      size_t rank = static_cast<size_t>(
          std::ceil(0.98 * static_cast<double>(sorted.size())));
      double expect = sorted[rank - 1];
      if (P98(vals) != expect) pass = false;
    }
    StallStats st = CountStalls({0.0, 40.0, 300.0}, 1.0);
    pass = pass && st.stalls == 1 &&
           std::abs(st.stalls_per_sec - 1.0) <= 1e-12 &&
           std::abs(st.stall_time_ratio - 0.06) <= 1e-12;
    Report(7, "metric golden values", pass,
           Fmt("ssim_db(0.9)=%.12f, p98 matches sort oracle, stalls=%d "
               "ratio=%.4f",
               SsimDb(0.9), st.stalls, st.stall_time_ratio));
  }

  // --- 8. Reward golden values.
  {
    RewardConfig cfg;
    double net = RewardNetwork({{1000.0, 0.1, 0.01}}, cfg);
    double nvc = RewardNvc({{0.8, 0.1}}, cfg);
    bool pass = std::abs(net - 119880.0) <= 1e-9 &&
                std::abs(nvc - 0.79) <= 1e-9;
    Report(8, "reward golden values", pass,
           Fmt("network=%.9f codec-aware=%.9f", net, nvc));
  }

  // --- 9. Default profile monotonicity and calibration anchor.
  {
    CodecProfile p = DefaultNvcProfile();
    bool mono = true;
    for (size_t b = 0; b < p.bitrates_kbps.size(); ++b)
      for (size_t l = 0; l + 1 < p.losses.size(); ++l)
        if (p.quality_db[b][l + 1] > p.quality_db[b][l] + 1e-12) mono = false;
    for (size_t l = 0; l < p.losses.size(); ++l)
      for (size_t b = 0; b + 1 < p.bitrates_kbps.size(); ++b)
        if (p.quality_db[b + 1][l] < p.quality_db[b][l] - 1e-12) mono = false;
    double anchor = p.QualityDb(1810.0, 0.10) - p.QualityDb(1068.0, 0.0);
    bool pass = mono && std::abs(anchor - 2.0) <= 0.2;
    Report(9, "profile monotonicity and 2 dB anchor", pass,
           Fmt("monotone=%s anchor=%.6f dB", mono ? "yes" : "no", anchor));
  }

  // --- 10. Deterministic evaluation: identical rerun with parallel workers
  // produces a byte-identical results CSV.
  {
    fs::path dir = fs::temp_directory_path() / "rtcc_acceptance";
    fs::create_directories(dir);
    fs::path ckpt = dir / "policy.json";
    nvc_agent.results[0].net.SaveCheckpoint(ckpt.string());

    ExperimentConfig cfg;
    cfg.controllers = {{"oracle", "oracle", "", {}},
                       {"gcc", "gcc", "", {}},
                       {"rl", "rl", ckpt.string(), {}}};
    cfg.gen_count = 4;
    cfg.gen_seed = 77;
    cfg.seeds = {1, 2};
    cfg.duration_s = 10.0;
    cfg.jobs = 3;
    cfg.out_dir = (dir / "out").string();
    cfg.write_session_logs = false;

    fs::path csv_a = dir / "results_a.csv";
    fs::path csv_b = dir / "results_b.csv";
    WriteResultsCsv(RunEvaluation(cfg), csv_a.string());
    WriteResultsCsv(RunEvaluation(cfg), csv_b.string());
    std::string a = ReadAll(csv_a);
    std::string b = ReadAll(csv_b);
    bool pass = !a.empty() && a == b;
    Report(10, "parallel evaluation rerun is byte-identical", pass,
           Fmt("%zu bytes each, %s", a.size(),
               a == b ? "identical" : "DIFFERENT"));
  }

  std::printf("%s (%d/10 criteria passed)\n",
              g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              10 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
