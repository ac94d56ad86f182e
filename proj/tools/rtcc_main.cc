// rtcc: batch tool for trace generation, policy training, evaluation
// matrices, and report/plot emission.
//
// Exit codes: 0 ok, 1 user/config/IO error, 2 internal error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rtcc/codec.h"
#include "rtcc/experiment.h"
#include "rtcc/rl/trainer.h"
#include "rtcc/svg_plot.h"
#include "rtcc/trace.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kOutRootEnv = "RTCC_OUT_ROOT";

// Relative output paths are resolved under $RTCC_OUT_ROOT when it is set.
fs::path ResolveOut(const std::string& out) {
  fs::path p(out);
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv(kOutRootEnv)) return fs::path(root) / p;
  return p;
}

void RequireWritable(const fs::path& target, bool force) {
  if (force || !fs::exists(target)) return;
  throw std::runtime_error("refusing to overwrite existing output '" +
                           target.string() + "' (use --force)");
}

rtcc::Range ParseRange(const std::string& text, const char* flag) {
  double lo, hi;
  char comma;
  std::istringstream in(text);
  if (!(in >> lo >> comma >> hi) || comma != ',')
    throw std::runtime_error(std::string(flag) + ": expected 'lo,hi', got '" +
                             text + "'");
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// gen-traces

int CmdGenTraces(int count, uint64_t seed, const std::string& out, bool force,
                 const std::map<std::string, std::string>& range_flags,
                 std::optional<double> duration) {
  rtcc::TraceGenParams params;
  if (auto it = range_flags.find("bandwidth"); it != range_flags.end())
    params.bandwidth_mbps = ParseRange(it->second, "--bandwidth");
  if (auto it = range_flags.find("rtt"); it != range_flags.end())
    params.min_rtt_ms = ParseRange(it->second, "--rtt");
  if (auto it = range_flags.find("interval"); it != range_flags.end())
    params.change_interval_s = ParseRange(it->second, "--interval");
  if (auto it = range_flags.find("loss"); it != range_flags.end())
    params.random_loss_rate = ParseRange(it->second, "--loss");
  if (auto it = range_flags.find("queue"); it != range_flags.end())
    params.queue_capacity_packets = ParseRange(it->second, "--queue");
  if (duration) params.duration_s = *duration;
  rtcc::ValidateTraceGenParams(params);

  fs::path dir = ResolveOut(out);
  fs::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "trace_%04d.txt", i);
    fs::path path = dir / name;
    RequireWritable(path, force);
    rtcc::NetworkTrace trace = rtcc::GenerateTrace(params, seed + i);
    trace.label = std::string(name, std::strlen(name) - 4);
    rtcc::SaveTrace(trace, path.string());
  }
  std::cout << "wrote " << count << " traces to " << dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

rtcc::TrainConfig LoadTrainConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open train config: " + path);
  json j = json::parse(in);

  rtcc::TrainConfig cfg;
  std::string kind = j.value("reward", "nvc");
  if (kind == "nvc")
    cfg.reward.kind = rtcc::RewardKind::kNvc;
  else if (kind == "network")
    cfg.reward.kind = rtcc::RewardKind::kNetwork;
  else
    throw std::runtime_error("train config: reward must be 'nvc' or "
                             "'network', got '" + kind + "'");

  if (j.contains("safeguard")) {
    const auto& s = j.at("safeguard");
    rtcc::SafeguardConfig sg;
    sg.sensitivity = s.value("sensitivity", sg.sensitivity);
    sg.dwell_windows = s.value("dwell_windows", sg.dwell_windows);
    sg.switch_penalty = s.value("switch_penalty", sg.switch_penalty);
    sg.threshold_floor_ms = s.value("threshold_floor_ms", sg.threshold_floor_ms);
    cfg.safeguard = sg;
  }

  cfg.total_steps = j.value("total_steps", cfg.total_steps);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.eval_interval_steps = j.value("eval_interval_steps",
                                    cfg.eval_interval_steps);
  cfg.num_validation_traces = j.value("num_validation_traces",
                                      cfg.num_validation_traces);
  cfg.validation_seed = j.value("validation_seed", cfg.validation_seed);

  if (j.contains("trace_paths"))
    for (const auto& p : j.at("trace_paths"))
      cfg.fixed_traces.push_back(rtcc::LoadTrace(p.get<std::string>()));
  if (j.contains("gen")) {
    const auto& g = j.at("gen");
    auto range = [&](const char* key, rtcc::Range fallback) {
      if (!g.contains(key)) return fallback;
      return rtcc::Range{g.at(key).at(0).get<double>(),
                         g.at(key).at(1).get<double>()};
    };
    cfg.env.bandwidth_mbps = range("bandwidth_mbps", cfg.env.bandwidth_mbps);
    cfg.env.min_rtt_ms = range("min_rtt_ms", cfg.env.min_rtt_ms);
    cfg.env.change_interval_s =
        range("change_interval_s", cfg.env.change_interval_s);
    cfg.env.random_loss_rate =
        range("random_loss_rate", cfg.env.random_loss_rate);
    cfg.env.queue_capacity_packets =
        range("queue_capacity_packets", cfg.env.queue_capacity_packets);
    cfg.env.duration_s = g.value("duration_s", cfg.env.duration_s);
  }
  rtcc::ValidateTraceGenParams(cfg.env);

  if (j.contains("profile_paths"))
    for (const auto& p : j.at("profile_paths"))
      cfg.profiles.push_back(rtcc::LoadProfile(p.get<std::string>()));
  if (cfg.profiles.empty()) cfg.profiles.push_back(rtcc::DefaultNvcProfile());

  if (j.contains("ppo")) {
    const auto& p = j.at("ppo");
    cfg.ppo.clip = p.value("clip", cfg.ppo.clip);
    cfg.ppo.discount = p.value("discount", cfg.ppo.discount);
    cfg.ppo.gae_lambda = p.value("gae_lambda", cfg.ppo.gae_lambda);
    cfg.ppo.learning_rate = p.value("learning_rate", cfg.ppo.learning_rate);
    cfg.ppo.epochs = p.value("epochs", cfg.ppo.epochs);
    cfg.ppo.minibatch = p.value("minibatch", cfg.ppo.minibatch);
    cfg.ppo.entropy_coef = p.value("entropy_coef", cfg.ppo.entropy_coef);
    cfg.ppo.value_coef = p.value("value_coef", cfg.ppo.value_coef);
    cfg.ppo.rollout_steps = p.value("rollout_steps", cfg.ppo.rollout_steps);
  }
  cfg.session.duration_s = j.value("duration_s", cfg.session.duration_s);
  return cfg;
}

int CmdTrain(const std::string& config_path, const std::string& out,
             bool force, bool resume) {
  rtcc::TrainConfig cfg = LoadTrainConfig(config_path);
  fs::path dir = ResolveOut(out);
  fs::create_directories(dir);
  fs::path checkpoint = dir / "checkpoint.json";
  fs::path curve_csv = dir / "curve.csv";
  fs::path switches_csv = dir / "switches.csv";
  fs::path actions_csv = dir / "actions.csv";

  bool continuing = resume && fs::exists(checkpoint) && fs::exists(curve_csv);
  if (continuing) {
    cfg.resume_net = rtcc::PolicyNetwork::LoadCheckpoint(checkpoint.string());
    auto prior = rtcc::LoadCurveCsv(curve_csv.string());
    if (!prior.empty()) cfg.resume_steps = prior.back().steps;
  } else {
    RequireWritable(checkpoint, force);
    RequireWritable(curve_csv, force);
  }

  rtcc::TrainResult result = rtcc::Train(cfg, [](const rtcc::CurvePoint& p) {
    std::cout << "steps=" << p.steps << " wall_s=" << p.wall_seconds
              << " val_reward=" << p.validation_reward
              << " val_reward_nvc=" << p.validation_reward_nvc
              << " switches=" << p.mode_switches << std::endl;
  });

  result.net.SaveCheckpoint(checkpoint.string());
  rtcc::SaveCurveCsv(result.curve, curve_csv.string(), continuing);

  {
    std::ofstream sw(switches_csv, continuing ? std::ios::app : std::ios::trunc);
    if (!continuing) sw << "steps_done,switch_count,fallback_time_s\n";
    sw << result.steps_done << "," << result.switch_count << ","
       << result.fallback_time_us / 1e6 << "\n";
  }
  {
    std::ofstream ac(actions_csv, continuing ? std::ios::app : std::ios::trunc);
    if (!continuing) ac << "action\n";
    ac.precision(9);
    for (double a : result.action_samples) ac << a << "\n";
  }

  std::cout << "trained to " << result.steps_done << " steps; checkpoint at "
            << checkpoint.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

int CmdEval(const std::string& config_path, const std::string& out_override,
            bool force, int jobs_override) {
  rtcc::ExperimentConfig cfg = rtcc::LoadExperimentConfig(config_path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  cfg.out_dir = ResolveOut(cfg.out_dir).string();
  if (jobs_override > 0) cfg.jobs = jobs_override;

  fs::create_directories(cfg.out_dir);
  fs::path results_csv = fs::path(cfg.out_dir) / "results.csv";
  fs::path summary_csv = fs::path(cfg.out_dir) / "summary.csv";
  RequireWritable(results_csv, force);

  rtcc::EvalResult result = rtcc::RunEvaluation(cfg);
  rtcc::WriteResultsCsv(result, results_csv.string());
  rtcc::WriteSummaryCsv(result.rows, summary_csv.string());

  std::cout << result.rows.size() << " sessions -> " << results_csv.string()
            << "\n";
  if (!result.missing_checkpoints.empty()) {
    for (const std::string& m : result.missing_checkpoints)
      std::cerr << "missing checkpoint, controller skipped: " << m << "\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// report

std::pair<std::string, std::string> SplitNamed(const std::string& arg,
                                               const char* flag) {
  auto eq = arg.find('=');
  if (eq == std::string::npos)
    throw std::runtime_error(std::string(flag) + ": expected NAME=PATH, got '" +
                             arg + "'");
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

int CmdReport(const std::string& results_path,
              const std::vector<std::string>& curve_args,
              const std::vector<std::string>& action_args,
              const std::string& out, bool force) {
  fs::path dir = ResolveOut(out);
  fs::create_directories(dir);

  fs::path summary_path = dir / "report.txt";
  RequireWritable(summary_path, force);

  std::vector<rtcc::EvalRow> rows;
  if (!results_path.empty()) rows = rtcc::LoadResultsCsv(results_path);

  std::ofstream summary(summary_path);
  summary << "sessions: " << rows.size() << "\n";

  if (!rows.empty()) {
    struct Acc {
      int n = 0;
      double quality = 0, loss = 0, tput = 0, delay = 0;
    };
    std::map<std::string, Acc> by_controller;
    for (const rtcc::EvalRow& r : rows) {
      Acc& a = by_controller[r.controller];
      a.n++;
      a.quality += r.qoe.mean_quality_db;
      a.loss += r.qoe.loss_pct;
      a.tput += r.qoe.tput_mbps;
      a.delay += r.qoe.p98_frame_delay_ms;
    }
    std::vector<std::string> metric_names = {"quality_db", "loss_pct",
                                             "tput_mbps", "p98_delay_ms"};
    std::vector<rtcc::BarGroup> groups;
    for (const auto& [name, a] : by_controller) {
      groups.push_back({name,
                        {a.quality / a.n, a.loss / a.n, a.tput / a.n,
                         a.delay / a.n}});
      summary << name << ": quality_db=" << a.quality / a.n
              << " loss_pct=" << a.loss / a.n << " tput_mbps=" << a.tput / a.n
              << " p98_delay_ms=" << a.delay / a.n << " (n=" << a.n << ")\n";
    }
    fs::path bars = dir / "qoe_bars.svg";
    RequireWritable(bars, force);
    rtcc::WriteBarPlot(bars.string(),
                       {"Per-controller session means", "controller", "value"},
                       metric_names, groups);
  }

  if (!curve_args.empty()) {
    std::vector<rtcc::PlotSeries> curves;
    std::vector<rtcc::PlotSeries> scatter;
    rtcc::PlotSeries dots{"final reward vs convergence time", {}};
    for (const std::string& arg : curve_args) {
      auto [name, path] = SplitNamed(arg, "--curve");
      auto curve = rtcc::LoadCurveCsv(path);
      rtcc::PlotSeries s{name, {}};
      std::vector<double> vals;
      for (const auto& p : curve) {
        s.points.emplace_back(p.wall_seconds, p.validation_reward);
        vals.push_back(p.validation_reward);
      }
      curves.push_back(std::move(s));
      if (auto idx = rtcc::CheckConvergence(vals); idx && !curve.empty()) {
        dots.points.emplace_back(curve[*idx].wall_seconds,
                                 curve.back().validation_reward_nvc);
        summary << "curve " << name << ": converged at step "
                << curve[*idx].steps << " (" << curve[*idx].wall_seconds
                << " s)\n";
      } else {
        summary << "curve " << name << ": no convergence point\n";
      }
    }
    fs::path lc = dir / "learning_curves.svg";
    RequireWritable(lc, force);
    rtcc::WriteLinePlot(lc.string(),
                        {"Validation reward over training", "wall time (s)",
                         "validation reward"},
                        curves);
    scatter.push_back(std::move(dots));
    fs::path sc = dir / "convergence_scatter.svg";
    RequireWritable(sc, force);
    rtcc::WriteScatterPlot(sc.string(),
                           {"Final reward vs time to convergence",
                            "convergence wall time (s)", "final reward"},
                           scatter);
  }

  if (!action_args.empty()) {
    std::vector<std::pair<std::string, std::vector<double>>> sets;
    for (const std::string& arg : action_args) {
      auto [name, path] = SplitNamed(arg, "--actions");
      std::ifstream in(path);
      if (!in) throw std::runtime_error("cannot open actions file: " + path);
      std::string line;
      std::getline(in, line);  // header
      std::vector<double> samples;
      while (std::getline(in, line))
        if (!line.empty()) samples.push_back(std::stod(line));
      sets.emplace_back(name, std::move(samples));
    }
    fs::path cdf = dir / "action_cdf.svg";
    RequireWritable(cdf, force);
    rtcc::WriteCdfPlot(cdf.string(),
                       {"Action CDF", "action", "cumulative fraction"}, sets);
  }

  std::cout << "report written to " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate-control simulation toolkit"};
  app.require_subcommand(1);

  // gen-traces
  auto* gen = app.add_subcommand("gen-traces", "Generate synthetic traces");
  int gen_count = 10;
  uint64_t gen_seed = 1;
  std::string gen_out = "traces";
  bool gen_force = false;
  std::string bw, rtt, interval, loss, queue;
  double gen_duration = -1;
  gen->add_option("--count", gen_count, "Number of traces");
  gen->add_option("--seed", gen_seed, "Base seed (trace i uses seed+i)");
  gen->add_option("--out", gen_out, "Output directory");
  gen->add_option("--bandwidth", bw, "Bandwidth range 'lo,hi' (Mbps)");
  gen->add_option("--rtt", rtt, "Min RTT range 'lo,hi' (ms)");
  gen->add_option("--interval", interval, "Change-interval range 'lo,hi' (s)");
  gen->add_option("--loss", loss, "Random-loss range 'lo,hi' (fraction)");
  gen->add_option("--queue", queue, "Queue-capacity range 'lo,hi' (packets)");
  gen->add_option("--duration", gen_duration, "Trace duration (s)");
  gen->add_flag("--force", gen_force, "Overwrite existing files");

  // train
  auto* train = app.add_subcommand("train", "Train a rate-control policy");
  std::string train_config, train_out = "train";
  bool train_force = false, train_resume = false;
  train->add_option("--config", train_config, "Train config JSON")->required();
  train->add_option("--out", train_out, "Output directory");
  train->add_flag("--force", train_force, "Overwrite existing outputs");
  train->add_flag("--resume", train_resume,
                  "Continue from an existing checkpoint in --out");

  // eval
  auto* eval = app.add_subcommand("eval", "Run an evaluation matrix");
  std::string eval_config, eval_out;
  bool eval_force = false;
  int eval_jobs = 0;
  eval->add_option("--config", eval_config, "Experiment config JSON")
      ->required();
  eval->add_option("--out", eval_out, "Output directory (overrides config)");
  eval->add_option("--jobs", eval_jobs, "Worker count (overrides config)");
  eval->add_flag("--force", eval_force, "Overwrite existing outputs");

  // report
  auto* report = app.add_subcommand("report", "Emit summary and SVG plots");
  std::string rep_results, rep_out = "report";
  std::vector<std::string> rep_curves, rep_actions;
  bool rep_force = false;
  report->add_option("--results", rep_results, "results.csv from eval");
  report->add_option("--curve", rep_curves,
                     "NAME=curve.csv from train (repeatable)");
  report->add_option("--actions", rep_actions,
                     "NAME=actions.csv from train (repeatable)");
  report->add_option("--out", rep_out, "Output directory");
  report->add_flag("--force", rep_force, "Overwrite existing outputs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      std::map<std::string, std::string> ranges;
      if (!bw.empty()) ranges["bandwidth"] = bw;
      if (!rtt.empty()) ranges["rtt"] = rtt;
      if (!interval.empty()) ranges["interval"] = interval;
      if (!loss.empty()) ranges["loss"] = loss;
      if (!queue.empty()) ranges["queue"] = queue;
      std::optional<double> duration;
      if (gen_duration > 0) duration = gen_duration;
      return CmdGenTraces(gen_count, gen_seed, gen_out, gen_force, ranges,
                          duration);
    }
    if (train->parsed())
      return CmdTrain(train_config, train_out, train_force, train_resume);
    if (eval->parsed())
      return CmdEval(eval_config, eval_out, eval_force, eval_jobs);
    if (report->parsed())
      return CmdReport(rep_results, rep_curves, rep_actions, rep_out,
                       rep_force);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
