#include "rtcc/experiment.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rtcc/gcc_like.h"
#include "rtcc/oracle.h"
#include "rtcc/rl/rl_controller.h"
#include "rtcc/session.h"

namespace rtcc {

namespace fs = std::filesystem;

namespace {

Range RangeFromJson(const nlohmann::json& j, Range fallback) {
  if (j.is_null()) return fallback;
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

// Fixed-format double so rerun CSVs are byte-identical.
std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::unique_ptr<Controller> MakeController(const ControllerSpec& spec,
                                           const NetworkTrace& trace,
                                           const PolicyNetwork* net,
                                           uint64_t seed) {
  if (spec.kind == "oracle")
    return std::make_unique<OracleController>(trace);
  if (spec.kind == "gcc")
    return std::make_unique<GccLikeController>();
  if (spec.kind == "rl")
    return std::make_unique<RlController>(net, seed, /*stochastic=*/false);
  if (spec.kind == "rl-safeguard") {
    auto rl = std::make_unique<RlController>(net, seed, /*stochastic=*/false);
    return std::make_unique<SafeguardController>(std::move(rl),
                                                 spec.safeguard);
  }
  throw std::invalid_argument("unknown controller kind: " + spec.kind);
}

}  // namespace

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment config: " + path);
  nlohmann::json j = nlohmann::json::parse(in);

  ExperimentConfig cfg;
  for (const auto& c : j.at("controllers")) {
    ControllerSpec spec;
    spec.name = c.at("name");
    spec.kind = c.at("kind");
    spec.checkpoint = c.value("checkpoint", "");
    if (c.contains("safeguard")) {
      const auto& s = c.at("safeguard");
      spec.safeguard.sensitivity = s.value("sensitivity", 1.0);
      spec.safeguard.dwell_windows = s.value("dwell_windows", 2);
      spec.safeguard.switch_penalty = s.value("switch_penalty", -1.0);
    }
    cfg.controllers.push_back(spec);
  }
  if (j.contains("trace_paths"))
    cfg.trace_paths = j.at("trace_paths").get<std::vector<std::string>>();
  cfg.gen_count = j.value("gen_count", 0);
  cfg.gen_seed = j.value("gen_seed", 1);
  if (j.contains("gen")) {
    const auto& g = j.at("gen");
    cfg.gen.bandwidth_mbps =
        RangeFromJson(g.value("bandwidth_mbps", nlohmann::json()),
                      cfg.gen.bandwidth_mbps);
    cfg.gen.min_rtt_ms = RangeFromJson(g.value("min_rtt_ms", nlohmann::json()),
                                       cfg.gen.min_rtt_ms);
    cfg.gen.change_interval_s =
        RangeFromJson(g.value("change_interval_s", nlohmann::json()),
                      cfg.gen.change_interval_s);
    cfg.gen.random_loss_rate =
        RangeFromJson(g.value("random_loss_rate", nlohmann::json()),
                      cfg.gen.random_loss_rate);
    cfg.gen.queue_capacity_packets =
        RangeFromJson(g.value("queue_capacity_packets", nlohmann::json()),
                      cfg.gen.queue_capacity_packets);
    cfg.gen.duration_s = g.value("duration_s", cfg.gen.duration_s);
  }
  if (j.contains("profile_paths"))
    cfg.profile_paths = j.at("profile_paths").get<std::vector<std::string>>();
  if (j.contains("seeds"))
    cfg.seeds = j.at("seeds").get<std::vector<uint64_t>>();
  cfg.duration_s = j.value("duration_s", cfg.duration_s);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.jobs = j.value("jobs", cfg.jobs);
  cfg.write_session_logs = j.value("write_session_logs", cfg.write_session_logs);
  if (cfg.seeds.empty())
    throw std::invalid_argument("experiment config needs at least one seed");
  return cfg;
}

EvalResult RunEvaluation(const ExperimentConfig& config) {
  std::vector<NetworkTrace> traces;
  for (const std::string& p : config.trace_paths)
    traces.push_back(LoadTrace(p));
  for (int i = 0; i < config.gen_count; ++i)
    traces.push_back(GenerateTrace(config.gen, config.gen_seed + i));
  if (traces.empty())
    throw std::invalid_argument("evaluation needs at least one trace");

  std::vector<CodecProfile> profiles;
  for (const std::string& p : config.profile_paths)
    profiles.push_back(LoadProfile(p));
  if (profiles.empty()) profiles.push_back(DefaultNvcProfile());

  EvalResult result;

  // Load checkpoints up front; missing ones disqualify the controller.
  std::map<std::string, PolicyNetwork> nets;
  std::vector<ControllerSpec> active;
  for (const ControllerSpec& spec : config.controllers) {
    if (spec.kind == "rl" || spec.kind == "rl-safeguard") {
      if (!fs::exists(spec.checkpoint)) {
        result.missing_checkpoints.push_back(spec.name + ": " +
                                             spec.checkpoint);
        continue;
      }
      nets.emplace(spec.name, PolicyNetwork::LoadCheckpoint(spec.checkpoint));
    }
    active.push_back(spec);
  }

  struct Job {
    size_t controller, trace, profile, seed;
  };
  std::vector<Job> jobs;
  for (size_t c = 0; c < active.size(); ++c)
    for (size_t t = 0; t < traces.size(); ++t)
      for (size_t p = 0; p < profiles.size(); ++p)
        for (size_t s = 0; s < config.seeds.size(); ++s)
          jobs.push_back({c, t, p, s});

  fs::path sessions_dir = fs::path(config.out_dir) / "sessions";
  if (config.write_session_logs) fs::create_directories(sessions_dir);

  auto RunJob = [&](const Job& job) {
    const ControllerSpec& spec = active[job.controller];
    const NetworkTrace& trace = traces[job.trace];
    const CodecProfile& profile = profiles[job.profile];
    uint64_t seed = config.seeds[job.seed];

    const PolicyNetwork* net = nullptr;
    if (auto it = nets.find(spec.name); it != nets.end()) net = &it->second;

    auto controller = MakeController(spec, trace, net, seed);
    SessionConfig session;
    session.duration_s = config.duration_s;
    session.seed = seed;
    SessionLog log = RunSession(trace, *controller, profile, session);

    EvalRow row;
    row.controller = spec.name;
    row.trace = trace.label.empty() ? ("trace" + std::to_string(job.trace))
                                    : trace.label;
    row.profile = profile.label;
    row.seed = seed;
    row.qoe = SessionQoE(log);

    if (config.write_session_logs) {
      std::string base = spec.name + "_t" + std::to_string(job.trace) + "_p" +
                         std::to_string(job.profile) + "_s" +
                         std::to_string(seed);
      std::ofstream nd(sessions_dir / (base + ".ndjson"));
      WriteSessionNdjson(log, nd);
      std::ofstream fc(sessions_dir / (base + ".frames.csv"));
      WriteFrameCsv(log, fc);
    }
    return row;
  };

  int workers = std::max(1, config.jobs);
  result.rows.resize(jobs.size());
  if (workers == 1) {
    for (size_t i = 0; i < jobs.size(); ++i) result.rows[i] = RunJob(jobs[i]);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::future<void>> futures;
    for (int w = 0; w < workers; ++w) {
      futures.push_back(std::async(std::launch::async, [&] {
        for (size_t i = next.fetch_add(1); i < jobs.size();
             i = next.fetch_add(1))
          result.rows[i] = RunJob(jobs[i]);
      }));
    }
    for (auto& f : futures) f.get();
  }
  return result;
}

void WriteResultsCsv(const EvalResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write results: " + path);
  out << "controller,trace,profile,seed,mean_quality_db,p98_frame_delay_ms,"
         "stalls_per_sec,stall_time_ratio,tput_mbps,p98_packet_delay_ms,"
         "loss_pct,network_loss_pct\n";
  for (const EvalRow& r : result.rows) {
    const QoEReport& q = r.qoe;
    out << r.controller << "," << r.trace << "," << r.profile << "," << r.seed
        << "," << Num(q.mean_quality_db) << "," << Num(q.p98_frame_delay_ms)
        << "," << Num(q.stalls_per_sec) << "," << Num(q.stall_time_ratio)
        << "," << Num(q.tput_mbps) << "," << Num(q.p98_packet_delay_ms) << ","
        << Num(q.loss_pct) << "," << Num(q.network_loss_pct) << "\n";
  }
}

std::vector<EvalRow> LoadResultsCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results: " + path);
  std::vector<EvalRow> rows;
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty results file: " + path);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 12)
      throw std::runtime_error("malformed results row: " + line);
    EvalRow r;
    r.controller = fields[0];
    r.trace = fields[1];
    r.profile = fields[2];
    r.seed = std::stoull(fields[3]);
    r.qoe.mean_quality_db = std::stod(fields[4]);
    r.qoe.p98_frame_delay_ms = std::stod(fields[5]);
    r.qoe.stalls_per_sec = std::stod(fields[6]);
    r.qoe.stall_time_ratio = std::stod(fields[7]);
    r.qoe.tput_mbps = std::stod(fields[8]);
    r.qoe.p98_packet_delay_ms = std::stod(fields[9]);
    r.qoe.loss_pct = std::stod(fields[10]);
    r.qoe.network_loss_pct = std::stod(fields[11]);
    rows.push_back(r);
  }
  return rows;
}

void WriteSummaryCsv(const std::vector<EvalRow>& rows,
                     const std::string& path) {
  struct Acc {
    int n = 0;
    QoEReport sum;
    std::vector<double> qualities;
  };
  std::map<std::string, Acc> by_controller;
  for (const EvalRow& r : rows) {
    Acc& a = by_controller[r.controller];
    a.n += 1;
    a.sum.mean_quality_db += r.qoe.mean_quality_db;
    a.sum.p98_frame_delay_ms += r.qoe.p98_frame_delay_ms;
    a.sum.stalls_per_sec += r.qoe.stalls_per_sec;
    a.sum.stall_time_ratio += r.qoe.stall_time_ratio;
    a.sum.tput_mbps += r.qoe.tput_mbps;
    a.sum.p98_packet_delay_ms += r.qoe.p98_packet_delay_ms;
    a.sum.loss_pct += r.qoe.loss_pct;
    a.sum.network_loss_pct += r.qoe.network_loss_pct;
    a.qualities.push_back(r.qoe.mean_quality_db);
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary: " + path);
  out << "controller,sessions,mean_quality_db,p98_frame_delay_ms,"
         "stalls_per_sec,stall_time_ratio,tput_mbps,p98_packet_delay_ms,"
         "loss_pct,network_loss_pct,quality_p10,quality_p50,quality_p90\n";
  for (auto& [name, a] : by_controller) {
    std::sort(a.qualities.begin(), a.qualities.end());
    auto pct = [&](double f) {
      size_t i = std::min(a.qualities.size() - 1,
                          static_cast<size_t>(f * a.qualities.size()));
      return a.qualities[i];
    };
    out << name << "," << a.n << "," << Num(a.sum.mean_quality_db / a.n) << ","
        << Num(a.sum.p98_frame_delay_ms / a.n) << ","
        << Num(a.sum.stalls_per_sec / a.n) << ","
        << Num(a.sum.stall_time_ratio / a.n) << ","
        << Num(a.sum.tput_mbps / a.n) << ","
        << Num(a.sum.p98_packet_delay_ms / a.n) << ","
        << Num(a.sum.loss_pct / a.n) << "," << Num(a.sum.network_loss_pct / a.n)
        << "," << Num(pct(0.10)) << "," << Num(pct(0.50)) << ","
        << Num(pct(0.90)) << "\n";
  }
}

}  // namespace rtcc
