#ifndef RTCC_EXPERIMENT_H_
#define RTCC_EXPERIMENT_H_

#include <optional>
#include <string>
#include <vector>

#include "rtcc/codec.h"
#include "rtcc/metrics.h"
#include "rtcc/safeguard.h"
#include "rtcc/trace.h"

namespace rtcc {

struct ControllerSpec {
  std::string name;
  // "oracle" | "gcc" | "rl" | "rl-safeguard"
  std::string kind;
  std::string checkpoint;  // rl kinds only
  SafeguardConfig safeguard;  // rl-safeguard only
};

struct ExperimentConfig {
  std::vector<ControllerSpec> controllers;
  // Trace source: explicit files, or `gen_count` generated traces.
  std::vector<std::string> trace_paths;
  TraceGenParams gen;
  int gen_count = 0;
  uint64_t gen_seed = 1;
  // Profile source: explicit files; empty means the built-in default.
  std::vector<std::string> profile_paths;
  std::vector<uint64_t> seeds{1};
  double duration_s = 30.0;
  std::string out_dir = "out";
  int jobs = 1;
  bool write_session_logs = true;
};

ExperimentConfig LoadExperimentConfig(const std::string& path);

struct EvalRow {
  std::string controller;
  std::string trace;
  std::string profile;
  uint64_t seed = 0;
  QoEReport qoe;
};

struct EvalResult {
  std::vector<EvalRow> rows;
  std::vector<std::string> missing_checkpoints;
};

// Full cross product controllers x traces x profiles x seeds, fanned out over
// `jobs` workers and merged in deterministic order. Controllers whose
// checkpoint is missing are skipped and reported.
EvalResult RunEvaluation(const ExperimentConfig& config);

// results.csv with one row per session; byte-stable for fixed inputs.
void WriteResultsCsv(const EvalResult& result, const std::string& path);
std::vector<EvalRow> LoadResultsCsv(const std::string& path);

// Per-controller means plus quality CDF points.
void WriteSummaryCsv(const std::vector<EvalRow>& rows, const std::string& path);

}  // namespace rtcc

#endif  // RTCC_EXPERIMENT_H_
