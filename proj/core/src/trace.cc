#include "rtcc/trace.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rtcc {

double NetworkTrace::BandwidthAtMbps(double t_s) const {
  if (breakpoints.empty()) throw std::out_of_range("trace has no breakpoints");
  if (t_s < 0.0 || t_s > duration_s)
    throw std::out_of_range("bandwidth_at: t outside [0, duration]");
  // First breakpoint whose time is > t; the active segment is the one before.
  auto it = std::upper_bound(
      breakpoints.begin(), breakpoints.end(), t_s,
      [](double t, const TraceBreakpoint& bp) { return t < bp.time_s; });
  if (it == breakpoints.begin())
    throw std::out_of_range("bandwidth_at: t precedes first breakpoint");
  return std::prev(it)->bandwidth_mbps;
}

namespace {

void CheckRange(const Range& r, const char* name, double lo_bound) {
  if (!(r.lo <= r.hi))
    throw std::invalid_argument(std::string("inverted range: ") + name);
  if (r.lo < lo_bound)
    throw std::invalid_argument(std::string("negative range: ") + name);
}

double Draw(std::mt19937_64& rng, const Range& r) {
  if (r.lo == r.hi) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

}  // namespace

void ValidateTraceGenParams(const TraceGenParams& params) {
  CheckRange(params.bandwidth_mbps, "bandwidth_mbps", 0.0);
  CheckRange(params.min_rtt_ms, "min_rtt_ms", 0.0);
  CheckRange(params.change_interval_s, "change_interval_s", 0.0);
  CheckRange(params.random_loss_rate, "random_loss_rate", 0.0);
  CheckRange(params.queue_capacity_packets, "queue_capacity_packets", 1.0);
  if (params.random_loss_rate.hi > 1.0)
    throw std::invalid_argument("random_loss_rate > 1");
  if (params.duration_s <= 0.0) throw std::invalid_argument("duration <= 0");
}

NetworkTrace GenerateTrace(const TraceGenParams& params, uint64_t seed) {
  ValidateTraceGenParams(params);
  std::mt19937_64 rng(seed);

  NetworkTrace trace;
  trace.duration_s = params.duration_s;
  trace.min_rtt_ms = Draw(rng, params.min_rtt_ms);
  trace.random_loss_rate = Draw(rng, params.random_loss_rate);
  trace.queue_capacity_packets =
      static_cast<int>(std::lround(Draw(rng, params.queue_capacity_packets)));
  trace.label = "gen-" + std::to_string(seed);

  double t = 0.0;
  while (t < params.duration_s) {
    trace.breakpoints.push_back({t, Draw(rng, params.bandwidth_mbps)});
    double interval = Draw(rng, params.change_interval_s);
    // A zero draw would stall the sweep; the interval range is open at 0.
    t += std::max(interval, 1e-3);
  }
  return trace;
}

void SaveTrace(const NetworkTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << std::setprecision(17);
  for (const auto& bp : trace.breakpoints)
    out << bp.time_s << " " << bp.bandwidth_mbps << "\n";

  nlohmann::json meta = {
      {"duration_s", trace.duration_s},
      {"min_rtt_ms", trace.min_rtt_ms},
      {"random_loss_rate", trace.random_loss_rate},
      {"queue_capacity_packets", trace.queue_capacity_packets},
      {"label", trace.label},
  };
  std::ofstream side(path + ".meta.json");
  if (!side) throw std::runtime_error("cannot write sidecar for: " + path);
  side << meta.dump(2) << "\n";
}

NetworkTrace LoadTrace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);

  NetworkTrace trace;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    TraceBreakpoint bp;
    if (!(ls >> bp.time_s >> bp.bandwidth_mbps))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed breakpoint line");
    if (!trace.breakpoints.empty() &&
        bp.time_s <= trace.breakpoints.back().time_s)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": breakpoint times must strictly increase");
    trace.breakpoints.push_back(bp);
  }
  if (trace.breakpoints.empty())
    throw std::runtime_error(path + ": empty trace file");
  if (trace.breakpoints.front().time_s != 0.0)
    throw std::runtime_error(path + ": first breakpoint must be at time 0");

  std::ifstream side(path + ".meta.json");
  if (side) {
    nlohmann::json meta = nlohmann::json::parse(side);
    trace.duration_s = meta.value("duration_s", trace.duration_s);
    trace.min_rtt_ms = meta.value("min_rtt_ms", trace.min_rtt_ms);
    trace.random_loss_rate =
        meta.value("random_loss_rate", trace.random_loss_rate);
    trace.queue_capacity_packets =
        meta.value("queue_capacity_packets", trace.queue_capacity_packets);
    trace.label = meta.value("label", trace.label);
  } else {
    trace.duration_s =
        std::max(trace.duration_s, trace.breakpoints.back().time_s);
  }
  return trace;
}

}  // namespace rtcc
