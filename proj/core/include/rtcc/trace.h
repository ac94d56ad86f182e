#ifndef RTCC_TRACE_H_
#define RTCC_TRACE_H_

#include <cstdint>
#include <string>
#include <vector>

namespace rtcc {

struct TraceBreakpoint {
  double time_s = 0.0;
  double bandwidth_mbps = 0.0;
  friend bool operator==(const TraceBreakpoint&,
                         const TraceBreakpoint&) = default;
};

// Piecewise-constant bandwidth timeline plus the per-trace link scalars.
// Segments are left-closed, right-open; the last segment extends to the
// trace duration (and beyond, for callers that run past it).
struct NetworkTrace {
  std::vector<TraceBreakpoint> breakpoints;  // sorted, first at time 0
  double duration_s = 30.0;
  double min_rtt_ms = 40.0;
  double random_loss_rate = 0.0;       // [0, 0.05] for generated traces
  int queue_capacity_packets = 50;     // [1, 100] for generated traces
  std::string label;

  // Throws std::out_of_range for t outside [0, duration_s].
  double BandwidthAtMbps(double t_s) const;
  double OwdMs() const { return min_rtt_ms / 2.0; }

  friend bool operator==(const NetworkTrace&, const NetworkTrace&) = default;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

// Sampling ranges for synthetic trace generation. Defaults match the
// parameter table used for training/testing trace synthesis.
struct TraceGenParams {
  Range bandwidth_mbps{0.6, 6.0};
  Range min_rtt_ms{2.0, 200.0};
  Range change_interval_s{0.0, 15.0};  // open at 0
  Range random_loss_rate{0.0, 0.05};
  Range queue_capacity_packets{1.0, 100.0};
  double duration_s = 30.0;
};

// Throws std::invalid_argument on inverted/invalid ranges or duration <= 0.
void ValidateTraceGenParams(const TraceGenParams& params);

// All parameters drawn uniformly from their ranges; bandwidth segments are
// piecewise constant with uniformly drawn lengths. Deterministic per seed.
NetworkTrace GenerateTrace(const TraceGenParams& params, uint64_t seed);

// Text format: one "time_s bandwidth_mbps" breakpoint per line. Scalars go
// into a JSON sidecar at path + ".meta.json".
void SaveTrace(const NetworkTrace& trace, const std::string& path);
NetworkTrace LoadTrace(const std::string& path);

}  // namespace rtcc

#endif  // RTCC_TRACE_H_
