#ifndef RTCC_LINK_H_
#define RTCC_LINK_H_

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <vector>

#include "rtcc/trace.h"

namespace rtcc {

// Simulation clock is integer microseconds.
using Micros = int64_t;

constexpr Micros kMicrosPerMs = 1000;
constexpr Micros kMicrosPerSec = 1000000;

inline constexpr Micros MsToUs(double ms) {
  return static_cast<Micros>(ms * kMicrosPerMs + 0.5);
}
inline constexpr double UsToMs(Micros us) {
  return static_cast<double>(us) / kMicrosPerMs;
}

constexpr int kMtuBytes = 1200;  // RTP-ish payload per packet

enum class DropCause { kQueueOverflow, kRandomLoss };

struct Packet {
  int64_t id = 0;  // monotone per session
  int64_t frame_id = 0;
  int size_bytes = 0;
  Micros enqueue_time_us = 0;
  std::optional<Micros> deliver_time_us;
  std::optional<DropCause> drop_cause;
  bool retransmission = false;
};

enum class EnqueueResult { kQueued, kDroppedQueue, kDroppedRandom };

// Single bottleneck: bounded FIFO queue in front of a transmitter whose rate
// follows the trace's piecewise-constant bandwidth, then a fixed one-way
// propagation delay. Random loss is decided at enqueue, before admission.
class BottleneckLink {
 public:
  BottleneckLink(const NetworkTrace& trace, uint64_t seed);

  EnqueueResult Enqueue(Packet pkt, Micros now_us);

  // Completes every transmission finishing at or before `until_us` and
  // returns the delivered packets (deliver_time = departure + OWD).
  // `until_us` must not go backwards.
  std::vector<Packet> Service(Micros until_us);

  // Waiting packets plus the one in service, if any.
  int QueueOccupancy() const { return static_cast<int>(queue_.size()); }
  int QueueCapacity() const { return trace_.queue_capacity_packets; }
  Micros OwdUs() const { return owd_us_; }

  // Drops recorded at enqueue time (both causes).
  const std::vector<Packet>& drops() const { return drops_; }

 private:
  // Time at which `bits` finish serializing when transmission starts at
  // `start_us`, integrating the piecewise-constant bandwidth.
  Micros FinishTimeUs(Micros start_us, double bits) const;

  NetworkTrace trace_;
  Micros owd_us_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::deque<Packet> queue_;
  std::vector<Packet> drops_;
  Micros transmitter_free_us_ = 0;
  Micros last_serviced_us_ = 0;
};

}  // namespace rtcc

#endif  // RTCC_LINK_H_
