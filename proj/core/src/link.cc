#include "rtcc/link.h"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rtcc {

BottleneckLink::BottleneckLink(const NetworkTrace& trace, uint64_t seed)
    : trace_(trace), owd_us_(MsToUs(trace.OwdMs())), rng_(seed) {
  if (trace_.breakpoints.empty())
    throw std::invalid_argument("link needs a non-empty trace");
  if (trace_.queue_capacity_packets < 1)
    throw std::invalid_argument("queue capacity must be >= 1");
}

EnqueueResult BottleneckLink::Enqueue(Packet pkt, Micros now_us) {
  pkt.enqueue_time_us = now_us;
  if (trace_.random_loss_rate > 0.0 &&
      uniform_(rng_) < trace_.random_loss_rate) {
    pkt.drop_cause = DropCause::kRandomLoss;
    drops_.push_back(pkt);
    return EnqueueResult::kDroppedRandom;
  }
  if (QueueOccupancy() >= trace_.queue_capacity_packets) {
    pkt.drop_cause = DropCause::kQueueOverflow;
    drops_.push_back(pkt);
    return EnqueueResult::kDroppedQueue;
  }
  queue_.push_back(pkt);
  return EnqueueResult::kQueued;
}

Micros BottleneckLink::FinishTimeUs(Micros start_us, double bits) const {
  // bandwidth_mbps is conveniently bits-per-microsecond.
  double t_us = static_cast<double>(start_us);
  double remaining = bits;
  size_t seg = trace_.breakpoints.size() - 1;
  for (size_t i = 0; i + 1 < trace_.breakpoints.size(); ++i) {
    if (t_us < trace_.breakpoints[i + 1].time_s * kMicrosPerSec) {
      seg = i;
      break;
    }
  }
  while (true) {
    double rate = trace_.breakpoints[seg].bandwidth_mbps;
    double seg_end_us = (seg + 1 < trace_.breakpoints.size())
                            ? trace_.breakpoints[seg + 1].time_s * kMicrosPerSec
                            : std::numeric_limits<double>::infinity();
    if (rate > 0.0) {
      double capacity = rate * (seg_end_us - t_us);
      if (remaining <= capacity)
        return static_cast<Micros>(std::ceil(t_us + remaining / rate));
      remaining -= capacity;
    }
    if (seg + 1 >= trace_.breakpoints.size()) {
      // Last segment with zero rate: the packet never finishes.
      return std::numeric_limits<Micros>::max();
    }
    t_us = seg_end_us;
    ++seg;
  }
}

std::vector<Packet> BottleneckLink::Service(Micros until_us) {
  if (until_us < last_serviced_us_)
    throw std::invalid_argument("service time went backwards");
  std::vector<Packet> delivered;
  while (!queue_.empty()) {
    const Packet& head = queue_.front();
    Micros start = std::max(transmitter_free_us_, head.enqueue_time_us);
    Micros finish = FinishTimeUs(start, 8.0 * head.size_bytes);
    if (finish > until_us) break;
    Packet out = head;
    queue_.pop_front();
    transmitter_free_us_ = finish;
    out.deliver_time_us = finish + owd_us_;
    delivered.push_back(out);
  }
  last_serviced_us_ = until_us;
  return delivered;
}

}  // namespace rtcc
