#include "doctest.h"

#include <random>

#include "rtcc/link.h"

using namespace rtcc;

namespace {

NetworkTrace FlatTrace(double mbps, double min_rtt_ms = 20.0,
                       int queue = 50, double loss = 0.0) {
  NetworkTrace t;
  t.breakpoints = {{0.0, mbps}};
  t.duration_s = 1000.0;
  t.min_rtt_ms = min_rtt_ms;
  t.queue_capacity_packets = queue;
  t.random_loss_rate = loss;
  return t;
}

Packet MakePacket(int64_t id, int bytes, Micros t) {
  Packet p;
  p.id = id;
  p.size_bytes = bytes;
  p.enqueue_time_us = t;
  return p;
}

}  // namespace

TEST_CASE("1250-byte packet at 1 Mbps with 10 ms propagation") {
  // 1250 B = 10000 bits; at 1 Mbps that is 10 ms of serialization, so the
  // packet departs at 10 ms and arrives one propagation delay later at 20 ms.
  BottleneckLink link(FlatTrace(1.0, /*min_rtt_ms=*/20.0), 1);
  CHECK(link.Enqueue(MakePacket(0, 1250, 0), 0) == EnqueueResult::kQueued);
  auto delivered = link.Service(100 * kMicrosPerMs);
  REQUIRE(delivered.size() == 1);
  CHECK(*delivered[0].deliver_time_us == 20 * kMicrosPerMs);
}

TEST_CASE("back-to-back packets are spaced by one serialization time") {
  BottleneckLink link(FlatTrace(2.0), 1);
  link.Enqueue(MakePacket(0, kMtuBytes, 0), 0);
  link.Enqueue(MakePacket(1, kMtuBytes, 0), 0);
  auto delivered = link.Service(kMicrosPerSec);
  REQUIRE(delivered.size() == 2);
  // 1200 B = 9600 bits at 2 Mbps -> 4800 us per packet.
  CHECK(*delivered[1].deliver_time_us - *delivered[0].deliver_time_us == 4800);
}

TEST_CASE("bandwidth change mid-packet integrates both segments") {
  // 1 Mbps until t=1 s, then 2 Mbps. A 1500 B (12000 bit) packet starting at
  // t=999500 us serializes 500 bits in the first segment and the remaining
  // 11500 bits at 2 bits/us: finish at 999500 + 500 + 5750 = 1005750 us.
  NetworkTrace t = FlatTrace(1.0);
  t.breakpoints = {{0.0, 1.0}, {1.0, 2.0}};
  BottleneckLink link(t, 1);
  link.Enqueue(MakePacket(0, 1500, 999500), 999500);
  auto delivered = link.Service(2 * kMicrosPerSec);
  REQUIRE(delivered.size() == 1);
  CHECK(*delivered[0].deliver_time_us == 1005750 + link.OwdUs());
}

TEST_CASE("servicing an empty queue delivers nothing") {
  BottleneckLink link(FlatTrace(1.0), 1);
  CHECK(link.Service(kMicrosPerSec).empty());
}

TEST_CASE("service time cannot go backwards") {
  BottleneckLink link(FlatTrace(1.0), 1);
  link.Service(1000);
  CHECK_THROWS(link.Service(500));
}

TEST_CASE("queue overflow drops the arriving packet") {
  BottleneckLink link(FlatTrace(0.1, 20.0, /*queue=*/1), 1);
  CHECK(link.Enqueue(MakePacket(0, kMtuBytes, 0), 0) == EnqueueResult::kQueued);
  CHECK(link.Enqueue(MakePacket(1, kMtuBytes, 0), 0) ==
        EnqueueResult::kDroppedQueue);
  REQUIRE(link.drops().size() == 1);
  CHECK(link.drops()[0].drop_cause == DropCause::kQueueOverflow);
}

TEST_CASE("random loss extremes") {
  BottleneckLink lossless(FlatTrace(1.0, 20.0, 50, 0.0), 1);
  for (int i = 0; i < 200; ++i)
    CHECK(lossless.Enqueue(MakePacket(i, 100, i), i) != EnqueueResult::kDroppedRandom);

  BottleneckLink lossy(FlatTrace(1.0, 20.0, 50, 1.0), 1);
  for (int i = 0; i < 200; ++i)
    CHECK(lossy.Enqueue(MakePacket(i, 100, i), i) == EnqueueResult::kDroppedRandom);
}

TEST_CASE("randomized enqueue/service upholds the core link invariants") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size_dist(100, kMtuBytes);
  std::uniform_int_distribution<Micros> gap_dist(0, 3000);

  for (int round = 0; round < 20; ++round) {
    double mbps = 0.5 + 0.3 * round;
    int capacity = 1 + static_cast<int>(rng() % 40);
    double loss = (round % 4) * 0.05;
    NetworkTrace trace = FlatTrace(mbps, 10.0 + round, capacity, loss);
    BottleneckLink link(trace, rng());

    Micros now = 0;
    int64_t sent = 0, queued = 0, delivered = 0;
    Micros last_deliver = -1;
    int64_t last_id = -1;
    for (int i = 0; i < 2000; ++i) {
      now += gap_dist(rng);
      EnqueueResult r = link.Enqueue(MakePacket(i, size_dist(rng), now), now);
      ++sent;
      if (r == EnqueueResult::kQueued) ++queued;
      // Queue bound holds at every event.
      CHECK(link.QueueOccupancy() <= link.QueueCapacity());
      for (const Packet& p : link.Service(now)) {
        ++delivered;
        // Delay floor: one-way delay is at least the propagation delay.
        CHECK(*p.deliver_time_us - p.enqueue_time_us >= link.OwdUs());
        // FIFO: ids and delivery times are both monotone.
        CHECK(p.id > last_id);
        CHECK(*p.deliver_time_us >= last_deliver);
        last_id = p.id;
        last_deliver = *p.deliver_time_us;
      }
    }
    for (const Packet& p : link.Service(now + 100 * kMicrosPerSec)) {
      ++delivered;
      CHECK(p.id > last_id);
      last_id = p.id;
    }
    // Conservation: everything queued was eventually delivered; everything
    // else was recorded as a drop.
    CHECK(delivered == queued);
    CHECK(sent == delivered + static_cast<int64_t>(link.drops().size()));
  }
}
