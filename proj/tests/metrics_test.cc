#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rtcc/metrics.h"

using namespace rtcc;

TEST_CASE("ssim to dB mapping goldens") {
  CHECK(SsimDb(0.9) == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(SsimDb(0.99) == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(SsimDb(0.0) == 0.0);
  CHECK_THROWS_AS(SsimDb(1.0), std::invalid_argument);
  CHECK_THROWS_AS(SsimDb(-0.1), std::invalid_argument);
}

TEST_CASE("ssim to dB is strictly increasing") {
  double prev = -1.0;
  for (double s = 0.0; s < 1.0; s += 0.01) {
    double db = SsimDb(s);
    CHECK(db > prev);
    prev = db;
  }
}

TEST_CASE("98th percentile nearest-rank goldens") {
  std::vector<double> hundred(100);
  for (int i = 0; i < 100; ++i) hundred[i] = i + 1;
  CHECK(P98(hundred) == 98.0);  // rank ceil(0.98*100) = 98

  CHECK(P98(std::vector<double>(17, 50.0)) == 50.0);
  CHECK(P98({10.0, 20.0}) == 20.0);  // ceil(0.98*2) = 2 -> second element
  CHECK(P98({5.0}) == 5.0);
  CHECK_THROWS_AS(P98({}), std::invalid_argument);
}

TEST_CASE("98th percentile matches a sort-based reference on random input") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> value(0.0, 1000.0);
  std::uniform_int_distribution<int> length(1, 500);
  for (int round = 0; round < 1000; ++round) {
    std::vector<double> values(length(rng));
    for (double& v : values) v = value(rng);

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    size_t rank = static_cast<size_t>(std::ceil(0.98 * sorted.size()));
    double expected = sorted[std::max<size_t>(rank, 1) - 1];

    CHECK(P98(values) == expected);
  }
}

TEST_CASE("stall counting fixture") {
  // Gaps: 40 ms (no stall) and 260 ms (stall, excess 60 ms over the 200 ms
  // threshold). Over 1 s: 1 stall/s, ratio 0.06.
  StallStats s = CountStalls({0.0, 40.0, 300.0}, 1.0);
  CHECK(s.stalls == 1);
  CHECK(s.stalls_per_sec == doctest::Approx(1.0));
  CHECK(s.stall_time_ratio == doctest::Approx(0.06));
}

TEST_CASE("stall boundary conventions") {
  std::vector<double> uniform;
  for (int i = 0; i < 25; ++i) uniform.push_back(i * 40.0);
  CHECK(CountStalls(uniform, 1.0).stalls == 0);

  // A gap of exactly 200 ms is not a stall (strict inequality).
  CHECK(CountStalls({0.0, 200.0}, 1.0).stalls == 0);
  CHECK(CountStalls({0.0, 200.1}, 1.0).stalls == 1);

  // Fewer than two decodes: no stall information.
  StallStats empty = CountStalls({10.0}, 1.0);
  CHECK(empty.stalls == 0);
  CHECK(empty.stall_time_ratio == 0.0);
}

namespace {

// Three-frame fixture with every metric small enough to hand-check.
SessionLog HandLog() {
  SessionLog log;
  log.duration_s = 1.0;
  log.owd_ms = 10.0;

  auto frame = [](int64_t id, Micros enc, Micros dec, double q, double loss,
                  int pkts) {
    FrameRecord f;
    f.frame_id = id;
    f.encode_us = enc;
    f.decode_us = dec;
    f.decoded = dec >= 0;
    f.quality_db = q;
    f.loss_rate = loss;
    f.packet_count = pkts;
    f.bitrate_kbps = 1000.0;
    return f;
  };
  // Delays: 100, 150, 120 ms -> p98 = max = 150. Qualities mean = 12.
  // Frame packets: 4+4+2 = 10, missed = round(0.25*4)+0+0 = 1 -> 10%.
  log.frames.push_back(frame(0, 0, MsToUs(100), 10.0, 0.25, 4));
  log.frames.push_back(frame(1, MsToUs(40), MsToUs(190), 13.0, 0.0, 4));
  log.frames.push_back(frame(2, MsToUs(80), MsToUs(200), 13.0, 0.0, 2));

  auto packet = [](int64_t id, Micros enq, std::optional<Micros> dec,
                   bool dropped) {
    Packet p;
    p.id = id;
    p.size_bytes = 1000;
    p.enqueue_time_us = enq;
    p.deliver_time_us = dec;
    if (dropped) p.drop_cause = DropCause::kQueueOverflow;
    return p;
  };
  // 4 packets: 3 delivered (3000 B over 1 s = 0.024 Mbps), 1 dropped (25%).
  // One-way delays: 15, 25, 20 ms -> p98 = 25.
  log.packets.push_back(packet(0, 0, MsToUs(15), false));
  log.packets.push_back(packet(1, 0, MsToUs(25), false));
  log.packets.push_back(packet(2, MsToUs(10), MsToUs(30), false));
  log.packets.push_back(packet(3, MsToUs(10), std::nullopt, true));

  log.sent = 4;
  log.delivered = 3;
  log.dropped = 1;
  return log;
}

}  // namespace

TEST_CASE("session report matches the hand-computed fixture") {
  QoEReport r = SessionQoE(HandLog());
  CHECK(r.mean_quality_db == doctest::Approx(12.0));
  CHECK(r.p98_frame_delay_ms == doctest::Approx(150.0));
  CHECK(r.stalls_per_sec == 0.0);
  CHECK(r.stall_time_ratio == 0.0);
  CHECK(r.tput_mbps == doctest::Approx(3000 * 8.0 / 1e6));
  CHECK(r.p98_packet_delay_ms == doctest::Approx(25.0));
  CHECK(r.loss_pct == doctest::Approx(10.0));
  CHECK(r.network_loss_pct == doctest::Approx(25.0));
}

TEST_CASE("session report survives serialization round-trip") {
  SessionLog log = HandLog();
  std::stringstream stream;
  WriteSessionNdjson(log, stream);
  SessionLog back = ReadSessionNdjson(stream);

  QoEReport a = SessionQoE(log);
  QoEReport b = SessionQoE(back);
  CHECK(a.mean_quality_db == doctest::Approx(b.mean_quality_db));
  CHECK(a.p98_frame_delay_ms == doctest::Approx(b.p98_frame_delay_ms));
  CHECK(a.tput_mbps == doctest::Approx(b.tput_mbps));
  CHECK(a.loss_pct == doctest::Approx(b.loss_pct));
  CHECK(a.network_loss_pct == doctest::Approx(b.network_loss_pct));
}

TEST_CASE("logs without frames or without decodes are rejected") {
  SessionLog empty;
  empty.duration_s = 1.0;
  CHECK_THROWS_AS(SessionQoE(empty), std::invalid_argument);

  SessionLog undecoded = HandLog();
  for (auto& f : undecoded.frames) {
    f.decoded = false;
    f.decode_us = -1;
  }
  CHECK_THROWS_AS(SessionQoE(undecoded), std::invalid_argument);
}
