#include <benchmark/benchmark.h>

#include "rtcc/gcc_like.h"
#include "rtcc/link.h"
#include "rtcc/rl/policy.h"
#include "rtcc/session.h"
#include "rtcc/trace.h"

namespace {

rtcc::NetworkTrace FlatTrace(double mbps) {
  rtcc::NetworkTrace trace;
  trace.breakpoints = {{0.0, mbps}};
  trace.duration_s = 30.0;
  trace.min_rtt_ms = 40.0;
  trace.queue_capacity_packets = 50;
  return trace;
}

void BM_LinkService(benchmark::State& state) {
  for (auto _ : state) {
    rtcc::BottleneckLink link(FlatTrace(4.0), 1);
    rtcc::Micros now = 0;
    int64_t delivered = 0;
    for (int i = 0; i < 10000; ++i) {
      rtcc::Packet pkt;
      pkt.id = i;
      pkt.size_bytes = rtcc::kMtuBytes;
      link.Enqueue(pkt, now);
      now += 300;
      delivered += static_cast<int64_t>(link.Service(now).size());
    }
    benchmark::DoNotOptimize(delivered);
  }
}
BENCHMARK(BM_LinkService);

void BM_PolicyForward(benchmark::State& state) {
  rtcc::PolicyNetwork net(42);
  std::array<double, rtcc::kStateSize> input{};
  for (int i = 0; i < rtcc::kStateSize; ++i) input[i] = 0.1 * i;
  for (auto _ : state) {
    auto out = net.Forward(input);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_PolicyForward);

void BM_RunSession(benchmark::State& state) {
  rtcc::NetworkTrace trace = FlatTrace(3.0);
  rtcc::CodecProfile profile = rtcc::DefaultNvcProfile();
  for (auto _ : state) {
    rtcc::GccLikeController controller;
    rtcc::SessionConfig cfg;
    cfg.duration_s = 10.0;
    auto log = rtcc::RunSession(trace, controller, profile, cfg);
    benchmark::DoNotOptimize(log.frames.size());
  }
}
BENCHMARK(BM_RunSession);

}  // namespace

BENCHMARK_MAIN();
