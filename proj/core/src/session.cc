#include "rtcc/session.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rtcc/safeguard.h"

namespace rtcc {

namespace {

enum EventType {
  kTick = 0,
  kPacketSend = 1,
  kFrameDeadline = 2,
  kRetxCheck = 3,
  kFeedbackDeliver = 4,
  kFrameEncode = 5,
};

struct Event {
  Micros time = 0;
  int type = 0;
  int64_t seq = 0;  // tie-breaker, keeps ordering fully deterministic
  int64_t arg = 0;

  bool operator>(const Event& other) const {
    return std::tie(time, type, seq) >
           std::tie(other.time, other.type, other.seq);
  }
};

struct PendingSend {
  Micros time = 0;
  int64_t frame_idx = 0;
  int slot = 0;
  int size_bytes = 0;
  bool retransmission = false;
};

struct FrameState {
  EncodedFrame frame;
  std::vector<std::optional<Micros>> deliver_us;
  std::vector<double> rtt_ms;
  int arrived = 0;
  bool record_final = false;
  int retx_rounds = 0;
};

}  // namespace

SessionLog RunSession(const NetworkTrace& trace, Controller& controller,
                      const CodecProfile& profile,
                      const SessionConfig& config) {
  if (config.duration_s <= 0.0)
    throw std::invalid_argument("session duration must be > 0");
  if (trace.breakpoints.empty())
    throw std::invalid_argument("session needs a non-empty trace");
  if (trace.duration_s + 1e-9 < config.duration_s)
    throw std::invalid_argument("trace does not cover the session duration");

  const Micros duration_us =
      static_cast<Micros>(config.duration_s * kMicrosPerSec);
  const double owd_ms = trace.OwdMs();
  const Micros owd_us = MsToUs(owd_ms);
  const Micros rtt_us = 2 * owd_us;

  BottleneckLink link(trace, config.seed);
  SessionLog log;
  log.duration_s = config.duration_s;
  log.owd_ms = owd_ms;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  int64_t seq = 0;
  auto Push = [&](Micros t, int type, int64_t arg) {
    events.push({t, type, seq++, arg});
  };

  // Frame encodes and feedback windows are known up front.
  for (Micros t = 0; t < duration_us; t += kFrameIntervalUs)
    Push(t, kFrameEncode, 0);
  const int64_t num_windows = duration_us / kFeedbackIntervalUs;
  for (int64_t w = 0; w < num_windows; ++w)
    Push((w + 1) * kFeedbackIntervalUs + owd_us, kFeedbackDeliver, w);
  for (Micros t : controller.ExtraDecisionTimesUs(duration_us))
    Push(t, kTick, 0);

  std::vector<FrameState> frames;
  std::vector<PendingSend> sends;
  std::vector<std::pair<int64_t, int>> packet_slot;  // id -> (frame_idx, slot)
  std::vector<Packet> arrivals;                      // deliver-time ordered
  size_t arrival_cursor = 0;
  std::vector<int64_t> window_pkts_sent(num_windows + 64, 0);
  std::vector<int64_t> window_bytes_sent(num_windows + 64, 0);

  double current_rate = controller.InitialRateKbps();
  ReferenceState ref;
  int64_t next_frame_id = 0;
  int64_t next_packet_id = 0;

  auto SendPacket = [&](const PendingSend& ps, Micros now) {
    FrameState& fs = frames[ps.frame_idx];
    Packet pkt;
    pkt.id = next_packet_id++;
    pkt.frame_id = fs.frame.frame_id;
    pkt.size_bytes = ps.size_bytes;
    pkt.retransmission = ps.retransmission;
    pkt.enqueue_time_us = now;
    packet_slot.emplace_back(ps.frame_idx, ps.slot);

    EnqueueResult result = link.Enqueue(pkt, now);
    if (result == EnqueueResult::kDroppedQueue)
      pkt.drop_cause = DropCause::kQueueOverflow;
    else if (result == EnqueueResult::kDroppedRandom)
      pkt.drop_cause = DropCause::kRandomLoss;
    log.packets.push_back(pkt);

    int64_t w = now / kFeedbackIntervalUs;
    if (w < static_cast<int64_t>(window_pkts_sent.size())) {
      window_pkts_sent[w] += 1;
      window_bytes_sent[w] += pkt.size_bytes;
    }
  };

  auto ApplyDecision = [&](const ControllerDecision& d) {
    current_rate = ClampRate(d.rate_kbps);
    log.decisions.push_back({d.time_us, current_rate, d.mode});
  };

  auto DrainLink = [&](Micros until) {
    for (Packet& p : link.Service(until)) {
      log.packets[p.id].deliver_time_us = p.deliver_time_us;
      arrivals.push_back(log.packets[p.id]);
      auto [fi, slot] = packet_slot[p.id];
      FrameState& fs = frames[fi];
      if (!fs.deliver_us[slot].has_value()) {
        fs.deliver_us[slot] = *p.deliver_time_us;
        fs.rtt_ms.push_back(UsToMs(*p.deliver_time_us - p.enqueue_time_us) +
                            owd_ms);
        fs.arrived += 1;
      }
      // Completion of a pending traditional frame.
      if (profile.mode == CodecMode::kTraditional && fs.record_final &&
          fs.arrived == fs.frame.packet_count) {
        FrameRecord& rec = log.frames[fs.frame.frame_id];
        if (!rec.decoded) {
          auto result = DecodeTraditional(profile, fs.frame, fs.deliver_us);
          rec.decoded = true;
          rec.decode_us = result.decode_time_us;
          rec.quality_db = result.quality_db;
        }
      }
    }
  };

  auto MeanRttMs = [&](const FrameState& fs) {
    if (fs.rtt_ms.empty())
      return UsToMs(fs.frame.decode_deadline_us - fs.frame.encode_time_us) +
             owd_ms;
    double sum = 0.0;
    for (double r : fs.rtt_ms) sum += r;
    return sum / fs.rtt_ms.size();
  };

  while (!events.empty()) {
    Event ev = events.top();
    events.pop();
    DrainLink(ev.time);

    switch (ev.type) {
      case kFrameEncode: {
        EncodedFrame f = MakeFrame(next_frame_id++, current_rate, ev.time,
                                   owd_ms, config.deadline);
        FrameState fs;
        fs.frame = f;
        fs.deliver_us.assign(f.packet_count, std::nullopt);
        int64_t fi = static_cast<int64_t>(frames.size());
        frames.push_back(std::move(fs));
        // Smooth pacing across the frame interval.
        for (int slot = 0; slot < f.packet_count; ++slot) {
          PendingSend ps;
          ps.time = ev.time + slot * kFrameIntervalUs / f.packet_count;
          ps.frame_idx = fi;
          ps.slot = slot;
          ps.size_bytes = (slot + 1 < f.packet_count)
                              ? kMtuBytes
                              : f.size_bytes - (f.packet_count - 1) * kMtuBytes;
          sends.push_back(ps);
          Push(ps.time, kPacketSend, static_cast<int64_t>(sends.size()) - 1);
        }
        Push(f.decode_deadline_us, kFrameDeadline, fi);
        break;
      }
      case kPacketSend:
        SendPacket(sends[ev.arg], ev.time);
        break;
      case kFeedbackDeliver: {
        Micros wstart = ev.arg * kFeedbackIntervalUs;
        Micros wend = wstart + kFeedbackIntervalUs;
        FeedbackReport report;
        report.window_start_us = wstart;
        report.window_end_us = wend;
        while (arrival_cursor < arrivals.size() &&
               *arrivals[arrival_cursor].deliver_time_us < wend) {
          const Packet& p = arrivals[arrival_cursor++];
          report.acked_ids.push_back(p.id);
          report.ack_time_us.push_back(*p.deliver_time_us);
          report.rtt_ms.push_back(
              UsToMs(*p.deliver_time_us - p.enqueue_time_us) + owd_ms);
          report.bytes_acked += p.size_bytes;
        }
        report.packets_sent_in_window = window_pkts_sent[ev.arg];
        report.bytes_sent_in_window = window_bytes_sent[ev.arg];
        ApplyDecision(controller.OnFeedback(report, ev.time));
        break;
      }
      case kTick: {
        if (auto d = controller.OnTick(ev.time)) ApplyDecision(*d);
        break;
      }
      case kFrameDeadline: {
        FrameState& fs = frames[ev.arg];
        double loss = FrameLossRate(fs.frame, fs.deliver_us);
        FrameRecord rec;
        rec.frame_id = fs.frame.frame_id;
        rec.encode_us = fs.frame.encode_time_us;
        rec.bitrate_kbps = fs.frame.target_bitrate_kbps;
        rec.loss_rate = loss;
        rec.packet_count = fs.frame.packet_count;
        rec.mean_rtt_ms = MeanRttMs(fs);

        if (profile.mode == CodecMode::kNvc) {
          auto result = DecodeNvc(profile, fs.frame, loss, ref, config.nvc);
          ref = result.ref;
          rec.decoded = true;
          rec.quality_db = result.quality_db;
          Micros last = 0;
          for (const auto& t : fs.deliver_us)
            if (t.has_value()) last = std::max(last, *t);
          rec.decode_us = (loss == 0.0 && fs.arrived == fs.frame.packet_count)
                              ? last
                              : fs.frame.decode_deadline_us;
        } else {
          auto result = DecodeTraditional(profile, fs.frame, fs.deliver_us);
          if (result.decoded) {
            rec.decoded = true;
            rec.decode_us = result.decode_time_us;
            rec.quality_db = result.quality_db;
          } else {
            fs.record_final = true;
            // Receiver NACKs at the deadline; the request reaches the sender
            // one OWD later and missing packets are resent.
            Push(fs.frame.decode_deadline_us + owd_us, kRetxCheck, ev.arg);
          }
        }
        log.frames.push_back(rec);
        break;
      }
      case kRetxCheck: {
        FrameState& fs = frames[ev.arg];
        if (fs.arrived == fs.frame.packet_count ||
            fs.retx_rounds >= config.max_retransmit_rounds ||
            ev.time >= duration_us + kMicrosPerSec)
          break;
        fs.retx_rounds += 1;
        for (int slot = 0; slot < fs.frame.packet_count; ++slot) {
          if (fs.deliver_us[slot].has_value()) continue;
          PendingSend ps;
          ps.time = ev.time;
          ps.frame_idx = ev.arg;
          ps.slot = slot;
          ps.size_bytes =
              (slot + 1 < fs.frame.packet_count)
                  ? kMtuBytes
                  : fs.frame.size_bytes -
                        (fs.frame.packet_count - 1) * kMtuBytes;
          ps.retransmission = true;
          sends.push_back(ps);
          Push(ps.time, kPacketSend, static_cast<int64_t>(sends.size()) - 1);
        }
        // Check again after the resent packets had a round trip to arrive.
        Push(ev.time + rtt_us + 50 * kMicrosPerMs, kRetxCheck, ev.arg);
        break;
      }
    }
  }

  if (auto* sg = dynamic_cast<SafeguardController*>(&controller))
    log.switches = sg->switches();

  for (const Packet& p : log.packets) {
    log.sent += 1;
    if (p.deliver_time_us.has_value())
      log.delivered += 1;
    else if (p.drop_cause.has_value())
      log.dropped += 1;
    else
      log.in_flight += 1;
  }
  if (log.sent != log.delivered + log.dropped + log.in_flight)
    throw std::logic_error("session conservation violated");
  return log;
}

namespace {

const char* ModeName(ControlMode m) {
  switch (m) {
    case ControlMode::kRl: return "RL";
    case ControlMode::kFallback: return "FALLBACK";
    case ControlMode::kRule: return "RULE";
    case ControlMode::kOracle: return "ORACLE";
  }
  return "?";
}

ControlMode ModeFromName(const std::string& s) {
  if (s == "RL") return ControlMode::kRl;
  if (s == "FALLBACK") return ControlMode::kFallback;
  if (s == "ORACLE") return ControlMode::kOracle;
  return ControlMode::kRule;
}

}  // namespace

void WriteSessionNdjson(const SessionLog& log, std::ostream& out) {
  using nlohmann::json;
  out << json{{"type", "session"},
              {"duration_s", log.duration_s},
              {"owd_ms", log.owd_ms},
              {"sent", log.sent},
              {"delivered", log.delivered},
              {"dropped", log.dropped},
              {"in_flight", log.in_flight}}
             .dump()
      << "\n";
  for (const Packet& p : log.packets) {
    json j{{"type", "packet"},
           {"id", p.id},
           {"frame_id", p.frame_id},
           {"size_bytes", p.size_bytes},
           {"enqueue_us", p.enqueue_time_us},
           {"retx", p.retransmission}};
    if (p.deliver_time_us) j["deliver_us"] = *p.deliver_time_us;
    if (p.drop_cause)
      j["drop_cause"] = *p.drop_cause == DropCause::kQueueOverflow
                            ? "queue_overflow"
                            : "random_loss";
    out << j.dump() << "\n";
  }
  for (const FrameRecord& f : log.frames) {
    out << json{{"type", "frame"},
                {"frame_id", f.frame_id},
                {"encode_us", f.encode_us},
                {"decode_us", f.decode_us},
                {"bitrate_kbps", f.bitrate_kbps},
                {"loss_rate", f.loss_rate},
                {"quality_db", f.quality_db},
                {"packet_count", f.packet_count},
                {"mean_rtt_ms", f.mean_rtt_ms},
                {"decoded", f.decoded}}
               .dump()
        << "\n";
  }
  for (const DecisionRecord& d : log.decisions) {
    out << json{{"type", "decision"},
                {"time_us", d.time_us},
                {"rate_kbps", d.rate_kbps},
                {"mode", ModeName(d.mode)}}
               .dump()
        << "\n";
  }
  for (const SwitchEvent& s : log.switches) {
    out << json{{"type", "switch"},
                {"time_us", s.time_us},
                {"from", ModeName(s.from)},
                {"to", ModeName(s.to)}}
               .dump()
        << "\n";
  }
  for (double r : log.reward_trace)
    out << json{{"type", "reward"}, {"value", r}}.dump() << "\n";
}

SessionLog ReadSessionNdjson(std::istream& in) {
  using nlohmann::json;
  SessionLog log;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    std::string type = j.at("type").get<std::string>();
    if (type == "session") {
      log.duration_s = j.at("duration_s");
      log.owd_ms = j.at("owd_ms");
      log.sent = j.at("sent");
      log.delivered = j.at("delivered");
      log.dropped = j.at("dropped");
      log.in_flight = j.at("in_flight");
    } else if (type == "packet") {
      Packet p;
      p.id = j.at("id");
      p.frame_id = j.at("frame_id");
      p.size_bytes = j.at("size_bytes");
      p.enqueue_time_us = j.at("enqueue_us");
      p.retransmission = j.at("retx");
      if (j.contains("deliver_us")) p.deliver_time_us = j.at("deliver_us");
      if (j.contains("drop_cause"))
        p.drop_cause = j.at("drop_cause") == "queue_overflow"
                           ? DropCause::kQueueOverflow
                           : DropCause::kRandomLoss;
      log.packets.push_back(p);
    } else if (type == "frame") {
      FrameRecord f;
      f.frame_id = j.at("frame_id");
      f.encode_us = j.at("encode_us");
      f.decode_us = j.at("decode_us");
      f.bitrate_kbps = j.at("bitrate_kbps");
      f.loss_rate = j.at("loss_rate");
      f.quality_db = j.at("quality_db");
      f.packet_count = j.at("packet_count");
      f.mean_rtt_ms = j.at("mean_rtt_ms");
      f.decoded = j.at("decoded");
      log.frames.push_back(f);
    } else if (type == "decision") {
      log.decisions.push_back({j.at("time_us"), j.at("rate_kbps"),
                               ModeFromName(j.at("mode"))});
    } else if (type == "switch") {
      log.switches.push_back({j.at("time_us"), ModeFromName(j.at("from")),
                              ModeFromName(j.at("to"))});
    } else if (type == "reward") {
      log.reward_trace.push_back(j.at("value"));
    }
  }
  return log;
}

void WriteFrameCsv(const SessionLog& log, std::ostream& out) {
  out << "frame_id,encode_ms,decode_ms,bitrate_kbps,loss_rate,quality_db\n";
  out << std::setprecision(17);
  for (const FrameRecord& f : log.frames) {
    out << f.frame_id << "," << UsToMs(f.encode_us) << ","
        << (f.decoded ? UsToMs(f.decode_us) : -1.0) << "," << f.bitrate_kbps
        << "," << f.loss_rate << "," << f.quality_db << "\n";
  }
}

}  // namespace rtcc
