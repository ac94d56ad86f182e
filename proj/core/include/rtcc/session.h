#ifndef RTCC_SESSION_H_
#define RTCC_SESSION_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "rtcc/codec.h"
#include "rtcc/controller.h"
#include "rtcc/link.h"
#include "rtcc/trace.h"

namespace rtcc {

struct FrameRecord {
  int64_t frame_id = 0;
  Micros encode_us = 0;
  Micros decode_us = -1;  // -1: never decoded (traditional, incomplete)
  double bitrate_kbps = 0.0;
  double loss_rate = 0.0;     // frame-level loss at the decode deadline
  double quality_db = 0.0;
  int packet_count = 0;
  double mean_rtt_ms = 0.0;   // over the frame's delivered packets
  bool decoded = false;
};

struct DecisionRecord {
  Micros time_us = 0;
  double rate_kbps = 0.0;
  ControlMode mode = ControlMode::kRule;
};

struct SessionLog {
  std::vector<Packet> packets;        // every packet ever handed to the link
  std::vector<FrameRecord> frames;
  std::vector<DecisionRecord> decisions;
  std::vector<SwitchEvent> switches;
  std::vector<double> reward_trace;   // filled by the trainer, if any
  double duration_s = 0.0;
  double owd_ms = 0.0;
  int64_t sent = 0;
  int64_t delivered = 0;
  int64_t dropped = 0;
  int64_t in_flight = 0;
};

struct SessionConfig {
  double duration_s = 30.0;
  uint64_t seed = 1;
  DeadlineConfig deadline;
  NvcParams nvc;
  int max_retransmit_rounds = 8;  // traditional mode NACK retries
};

// Drives one sender/link/receiver session: a frame every 40 ms at the
// controller's current rate, packets paced uniformly across the frame
// interval, 50 ms feedback windows delivered back after one OWD.
SessionLog RunSession(const NetworkTrace& trace, Controller& controller,
                      const CodecProfile& profile, const SessionConfig& config);

// Newline-delimited JSON event stream (packet/frame/decision/switch records).
void WriteSessionNdjson(const SessionLog& log, std::ostream& out);
SessionLog ReadSessionNdjson(std::istream& in);

// Per-frame CSV: frame_id, encode_ms, decode_ms, bitrate_kbps, loss_rate,
// quality_db.
void WriteFrameCsv(const SessionLog& log, std::ostream& out);

}  // namespace rtcc

#endif  // RTCC_SESSION_H_
