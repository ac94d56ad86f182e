#ifndef RTCC_CODEC_H_
#define RTCC_CODEC_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rtcc/link.h"

namespace rtcc {

constexpr int kFps = 25;
constexpr Micros kFrameIntervalUs = kMicrosPerSec / kFps;  // 40 ms

enum class CodecMode { kNvc, kTraditional };

// Quality surface q(bitrate, frame-loss-rate) in SSIM-dB. Lookup is bilinear
// on (log bitrate, loss), clamped to the grid edges.
struct CodecProfile {
  CodecMode mode = CodecMode::kNvc;
  std::vector<double> bitrates_kbps;           // ascending
  std::vector<double> losses;                  // ascending, within [0, 1]
  std::vector<std::vector<double>> quality_db; // [bitrate][loss]
  std::string label;

  double QualityDb(double bitrate_kbps, double loss) const;
  // Per-bitrate-row extremes, used for reward normalization.
  double RowMaxDb(double bitrate_kbps) const { return QualityDb(bitrate_kbps, losses.front()); }
  double RowMinDb(double bitrate_kbps) const { return QualityDb(bitrate_kbps, losses.back()); }

  // Schema/shape checks; throws std::invalid_argument.
  void Validate() const;
};

// Synthetic loss-tolerant profile: loss-free quality grows logarithmically in
// bitrate, quality decays smoothly and concavely in loss down to 0 dB at full
// loss. Calibrated so q(1810 kbps, 10% loss) - q(1068 kbps, 0) = 2 dB.
CodecProfile DefaultNvcProfile();
// Same quality surface tagged as a blocking traditional codec.
CodecProfile DefaultTraditionalProfile();

// JSON schema: {mode, bitrates_kbps:[...], losses:[...], quality_db:[[...]]}.
CodecProfile LoadProfile(const std::string& path);
void SaveProfile(const CodecProfile& profile, const std::string& path);

struct EncodedFrame {
  int64_t frame_id = 0;
  double target_bitrate_kbps = 0.0;
  int size_bytes = 0;
  int packet_count = 0;
  Micros encode_time_us = 0;
  Micros decode_deadline_us = 0;
};

struct DeadlineConfig {
  // deadline = encode + frame interval + OWD + slack (~1.5 frame jitter buffer)
  double slack_ms = 60.0;
};

EncodedFrame MakeFrame(int64_t frame_id, double bitrate_kbps,
                       Micros encode_time_us, double owd_ms,
                       const DeadlineConfig& cfg = {});

// Fraction of the frame's packets not delivered before the decode deadline.
// One entry per packet; nullopt means dropped in the network.
double FrameLossRate(const EncodedFrame& frame,
                     const std::vector<std::optional<Micros>>& deliver_us);

// Accumulated reference-quality damage that propagates across frames until a
// state synchronization (every 10 frames) clears it.
struct ReferenceState {
  double damage = 0.0;       // [0, 1]
  int frames_since_sync = 0; // < 10 between syncs
};

struct NvcParams {
  double damage_decay = 0.9;     // rho
  double damage_penalty_db = 3.0;  // delta: dB lost at full damage
  int sync_interval_frames = 10;
};

struct NvcDecodeResult {
  double quality_db = 0.0;
  ReferenceState ref;
  bool synced = false;
};

NvcDecodeResult DecodeNvc(const CodecProfile& profile,
                          const EncodedFrame& frame, double loss,
                          ReferenceState ref, const NvcParams& params = {});

struct TraditionalDecodeResult {
  bool decoded = false;
  double quality_db = 0.0;
  Micros decode_time_us = 0;
};

// A traditional codec decodes only complete frames: quality is the loss-free
// grid value and decode time is the last packet arrival. Missing packets
// leave the frame Pending; retransmission scheduling lives in the session.
TraditionalDecodeResult DecodeTraditional(
    const CodecProfile& profile, const EncodedFrame& frame,
    const std::vector<std::optional<Micros>>& deliver_us);

}  // namespace rtcc

#endif  // RTCC_CODEC_H_
