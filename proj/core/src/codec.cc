#include "rtcc/codec.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace rtcc {

namespace {

std::atomic<int64_t> g_clamp_warnings{0};

void WarnClamped(double bitrate_kbps) {
  // Throttled: clamping is legal but usually means a misconfigured grid.
  if (g_clamp_warnings.fetch_add(1) < 3)
    std::fprintf(stderr, "rtcc: bitrate %.0f kbps outside profile grid, clamped\n",
                 bitrate_kbps);
}

// Index of the segment [axis[i], axis[i+1]] containing x, with clamping.
size_t Bracket(const std::vector<double>& axis, double x) {
  if (axis.size() < 2) return 0;
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  if (it == axis.begin()) return 0;
  size_t i = static_cast<size_t>(it - axis.begin()) - 1;
  return std::min(i, axis.size() - 2);
}

double Weight(double lo, double hi, double x) {
  if (hi <= lo) return 0.0;
  return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

}  // namespace

double CodecProfile::QualityDb(double bitrate_kbps, double loss) const {
  if (bitrate_kbps < bitrates_kbps.front() ||
      bitrate_kbps > bitrates_kbps.back()) {
    WarnClamped(bitrate_kbps);
    bitrate_kbps =
        std::clamp(bitrate_kbps, bitrates_kbps.front(), bitrates_kbps.back());
  }
  loss = std::clamp(loss, losses.front(), losses.back());

  if (bitrates_kbps.size() == 1 && losses.size() == 1)
    return quality_db[0][0];

  size_t bi = Bracket(bitrates_kbps, bitrate_kbps);
  size_t li = Bracket(losses, loss);
  size_t bj = std::min(bi + 1, bitrates_kbps.size() - 1);
  size_t lj = std::min(li + 1, losses.size() - 1);

  // Bilinear on (log bitrate, loss): rate-quality curves are near-linear in
  // log rate, so log-axis interpolation keeps intermediate rates faithful.
  double wb = Weight(std::log(bitrates_kbps[bi]), std::log(bitrates_kbps[bj]),
                     std::log(bitrate_kbps));
  double wl = Weight(losses[li], losses[lj], loss);

  double q0 = quality_db[bi][li] * (1 - wl) + quality_db[bi][lj] * wl;
  double q1 = quality_db[bj][li] * (1 - wl) + quality_db[bj][lj] * wl;
  return q0 * (1 - wb) + q1 * wb;
}

void CodecProfile::Validate() const {
  if (bitrates_kbps.empty() || losses.empty())
    throw std::invalid_argument("profile: empty axis");
  if (!std::is_sorted(bitrates_kbps.begin(), bitrates_kbps.end()) ||
      !std::is_sorted(losses.begin(), losses.end()))
    throw std::invalid_argument("profile: axes must be ascending");
  if (losses.front() < 0.0 || losses.back() > 1.0)
    throw std::invalid_argument("profile: losses must lie in [0, 1]");
  if (bitrates_kbps.front() <= 0.0)
    throw std::invalid_argument("profile: bitrates must be positive");
  if (quality_db.size() != bitrates_kbps.size())
    throw std::invalid_argument("profile: quality_db row count mismatch");
  for (const auto& row : quality_db)
    if (row.size() != losses.size())
      throw std::invalid_argument("profile: quality_db column count mismatch");
}

CodecProfile DefaultNvcProfile() {
  // q(R, L) = (A + B ln(R/200)) * (1 - L^2):
  //  - log growth in bitrate at zero loss,
  //  - concave (slow-then-faster) decay in loss, 0 dB at total loss,
  //  - B solves q(1810, 0.10) - q(1068, 0) = 2 dB exactly.
  constexpr double kA = 8.0;
  const double kB = (2.0 + 0.01 * kA) /
                    (0.99 * std::log(1810.0 / 200.0) - std::log(1068.0 / 200.0));

  CodecProfile p;
  p.mode = CodecMode::kNvc;
  p.label = "default-nvc";
  p.bitrates_kbps = {100,  200,  300,  450,  675,  1000,
                     1500, 2250, 3400, 4700, 6000, 8000};
  p.losses = {0.0, 0.025, 0.05, 0.075, 0.1, 0.15, 0.2, 0.3,
              0.4, 0.5,   0.6,  0.7,   0.8, 0.9,  1.0};
  p.quality_db.resize(p.bitrates_kbps.size());
  for (size_t i = 0; i < p.bitrates_kbps.size(); ++i) {
    double q0 = kA + kB * std::log(p.bitrates_kbps[i] / 200.0);
    for (double loss : p.losses)
      p.quality_db[i].push_back(q0 * (1.0 - loss * loss));
  }
  p.Validate();
  return p;
}

CodecProfile DefaultTraditionalProfile() {
  CodecProfile p = DefaultNvcProfile();
  p.mode = CodecMode::kTraditional;
  p.label = "default-traditional";
  return p;
}

CodecProfile LoadProfile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile: " + path);
  nlohmann::json j = nlohmann::json::parse(in);

  CodecProfile p;
  std::string mode = j.at("mode").get<std::string>();
  if (mode == "nvc") {
    p.mode = CodecMode::kNvc;
  } else if (mode == "traditional") {
    p.mode = CodecMode::kTraditional;
  } else {
    throw std::invalid_argument("profile mode must be nvc|traditional");
  }
  p.bitrates_kbps = j.at("bitrates_kbps").get<std::vector<double>>();
  p.losses = j.at("losses").get<std::vector<double>>();
  p.quality_db = j.at("quality_db").get<std::vector<std::vector<double>>>();
  p.label = j.value("label", path);
  p.Validate();
  return p;
}

void SaveProfile(const CodecProfile& profile, const std::string& path) {
  nlohmann::json j = {
      {"mode", profile.mode == CodecMode::kNvc ? "nvc" : "traditional"},
      {"bitrates_kbps", profile.bitrates_kbps},
      {"losses", profile.losses},
      {"quality_db", profile.quality_db},
      {"label", profile.label},
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write profile: " + path);
  out << j.dump(2) << "\n";
}

EncodedFrame MakeFrame(int64_t frame_id, double bitrate_kbps,
                       Micros encode_time_us, double owd_ms,
                       const DeadlineConfig& cfg) {
  EncodedFrame f;
  f.frame_id = frame_id;
  f.target_bitrate_kbps = bitrate_kbps;
  f.size_bytes =
      static_cast<int>(std::lround(bitrate_kbps * 1000.0 / 8.0 / kFps));
  f.size_bytes = std::max(f.size_bytes, 1);
  f.packet_count = (f.size_bytes + kMtuBytes - 1) / kMtuBytes;
  f.encode_time_us = encode_time_us;
  f.decode_deadline_us =
      encode_time_us + kFrameIntervalUs + MsToUs(owd_ms + cfg.slack_ms);
  return f;
}

double FrameLossRate(const EncodedFrame& frame,
                     const std::vector<std::optional<Micros>>& deliver_us) {
  int on_time = 0;
  for (const auto& t : deliver_us)
    if (t.has_value() && *t < frame.decode_deadline_us) ++on_time;
  int total = std::max(frame.packet_count,
                       static_cast<int>(deliver_us.size()));
  if (total == 0) return 0.0;
  return 1.0 - static_cast<double>(on_time) / total;
}

NvcDecodeResult DecodeNvc(const CodecProfile& profile,
                          const EncodedFrame& frame, double loss,
                          ReferenceState ref, const NvcParams& params) {
  NvcDecodeResult out;
  double base = profile.QualityDb(frame.target_bitrate_kbps, loss);
  out.quality_db = base - params.damage_penalty_db * ref.damage;

  ref.damage = std::clamp(ref.damage * params.damage_decay + loss, 0.0, 1.0);
  ref.frames_since_sync += 1;
  if (ref.frames_since_sync >= params.sync_interval_frames) {
    out.synced = ref.damage > 0.0;
    ref.damage = 0.0;
    ref.frames_since_sync = 0;
  }
  out.ref = ref;
  return out;
}

TraditionalDecodeResult DecodeTraditional(
    const CodecProfile& profile, const EncodedFrame& frame,
    const std::vector<std::optional<Micros>>& deliver_us) {
  TraditionalDecodeResult out;
  if (static_cast<int>(deliver_us.size()) < frame.packet_count) return out;
  Micros last = 0;
  for (const auto& t : deliver_us) {
    if (!t.has_value()) return out;  // still missing, frame pending
    last = std::max(last, *t);
  }
  out.decoded = true;
  out.decode_time_us = last;
  out.quality_db = profile.QualityDb(frame.target_bitrate_kbps, 0.0);
  return out;
}

}  // namespace rtcc
