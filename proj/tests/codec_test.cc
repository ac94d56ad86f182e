#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "rtcc/codec.h"

using namespace rtcc;
namespace fs = std::filesystem;

TEST_CASE("default profile hits the two-point calibration anchor") {
  CodecProfile p = DefaultNvcProfile();
  // The surface is linear in log-bitrate and 0.10 is a loss grid node, so the
  // calibrated relation is exact up to rounding.
  double diff = p.QualityDb(1810, 0.10) - p.QualityDb(1068, 0.0);
  CHECK(diff == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("default profile quality is monotone over the full grid") {
  CodecProfile p = DefaultNvcProfile();
  for (size_t i = 0; i < p.bitrates_kbps.size(); ++i) {
    for (size_t j = 0; j < p.losses.size(); ++j) {
      if (i > 0)  // non-decreasing in bitrate at fixed loss
        CHECK(p.quality_db[i][j] >= p.quality_db[i - 1][j]);
      if (j > 0)  // non-increasing in loss at fixed bitrate
        CHECK(p.quality_db[i][j] <= p.quality_db[i][j - 1]);
    }
  }
}

TEST_CASE("loss-free quality grows strictly with bitrate, total loss is 0 dB") {
  CodecProfile p = DefaultNvcProfile();
  for (size_t i = 1; i < p.bitrates_kbps.size(); ++i)
    CHECK(p.quality_db[i][0] > p.quality_db[i - 1][0]);
  for (size_t i = 0; i < p.bitrates_kbps.size(); ++i)
    CHECK(p.QualityDb(p.bitrates_kbps[i], 1.0) == doctest::Approx(0.0));
}

TEST_CASE("interpolation reproduces grid points and clamps outside the grid") {
  CodecProfile p = DefaultNvcProfile();
  for (size_t i = 0; i < p.bitrates_kbps.size(); i += 3)
    for (size_t j = 0; j < p.losses.size(); j += 4)
      CHECK(p.QualityDb(p.bitrates_kbps[i], p.losses[j]) ==
            doctest::Approx(p.quality_db[i][j]).epsilon(1e-12));

  CHECK(p.QualityDb(10.0, 0.0) == doctest::Approx(p.quality_db.front()[0]));
  CHECK(p.QualityDb(1e6, 0.0) == doctest::Approx(p.quality_db.back()[0]));
}

TEST_CASE("profile validation rejects malformed grids") {
  CodecProfile p = DefaultNvcProfile();
  p.quality_db.pop_back();
  CHECK_THROWS_AS(p.Validate(), std::invalid_argument);

  CodecProfile q = DefaultNvcProfile();
  q.losses.back() = 1.5;
  CHECK_THROWS_AS(q.Validate(), std::invalid_argument);

  CodecProfile r = DefaultNvcProfile();
  std::swap(r.bitrates_kbps[0], r.bitrates_kbps[1]);
  CHECK_THROWS_AS(r.Validate(), std::invalid_argument);
}

TEST_CASE("profile JSON round-trip") {
  fs::path dir = fs::temp_directory_path() / "rtcc_codec_test";
  fs::create_directories(dir);
  fs::path path = dir / "profile.json";
  CodecProfile p = DefaultNvcProfile();
  SaveProfile(p, path.string());
  CodecProfile back = LoadProfile(path.string());
  CHECK(back.mode == p.mode);
  CHECK(back.bitrates_kbps == p.bitrates_kbps);
  CHECK(back.losses == p.losses);
  CHECK(back.quality_db == p.quality_db);
}

TEST_CASE("frame sizing follows bitrate and fps") {
  // 2400 kbps at 25 fps -> 2400000/8/25 = 12000 bytes -> 10 MTU packets.
  EncodedFrame f = MakeFrame(3, 2400.0, 1000, 25.0);
  CHECK(f.size_bytes == 12000);
  CHECK(f.packet_count == 10);
  // deadline = encode + 40 ms frame interval + 25 ms owd + 60 ms slack
  CHECK(f.decode_deadline_us == 1000 + MsToUs(40 + 25 + 60));

  EncodedFrame tiny = MakeFrame(0, 100.0, 0, 10.0);
  CHECK(tiny.size_bytes == 500);
  CHECK(tiny.packet_count == 1);
}

TEST_CASE("frame loss rate counts packets missing at the deadline") {
  EncodedFrame f = MakeFrame(0, 1200.0, 0, 10.0);  // 6000 B -> 5 packets
  REQUIRE(f.packet_count == 5);

  std::vector<std::optional<Micros>> on_time(5, Micros{1000});
  CHECK(FrameLossRate(f, on_time) == 0.0);

  auto one_late = on_time;
  one_late[2] = f.decode_deadline_us + 1;
  CHECK(FrameLossRate(f, one_late) == doctest::Approx(0.2));

  // Arrival exactly at the deadline is already too late (strictly-before).
  auto boundary = on_time;
  boundary[0] = f.decode_deadline_us;
  CHECK(FrameLossRate(f, boundary) == doctest::Approx(0.2));

  std::vector<std::optional<Micros>> dropped(5, std::nullopt);
  CHECK(FrameLossRate(f, dropped) == 1.0);
}

TEST_CASE("loss-tolerant decode: clean reference at zero loss hits the grid") {
  CodecProfile p = DefaultNvcProfile();
  EncodedFrame f = MakeFrame(0, 1000.0, 0, 10.0);
  NvcDecodeResult r = DecodeNvc(p, f, 0.0, ReferenceState{});
  CHECK(r.quality_db == doctest::Approx(p.QualityDb(1000.0, 0.0)));
  CHECK(r.ref.damage == 0.0);
}

TEST_CASE("reference damage decays, accumulates, and penalizes quality") {
  CodecProfile p = DefaultNvcProfile();
  EncodedFrame f = MakeFrame(1, 1000.0, 0, 10.0);
  ReferenceState ref;
  ref.damage = 0.5;
  ref.frames_since_sync = 3;

  NvcDecodeResult r = DecodeNvc(p, f, 0.2, ref);
  // Quality penalty applies the pre-update damage: base - 3 dB * 0.5.
  CHECK(r.quality_db ==
        doctest::Approx(p.QualityDb(1000.0, 0.2) - 3.0 * 0.5));
  // damage' = clamp(0.5 * 0.9 + 0.2) = 0.65
  CHECK(r.ref.damage == doctest::Approx(0.65));
  CHECK(r.ref.frames_since_sync == 4);

  ReferenceState saturated;
  saturated.damage = 0.95;
  CHECK(DecodeNvc(p, f, 0.9, saturated).ref.damage == 1.0);
}

TEST_CASE("state synchronization clears damage every 10 frames") {
  CodecProfile p = DefaultNvcProfile();
  EncodedFrame f = MakeFrame(0, 1000.0, 0, 10.0);
  ReferenceState ref;
  for (int i = 0; i < 9; ++i) {
    ref = DecodeNvc(p, f, 0.1, ref).ref;
    CHECK(ref.damage > 0.0);
    CHECK(ref.frames_since_sync == i + 1);
  }
  NvcDecodeResult r = DecodeNvc(p, f, 0.1, ref);
  CHECK(r.synced);
  CHECK(r.ref.damage == 0.0);
  CHECK(r.ref.frames_since_sync == 0);
}

TEST_CASE("blocking decode requires every packet") {
  CodecProfile p = DefaultTraditionalProfile();
  EncodedFrame f = MakeFrame(0, 1200.0, 0, 10.0);  // 5 packets

  std::vector<std::optional<Micros>> complete = {Micros{100}, Micros{900},
                                                 Micros{300}, Micros{500},
                                                 Micros{700}};
  TraditionalDecodeResult r = DecodeTraditional(p, f, complete);
  CHECK(r.decoded);
  CHECK(r.decode_time_us == 900);  // last arrival
  CHECK(r.quality_db == doctest::Approx(p.QualityDb(1200.0, 0.0)));

  auto missing = complete;
  missing[1] = std::nullopt;
  CHECK_FALSE(DecodeTraditional(p, f, missing).decoded);

  // Once complete, quality is independent of how packets originally fared.
  std::vector<std::optional<Micros>> late = {Micros{100}, Micros{90000},
                                             Micros{300}, Micros{500},
                                             Micros{700}};
  CHECK(DecodeTraditional(p, f, late).quality_db == doctest::Approx(r.quality_db));
}
