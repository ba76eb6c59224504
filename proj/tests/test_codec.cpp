// Copyright 2026 The CRS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "crs/error.hpp"
#include "crs/codec_sim.hpp"
#include "crs/external_encoder.hpp"
#include "crs/rd.hpp"
#include "crs/resample.hpp"
#include "crs/yuv_io.hpp"

namespace crs {
namespace {

namespace fs = std::filesystem;

// Smooth integer-valued test picture with some texture.
Frame natural_frame(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double two_pi = 2.0 * std::acos(-1.0);
  double ph[4];
  for (double& p : ph) p = u(rng) * two_pi;
  Frame f(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      f.y.at(x, y) = round_sample(120 + 50 * std::sin(two_pi * x / 23.0 + ph[0]) +
                                  30 * std::cos(two_pi * y / 17.0 + ph[1]) +
                                  12 * std::sin(two_pi * (x + y) / 5.0 + ph[2]) + 8 * (u(rng) - 0.5));
  for (int y = 0; y < h / 2; ++y)
    for (int x = 0; x < w / 2; ++x) {
      f.u.at(x, y) = round_sample(128 + 30 * std::sin(two_pi * x / 19.0 + ph[3]));
      f.v.at(x, y) = round_sample(128 + 30 * std::cos(two_pi * y / 13.0 + ph[3]));
    }
  return f;
}

Frame shift_left(const Frame& cur, int s) {
  // ref(y, x) = cur(y, x + s), edges replicated
  Frame ref = cur;
  for (int i = 0; i < 3; ++i) {
    const int sh = i == 0 ? s : s / 2;
    Plane& p = ref.plane(i);
    const Plane& c = cur.plane(i);
    for (int y = 0; y < p.height; ++y)
      for (int x = 0; x < p.width; ++x) p.at(x, y) = c.at(std::min(x + sh, p.width - 1), y);
  }
  return ref;
}

long sad(const Plane& cur, const Plane& ref, int x0, int y0, int dy, int dx) {
  long s = 0;
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) s += std::abs(cur.at(x0 + x, y0 + y) - ref.at(x0 + x + dx, y0 + y + dy));
  return s;
}

TEST(QpModel, StepMapping) {
  EXPECT_DOUBLE_EQ(QpModel(4).step(), 1.0);
  EXPECT_DOUBLE_EQ(QpModel(10).step(), 2.0);
  for (int q = 1; q <= 51; ++q) EXPECT_GT(QpModel(q).step(), QpModel(q - 1).step());
  EXPECT_THROW(QpModel(52), ArgumentError);
}

TEST(Dct, OrthonormalRoundTrip) {
  double in[64], c[64], back[64];
  for (int i = 0; i < 64; ++i) in[i] = (i * 37) % 255 - 100.0;
  dct8x8(in, c);
  idct8x8(c, back);
  double e_in = 0, e_c = 0;
  for (int i = 0; i < 64; ++i) {
    EXPECT_NEAR(back[i], in[i], 1e-9);
    e_in += in[i] * in[i];
    e_c += c[i] * c[i];
  }
  EXPECT_NEAR(e_in, e_c, 1e-6);
}

TEST(Intra, ConstantFrameIsExactWithMinimalBits) {
  const Frame f(32, 32, 77, 140);
  const CodedFrame c = simulate_intra(f, QpModel(4));
  EXPECT_EQ(c.recon, f);
  const Frame mid(32, 32, 128, 128);
  const CodedFrame m = simulate_intra(mid, QpModel(4));
  EXPECT_EQ(m.recon, mid);
  EXPECT_DOUBLE_EQ(m.bits, 16 + 4 + 4);  // one bit per empty block
  EXPECT_LT(m.bits, c.bits);
}

TEST(Intra, FineQpIsNearLossless) {
  const Frame f = natural_frame(64, 64, 1);
  EXPECT_GT(psnr(f, simulate_intra(f, QpModel(4)).recon, PlaneSel::y), 45.0);
}

TEST(Intra, CoarserQpCostsFewerBitsAndQuality) {
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const Frame f = natural_frame(64, 64, s);
    const CodedFrame a = simulate_intra(f, QpModel(27)), b = simulate_intra(f, QpModel(42));
    EXPECT_LT(b.bits, a.bits);
    EXPECT_LT(psnr(f, b.recon, PlaneSel::y), psnr(f, a.recon, PlaneSel::y));
  }
}

TEST(Intra, Deterministic) {
  const Frame f = natural_frame(32, 32, 9);
  const CodedFrame a = simulate_intra(f, QpModel(30)), b = simulate_intra(f, QpModel(30));
  EXPECT_EQ(a.recon, b.recon);
  EXPECT_EQ(a.bits, b.bits);
}

TEST(Motion, IdenticalFramesGiveZeroField) {
  const Frame f = natural_frame(32, 32, 2);
  for (const auto& v : estimate_motion(f, f, 4).vectors) EXPECT_EQ(v, (MotionVector{0, 0}));
}

TEST(Motion, ZeroSearchGivesZeroField) {
  const Frame a = natural_frame(32, 32, 3), b = natural_frame(32, 32, 4);
  for (const auto& v : estimate_motion(a, b, 0).vectors) EXPECT_EQ(v, (MotionVector{0, 0}));
}

TEST(Motion, RecoversGlobalShift) {
  const Frame cur = natural_frame(64, 64, 5);
  const Frame ref = shift_left(cur, 3);
  const MotionField mf = estimate_motion(cur, ref, 4);
  for (int by = 0; by < mf.blocks_y; ++by)
    for (int bx = 0; bx < mf.blocks_x; ++bx) {
      const int x0 = bx * 8, y0 = by * 8;
      // SAD oracle: the constructed displacement is a perfect match away from the border.
      if (x0 >= 8) {
        EXPECT_EQ(sad(cur.y, ref.y, x0, y0, 0, -3), 0);
        EXPECT_EQ(mf.at(bx, by), (MotionVector{0, -3})) << bx << "," << by;
      }
    }
}

TEST(Motion, MatchesExhaustiveSadOracle) {
  const Frame cur = natural_frame(32, 32, 6), ref = natural_frame(32, 32, 7);
  const MotionField mf = estimate_motion(cur, ref, 3);
  for (int by = 0; by < 4; ++by)
    for (int bx = 0; bx < 4; ++bx) {
      const auto v = mf.at(bx, by);
      const long got = sad(cur.y, ref.y, bx * 8, by * 8, v.dy, v.dx);
      for (int dy = -3; dy <= 3; ++dy)
        for (int dx = -3; dx <= 3; ++dx) {
          if (by * 8 + dy < 0 || by * 8 + dy + 8 > 32 || bx * 8 + dx < 0 || bx * 8 + dx + 8 > 32) continue;
          EXPECT_LE(got, sad(cur.y, ref.y, bx * 8, by * 8, dy, dx));
        }
    }
}

TEST(Inter, PerfectPredictionReproducesInput) {
  const Frame t = natural_frame(32, 32, 8);
  const CodedFrame c = simulate_inter(t, t, QpModel(4), 4);
  EXPECT_EQ(c.recon, t);
  EXPECT_LT(c.bits, 24 + 16 * 2 + 1e-9);  // empty blocks plus zero vectors
}

TEST(Inter, CoarseQpCollapsesToPrediction) {
  const Frame ref = natural_frame(32, 32, 10);
  Frame t = ref;
  for (auto& s : t.y.samples) s = round_sample(s + 2.0);
  const CodedFrame c = simulate_inter(t, ref, QpModel(47), 2);
  const Frame pred = motion_compensate(ref, estimate_motion(t, ref, 2));
  EXPECT_GT(psnr(c.recon, pred, PlaneSel::y), 45.0);
}

TEST(Inter, DegradedReferenceNeverWins) {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const Frame pristine = natural_frame(64, 64, 100 + s);
    const Frame t = shift_left(pristine, 2);
    const Frame degraded = degrade(pristine);
    const QpModel qp(32);
    const double good = psnr(t, simulate_inter(t, pristine, qp, 4).recon, PlaneSel::y);
    const double bad = psnr(t, simulate_inter(t, degraded, qp, 4).recon, PlaneSel::y);
    EXPECT_LE(bad, good) << "seed " << s;
  }
}

TEST(Inter, SizeMismatch) {
  EXPECT_THROW(simulate_inter(Frame(32, 32), Frame(16, 16), QpModel(4), 1), ShapeError);
}

class External : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("crs_ext_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string script(const std::string& name, const std::string& body) {
    const auto p = dir / name;
    std::ofstream(p) << "#!/bin/sh\n" << body;
    fs::permissions(p, fs::perms::owner_all);
    return p.string();
  }

  EncoderConfig config(const std::string& bin) {
    return EncoderConfig::parse("binary = " + bin +
                                    "\nargs = {input} {output} {qp} {width} {height} {frames}\n"
                                    "rate_log = {output}.rate\n",
                                "test.cfg");
  }

  fs::path dir;
};

TEST_F(External, StubRoundTrip) {
  const auto bin = script("enc.sh",
                          "cp \"$1\" \"$2\"\ni=0\nwhile [ $i -lt $6 ]; do echo \"$i 1000\"; i=$((i+1)); "
                          "done > \"$2.rate\"\n");
  Sequence seq;
  seq.width = seq.orig_width = 32;
  seq.height = seq.orig_height = 32;
  for (int i = 0; i < 3; ++i) seq.frames.push_back(natural_frame(32, 32, 20 + i));
  const auto gops = structure_gop(3, 3, GopMode::ldp, 32);
  const auto runs = external_encode(seq, gops, config(bin), (dir / "work").string());
  ASSERT_EQ(runs.size(), 3u);
  EXPECT_EQ(runs[0].recon, seq.frames[0]);
  EXPECT_EQ(runs[0].bits, 1000);
  EXPECT_EQ(runs[1].tier, Tier::lr);
  EXPECT_EQ(runs[1].recon, bicubic_down(seq.frames[1], 2));
  EXPECT_EQ(runs[2].qp, 27);
}

TEST_F(External, MissingBinary) {
  EXPECT_THROW(run_external(config((dir / "nope").string()), {}), EncoderNotFound);
  EXPECT_THROW(resolve_binary("crs-no-such-encoder-xyz"), EncoderNotFound);
}

TEST_F(External, NonZeroExit) {
  const auto bin = script("fail.sh", "exit 3\n");
  EncodeJob job{(dir / "in.yuv").string(), (dir / "out.yuv").string(), 30, 16, 16, 1};
  write_frames(job.input, {Frame(16, 16)});
  try {
    run_external(config(bin), job);
    FAIL();
  } catch (const EncoderFailed& e) {
    EXPECT_NE(std::string(e.what()).find("status 3"), std::string::npos);
  }
}

TEST_F(External, MalformedRateLogNamesFileAndLine) {
  const auto bin = script("bad.sh", "cp \"$1\" \"$2\"\nprintf '0 12\\nbogus line\\n' > \"$2.rate\"\n");
  EncodeJob job{(dir / "in.yuv").string(), (dir / "out.yuv").string(), 30, 16, 16, 1};
  write_frames(job.input, {Frame(16, 16)});
  try {
    run_external(config(bin), job);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.where(), job.output + ".rate:2");
  }
}

TEST(EncoderConfig, ParseErrors) {
  EXPECT_THROW(EncoderConfig::parse("binary = x\nnonsense\n", "c"), ParseError);
  EXPECT_THROW(EncoderConfig::parse("args = a\nrate_log = r\n", "c"), ParseError);
  const auto cfg = EncoderConfig::parse("# c\nbinary = enc\nargs = -q {qp} -s {width}x{height}\nrate_log = r\n", "c");
  EXPECT_EQ(expand_template(cfg.args, {"i", "o", 37, 64, 48, 2}), "-q 37 -s 64x48");
}

}  // namespace
}  // namespace crs
