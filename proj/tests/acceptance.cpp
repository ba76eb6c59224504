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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "crs/codec_sim.hpp"
#include "crs/man.hpp"
#include "crs/pipeline.hpp"
#include "crs/rd.hpp"
#include "crs/report.hpp"
#include "crs/resample.hpp"
#include "crs/selfcheck.hpp"
#include "crs/tcn.hpp"
#include "crs/train.hpp"
#include "crs/yuv_io.hpp"

#ifndef CRS_CLI_PATH
#error "CRS_CLI_PATH must name the crs executable"
#endif

namespace fs = std::filesystem;
using namespace crs;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

Tensor random_tensor(Shape s, std::mt19937_64& rng) {
  Tensor t(std::move(s));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : t.data()) v = static_cast<Real>(u(rng));
  return t;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// 1: brute-force cosine search over every key patch, in double.
Verdict affinity_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> side(2, 8);
  double worst = 0;
  int index_mismatch = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int h = side(rng), w = side(rng);
    const Tensor k = random_tensor({64, h, w}, rng), q = random_tensor({64, h, w}, rng);
    const AffinityResult got = build_affinity(k, q);
    auto patch = [](const Tensor& t, int y, int x) {
      std::vector<double> v;
      auto m = [](int i, int n) { return i < 0 ? -i : (i >= n ? 2 * (n - 1) - i : i); };
      for (int c = 0; c < t.dim(0); ++c)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx)
            v.push_back(t.at(c, m(y + dy, int(t.dim(1))), m(x + dx, int(t.dim(2)))));
      return v;
    };
    for (int i = 0; i < h * w; ++i) {
      const auto qi = patch(q, i / w, i % w);
      const double qn = std::sqrt(std::inner_product(qi.begin(), qi.end(), qi.begin(), 0.0));
      double best = -2;
      int arg = 0;
      for (int j = 0; j < h * w; ++j) {
        const auto kj = patch(k, j / w, j % w);
        const double kn = std::sqrt(std::inner_product(kj.begin(), kj.end(), kj.begin(), 0.0));
        const double c = std::inner_product(qi.begin(), qi.end(), kj.begin(), 0.0) / (qn * kn);
        if (c > best) best = c, arg = j;
      }
      if (got.p[i] != arg) ++index_mismatch;
      worst = std::max(worst, std::abs(got.a.data()[i] - best));
    }
  }
  const double secs = seconds_since(t0);
  return {index_mismatch == 0 && worst <= 1e-6 && secs < 10,
          fmt("index mismatches %.0f, max |dA| %.2e, %.2f s", index_mismatch, worst, secs)};
}

// 2
Verdict dcn_degeneracy() {
  const auto t0 = Clock::now();
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ParamStore store(seed);
    const Man man(store, "", ModelConfig{});
    std::mt19937_64 rng(seed + 100);
    const Tensor feat = random_tensor({64, 16, 16}, rng);
    OffsetPyramid pyr;
    pyr.offsets.push_back(Tensor(Shape{18, 16, 16}));
    pyr.masks.push_back(Tensor(Shape{9, 16, 16}, Real(1)));
    const Tensor got = man.dcn_align(feat, pyr);
    ConvParams p = man.dcn_params();
    p.pad_mode = PadMode::replicate;
    const Tensor want = ops::conv2d(feat, p);
    for (std::int64_t i = 0; i < got.numel(); ++i)
      worst = std::max(worst, double(std::abs(got.data()[i] - want.data()[i])));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-5 && secs < 5, fmt("max |diff| %.2e over 5 seeds, %.2f s", worst, secs)};
}

// 3
Verdict fold_unfold() {
  struct Case {
    int k, s, pad, side;
  };
  const Case cases[] = {{3, 1, 1, 16}, {6, 2, 2, 32}, {12, 4, 4, 64}};
  std::mt19937_64 rng(3);
  double worst = 0;
  for (const auto& c : cases) {
    const Tensor x = random_tensor({4, c.side, c.side}, rng);
    const Tensor back = ops::fold(ops::unfold(x, c.k, c.s, c.pad), 4, c.k, c.s, c.pad, c.side, c.side);
    for (std::int64_t i = 0; i < x.numel(); ++i)
      worst = std::max(worst, double(std::abs(back.data()[i] - x.data()[i])));
  }
  return {worst <= 1e-6, fmt("(3,1) (6,2) (12,4): max |diff| %.2e", worst)};
}

// 4
Verdict gradchecks() {
  const auto t0 = Clock::now();
  const auto entries = f64::run_model_gradchecks();
  double worst = 0;
  std::string name;
  for (const auto& e : entries)
    if (e.max_rel_err >= worst) worst = e.max_rel_err, name = e.name;
  const double secs = seconds_since(t0);
  return {!entries.empty() && worst < 1e-3 && secs < 120,
          std::to_string(entries.size()) + " networks, worst " + name + fmt(" %.2e, %.1f s", worst, secs)};
}

// 5: desk-scale overfit on one synthetic GoP.
Verdict overfit() {
  const auto t0 = Clock::now();
  const Sequence seq = synthetic_sequence(64, 64, 4, 1);
  PipelineConfig cfg;
  cfg.gop_len = 4;
  cfg.qp_intra = 27;
  const DecodedStream d = encode_sequence(seq, cfg);
  CrsModel model(1);
  const auto ys = training_samples(d, seq, false);
  const auto uvs = training_samples(d, seq, true);
  AdamConfig adam;
  adam.lr = 1e-4;
  AdamState sy, suv;
  auto full_loss = [&] { return evaluate_loss(model.luma, ys) + evaluate_loss(model.chroma, uvs); };
  std::vector<double> checkpoints{full_loss()};
  for (int s = 0; s < 200; ++s) {
    const std::size_t k = static_cast<std::size_t>(s) % ys.size();
    train_step(model.luma, std::span(&ys[k], 1), sy, adam);
    train_step(model.chroma, std::span(&uvs[k], 1), suv, adam);
    if ((s + 1) % 50 == 0) checkpoints.push_back(full_loss());
  }
  bool spans_ok = true;
  std::ostringstream os;
  os << "L1 at 0/50/100/150/200:";
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    os << " " << fmt("%.5f", checkpoints[i]);
    if (i > 0 && checkpoints[i] > 0.9 * checkpoints[i - 1]) spans_ok = false;
  }
  const RdReport crs = evaluate(seq, synthesize(model, d));
  const RdReport bic = evaluate(seq, bicubic_baseline(d));
  const double secs = seconds_since(t0);
  os << fmt("; PSNR-Y %.3f vs bicubic %.3f dB; %.0f s", crs.mean_psnr_y, bic.mean_psnr_y, secs);
  return {spans_ok && crs.mean_psnr_y > bic.mean_psnr_y && secs < 600, os.str()};
}

// 6
Verdict resampling() {
  double worst_sum = 0;
  for (int n : {8, 17, 32, 64})
    for (const FilterTaps& t : {bicubic_down_taps(2 * n, 2), bicubic_up_taps(n, 2)})
      for (int o = 0; o < t.out_len; ++o) {
        double s = 0;
        for (int j = 0; j < t.taps; ++j) s += t.weight[o * t.taps + j];
        worst_sum = std::max(worst_sum, std::abs(s - 1));
      }
  bool constant_ok = true;
  for (int level : {0, 1, 77, 128, 254, 255}) {
    const Frame f(64, 48, static_cast<std::uint8_t>(level), static_cast<std::uint8_t>(255 - level));
    constant_ok &= bicubic_down(f, 2) == Frame(32, 24, level, 255 - level);
    constant_ok &= bicubic_up(bicubic_down(f, 2), 2) == f;
    constant_ok &= degrade(f) == f;
  }
  Frame s(128, 128);
  const double pi = std::acos(-1.0);
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 128; ++x)
      s.y.at(x, y) = round_sample(128 + 90 * std::sin(2 * pi * x / 32.0) * std::cos(2 * pi * y / 64.0));
  const double p = psnr(s, degrade(s), PlaneSel::y);
  return {worst_sum < 1e-12 && constant_ok && p > 40,
          fmt("max |sum w - 1| %.1e, ", worst_sum) + (constant_ok ? "constants kept, " : "constants broken, ") +
              fmt("sinusoid %.2f dB", p)};
}

RdCurve make_curve(std::vector<double> r, std::vector<double> q) {
  std::vector<RdPoint> pts;
  for (std::size_t i = 0; i < r.size(); ++i) pts.push_back({r[i], q[i]});
  return RdCurve(std::move(pts));
}

// 7: oracle is a fine trapezoid over the cubic through each curve's four points.
Verdict bd_analytics() {
  const RdCurve a = make_curve({100, 180, 320, 600}, {30.1, 32.6, 35.0, 37.3});
  const RdCurve t = make_curve({90, 150, 290, 520}, {30.4, 32.9, 35.5, 37.6});
  std::vector<RdPoint> cheap = a.points(), lifted = a.points();
  for (auto& p : cheap) p.kbps *= 0.9;
  for (auto& p : lifted) p.psnr += 1.0;
  const double same = bd_rate(a, a), ten = bd_rate(a, RdCurve(cheap)), shift = bd_psnr(a, RdCurve(lifted));

  auto lag = [](const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    double s = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      double l = 1;
      for (std::size_t j = 0; j < 4; ++j)
        if (j != i) l *= (x - xs[j]) / (xs[i] - xs[j]);
      s += ys[i] * l;
    }
    return s;
  };
  std::vector<double> qa, qt, la, lt;
  for (const auto& p : a.points()) qa.push_back(p.psnr), la.push_back(std::log10(p.kbps));
  for (const auto& p : t.points()) qt.push_back(p.psnr), lt.push_back(std::log10(p.kbps));
  const double lo = std::max(qa.front(), qt.front()), hi = std::min(qa.back(), qt.back());
  const int n = 100000;
  double acc = 0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    const double dl = lag(qt, lt, x) - lag(qa, la, x);
    acc += (i == 0 || i == n) ? dl / 2 : dl;
  }
  const double oracle = (std::pow(10.0, acc / n) - 1) * 100;
  const double got = bd_rate(a, t);
  const bool ok = std::abs(same) < 5e-4 && std::abs(ten + 10) <= 0.01 && std::abs(got - oracle) <= 0.05 &&
                  std::abs(shift - 1.0) < 1e-9;
  return {ok, fmt("identical %.4f%%, x0.9 %.4f%%, ", same, ten) +
                  fmt("synthetic %.4f%% vs oracle %.4f%%, shift %.9f dB", got, oracle, shift)};
}

// 8
Verdict qp_schedule() {
  const int intra[] = {32, 37, 42, 47}, inter[] = {27, 32, 37, 42};
  bool ok = true;
  std::string got;
  for (int i = 0; i < 4; ++i) {
    const QpSchedule s = allocate_qp(intra[i]);
    ok &= s.qp_inter == inter[i] && s.delta == 5;
    got += std::to_string(intra[i]) + "->" + std::to_string(s.qp_inter) + " ";
  }
  return {ok, got};
}

// 9
Verdict noise_propagation() {
  int violations = 0;
  double min_gap = 1e9;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Sequence seq = synthetic_sequence(64, 64, 2, seed);
    const Frame& pristine = seq.frames[0];
    const Frame& target = seq.frames[1];
    const QpModel qp(32);
    const double good = psnr(target, simulate_inter(target, pristine, qp, 4).recon, PlaneSel::y);
    const double bad = psnr(target, simulate_inter(target, degrade(pristine), qp, 4).recon, PlaneSel::y);
    if (bad > good) ++violations;
    min_gap = std::min(min_gap, good - bad);
  }
  return {violations == 0, fmt("%.0f/10 trials where the degraded reference won, min gap %.3f dB", violations, min_gap)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// 10
Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "crs_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  write_yuv((root / "in.yuv").string(), synthetic_sequence(64, 64, 5, 9));
  const std::string cli = CRS_CLI_PATH;
  auto run = [&](const std::string& tag) {
    const fs::path dir = root / tag;
    const std::string enc = cli + " encode --input " + (root / "in.yuv").string() +
                            " --width 64 --height 64 --gop 4 --mode ra --qp 32 --out-dir " + dir.string() +
                            " > /dev/null";
    const std::string syn = cli + " synthesize --decoded " + dir.string() + " --seed 7 --output " +
                            (dir / "out.yuv").string() + " --reference " + (root / "in.yuv").string() +
                            " --report " + (dir / "report.json").string() + " > /dev/null";
    return std::system(enc.c_str()) == 0 && std::system(syn.c_str()) == 0;
  };
  if (!run("a") || !run("b")) return {false, "CLI invocation failed"};
  int differing = 0;
  for (const char* f : {"out.yuv", "report.json", "runs.json", "intra.yuv", "inter.yuv"}) {
    const std::string x = slurp(root / "a" / f), y = slurp(root / "b" / f);
    if (x.empty() || x != y) ++differing;
  }
  fs::remove_all(root);
  return {differing == 0, fmt("%.0f of 5 output files differ between runs", differing)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"affinity matches exhaustive oracle", affinity_oracle},
      {"DCN degenerates to conv", dcn_degeneracy},
      {"fold inverts unfold", fold_unfold},
      {"finite-difference gradients", gradchecks},
      {"overfit convergence", overfit},
      {"resampling invariants", resampling},
      {"BD-rate analytics", bd_analytics},
      {"QP allocation", qp_schedule},
      {"noise propagation ordering", noise_propagation},
      {"end-to-end determinism", determinism},
  };
  int failed = 0, n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << "criterion " << n << " " << (v.pass ? "PASS" : "FAIL") << "  " << name << ": " << v.detail
              << std::endl;
  }
  std::cout << (n - failed) << "/" << n << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
