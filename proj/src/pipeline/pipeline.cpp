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

#include "crs/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "crs/resample.hpp"
#include "crs/yuv_io.hpp"
#include "json.hpp"

namespace crs {

using json = nlohmann::ordered_json;

CodecKind parse_codec(const std::string& s) {
  if (s == "sim") return CodecKind::sim;
  if (s == "external") return CodecKind::external;
  throw ArgumentError("unknown codec '" + s + "' (expected sim or external)");
}

std::string to_string(CodecKind c) { return c == CodecKind::sim ? "sim" : "external"; }

const GopStructure& DecodedStream::gop_of(int frame) const {
  for (const auto& g : gops) {
    if (frame >= g.start && frame < g.end()) return g;
  }
  throw ArgumentError("frame " + std::to_string(frame) + " outside the coded sequence");
}

namespace {

std::vector<CodecRun> simulate_gops(const Sequence& seq, const std::vector<GopStructure>& gops,
                                    int search) {
  std::vector<CodecRun> runs;
  for (const auto& g : gops) {
    const QpModel qi(g.qp.qp_intra), qp(g.qp.qp_inter);
    CodedFrame intra = simulate_intra(seq.frames[g.start], qi);
    intra.recon.tier = Tier::hr;
    // The intra enters the LR prediction chain downscaled.
    Frame ref = bicubic_down(intra.recon, 2);
    runs.push_back({g.start, FrameRole::intra, Tier::hr, qi.qp, intra.bits, std::move(intra.recon)});
    for (int i = g.start + 1; i < g.end(); ++i) {
      Frame lr = bicubic_down(seq.frames[i], 2);
      lr.tier = Tier::lr;
      CodedFrame c = simulate_inter(lr, ref, qp, search);
      c.recon.tier = Tier::lr;
      ref = c.recon;
      runs.push_back({i, FrameRole::inter, Tier::lr, qp.qp, c.bits, std::move(c.recon)});
    }
  }
  return runs;
}

void check_sequence(const Sequence& seq) {
  if (seq.frames.empty()) throw ArgumentError("empty sequence");
  if (seq.width % kAlign != 0 || seq.height % kAlign != 0) {
    throw ShapeError("sequence dimensions " + std::to_string(seq.width) + "x" +
                     std::to_string(seq.height) + " are not padded to a multiple of " +
                     std::to_string(kAlign));
  }
  for (const auto& f : seq.frames) {
    if (f.width != seq.width || f.height != seq.height) {
      throw ShapeError("sequence frames differ in size");
    }
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

DecodedStream encode_sequence(const Sequence& seq, const PipelineConfig& cfg) {
  check_sequence(seq);
  DecodedStream d;
  d.width = seq.width;
  d.height = seq.height;
  d.orig_width = seq.orig_width > 0 ? seq.orig_width : seq.width;
  d.orig_height = seq.orig_height > 0 ? seq.orig_height : seq.height;
  d.fps = seq.fps;
  d.gop_len = cfg.gop_len;
  d.mode = cfg.mode;
  d.qp_intra = cfg.qp_intra;
  d.codec = cfg.codec;
  d.gops = structure_gop(seq.size(), cfg.gop_len, cfg.mode, cfg.qp_intra);
  d.runs = cfg.codec == CodecKind::sim ? simulate_gops(seq, d.gops, cfg.search)
                                       : external_encode(seq, d.gops, cfg.encoder, cfg.work_dir);
  return d;
}

std::string runs_json(const DecodedStream& d) {
  json j;
  j["format"] = "crs-decoded";
  j["version"] = 1;
  j["width"] = d.width;
  j["height"] = d.height;
  j["orig_width"] = d.orig_width;
  j["orig_height"] = d.orig_height;
  j["fps"] = d.fps;
  j["frames"] = d.frame_count();
  j["gop"] = d.gop_len;
  j["mode"] = to_string(d.mode);
  j["qp_intra"] = d.qp_intra;
  j["codec"] = to_string(d.codec);
  double total = 0.0;
  json runs = json::array();
  for (const auto& r : d.runs) {
    total += r.bits;
    runs.push_back({{"frame", r.frame},
                    {"role", to_string(r.role)},
                    {"tier", r.tier == Tier::hr ? "hr" : "lr"},
                    {"qp", r.qp},
                    {"bits", r.bits}});
  }
  j["total_bits"] = total;
  j["runs"] = std::move(runs);
  return j.dump(2) + "\n";
}

void save_decoded(const DecodedStream& d, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::vector<Frame> intra, inter;
  for (const auto& r : d.runs) (r.role == FrameRole::intra ? intra : inter).push_back(r.recon);
  write_frames(dir + "/intra.yuv", intra);
  write_frames(dir + "/inter.yuv", inter);
  std::ofstream out(dir + "/runs.json", std::ios::trunc);
  if (!out) throw IoError("cannot create " + dir + "/runs.json");
  out << runs_json(d);
}

DecodedStream load_decoded(const std::string& dir) {
  const std::string where = dir + "/runs.json";
  json j;
  try {
    j = json::parse(read_text(where));
  } catch (const json::parse_error& e) {
    throw ParseError(where, e.what());
  }
  DecodedStream d;
  try {
    if (j.at("format").get<std::string>() != "crs-decoded") throw ParseError(where, "unexpected format");
    d.width = j.at("width").get<int>();
    d.height = j.at("height").get<int>();
    d.orig_width = j.at("orig_width").get<int>();
    d.orig_height = j.at("orig_height").get<int>();
    d.fps = j.at("fps").get<double>();
    d.gop_len = j.at("gop").get<int>();
    d.mode = parse_gop_mode(j.at("mode").get<std::string>());
    d.qp_intra = j.at("qp_intra").get<int>();
    d.codec = parse_codec(j.at("codec").get<std::string>());
    const int frames = j.at("frames").get<int>();
    d.gops = structure_gop(frames, d.gop_len, d.mode, d.qp_intra);
    for (const auto& r : j.at("runs")) {
      CodecRun run;
      run.frame = r.at("frame").get<int>();
      run.role = r.at("role").get<std::string>() == "intra" ? FrameRole::intra : FrameRole::inter;
      run.tier = r.at("tier").get<std::string>() == "hr" ? Tier::hr : Tier::lr;
      run.qp = r.at("qp").get<int>();
      run.bits = r.at("bits").get<double>();
      d.runs.push_back(std::move(run));
    }
    if (d.frame_count() != frames) throw ParseError(where, "run count does not match frame count");
  } catch (const json::exception& e) {
    throw ParseError(where, e.what());
  }
  int n_intra = 0, n_inter = 0;
  for (const auto& r : d.runs) {
    const auto& g = d.gop_of(r.frame);
    const bool intra = r.frame == g.start;
    if (intra != (r.role == FrameRole::intra)) {
      throw ParseError(where, "frame " + std::to_string(r.frame) + " role disagrees with the GoP layout");
    }
    (intra ? n_intra : n_inter)++;
  }
  const auto intra = read_frames(dir + "/intra.yuv", d.width, d.height, n_intra);
  std::vector<Frame> inter;
  if (n_inter > 0) inter = read_frames(dir + "/inter.yuv", d.width / 2, d.height / 2, n_inter);
  std::size_t ki = 0, kp = 0;
  for (auto& r : d.runs) {
    r.recon = r.role == FrameRole::intra ? intra[ki++] : inter[kp++];
    r.recon.tier = r.tier;
  }
  return d;
}

SynthesisContext synthesis_context(const DecodedStream& d, int frame) {
  const GopStructure& g = d.gop_of(frame);
  if (frame == g.start) throw ArgumentError("frame " + std::to_string(frame) + " is an intra frame");
  SynthesisContext ctx;
  const int lo = g.start + 1, hi = g.end() - 1;
  for (int k = frame - 1; k <= frame + 1; ++k) {
    ctx.window.push_back(&d.runs[static_cast<std::size_t>(std::clamp(k, lo, hi))].recon);
  }
  ctx.center = 1;
  for (int r : g.frames[static_cast<std::size_t>(frame - g.start)].intra_refs) {
    ctx.refs.push_back(&d.runs[static_cast<std::size_t>(r)].recon);
  }
  return ctx;
}

namespace {

struct TensorSet {
  TemporalWindow window;
  std::vector<Tensor> refs;
};

TensorSet tensors_for(const SynthesisContext& ctx, bool chroma) {
  std::map<const Frame*, Tensor> cache;
  auto get = [&](const Frame* f) {
    auto it = cache.find(f);
    if (it == cache.end()) it = cache.emplace(f, chroma ? chroma_tensor(*f) : luma_tensor(*f)).first;
    return it->second;
  };
  TensorSet s;
  for (const Frame* f : ctx.window) s.window.frames.push_back(get(f));
  s.window.center = ctx.center;
  for (const Frame* f : ctx.refs) s.refs.push_back(get(f));
  return s;
}

}  // namespace

Frame synthesize_frame(const CrsModel& model, const DecodedStream& d, int frame) {
  const CodecRun& run = d.runs.at(static_cast<std::size_t>(frame));
  if (run.role == FrameRole::intra) return run.recon;
  const SynthesisContext ctx = synthesis_context(d, frame);
  Frame out(d.width, d.height);
  out.tier = Tier::hr;
  {
    const TensorSet s = tensors_for(ctx, false);
    out.y = tensor_plane(model.luma.forward(s.window, s.refs), 0);
  }
  {
    const TensorSet s = tensors_for(ctx, true);
    const Tensor o = model.chroma.forward(s.window, s.refs);
    out.u = tensor_plane(o, 0);
    out.v = tensor_plane(o, 1);
  }
  return out;
}

namespace {

Sequence output_sequence(const DecodedStream& d) {
  Sequence s;
  s.width = d.width;
  s.height = d.height;
  s.orig_width = d.orig_width;
  s.orig_height = d.orig_height;
  s.fps = d.fps;
  return s;
}

}  // namespace

Sequence synthesize(const CrsModel& model, const DecodedStream& d) {
  Sequence s = output_sequence(d);
  for (int i = 0; i < d.frame_count(); ++i) s.frames.push_back(synthesize_frame(model, d, i));
  return s;
}

Sequence bicubic_baseline(const DecodedStream& d) {
  Sequence s = output_sequence(d);
  for (const auto& r : d.runs) {
    s.frames.push_back(r.role == FrameRole::intra ? r.recon : bicubic_up(r.recon, 2));
    s.frames.back().tier = Tier::hr;
  }
  return s;
}

PipelineResult run_pipeline(const Sequence& seq, const PipelineConfig& cfg, const CrsModel& model) {
  const DecodedStream d = encode_sequence(seq, cfg);
  return {synthesize(model, d), d.runs};
}

std::vector<TrainSample> training_samples(const DecodedStream& d, const Sequence& original,
                                          bool chroma) {
  if (original.size() != d.frame_count()) {
    throw ArgumentError("training_samples: original has " + std::to_string(original.size()) +
                        " frames, stream has " + std::to_string(d.frame_count()));
  }
  std::vector<TrainSample> out;
  for (const auto& r : d.runs) {
    if (r.role != FrameRole::inter) continue;
    TensorSet s = tensors_for(synthesis_context(d, r.frame), chroma);
    const Frame& gt = original.frames[static_cast<std::size_t>(r.frame)];
    out.push_back({std::move(s.window), std::move(s.refs), chroma ? chroma_tensor(gt) : luma_tensor(gt)});
  }
  return out;
}

Sequence synthetic_sequence(int width, int height, int frames, std::uint64_t seed) {
  if (width <= 0 || height <= 0 || width % 2 || height % 2 || frames <= 0) {
    throw ArgumentError("synthetic_sequence: bad geometry");
  }
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); };
  struct Wave {
    double fx, fy, phase, amp;
  };
  const double two_pi = 2.0 * std::acos(-1.0);
  std::vector<Wave> luma, chroma_u, chroma_v;
  for (int i = 0; i < 6; ++i) {
    const double period = uni(3.0, 14.0), angle = uni(0.0, two_pi);
    luma.push_back({std::cos(angle) / period, std::sin(angle) / period, uni(0.0, two_pi), uni(10.0, 24.0)});
  }
  for (int i = 0; i < 2; ++i) {
    const double period = uni(12.0, 40.0), angle = uni(0.0, two_pi);
    chroma_u.push_back({std::cos(angle) / period, std::sin(angle) / period, uni(0.0, two_pi), uni(8.0, 20.0)});
    chroma_v.push_back({std::sin(angle) / period, std::cos(angle) / period, uni(0.0, two_pi), uni(8.0, 20.0)});
  }
  auto eval = [&](const std::vector<Wave>& ws, double x, double y, double base) {
    double v = base;
    for (const auto& w : ws) v += w.amp * std::sin(two_pi * (w.fx * x + w.fy * y) + w.phase);
    return v;
  };
  Sequence seq;
  seq.width = seq.orig_width = width;
  seq.height = seq.orig_height = height;
  for (int t = 0; t < frames; ++t) {
    Frame f(width, height);
    const double ox = t;  // one pixel of horizontal drift per frame
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) f.y.at(x, y) = round_sample(eval(luma, x + ox, y, 128.0));
    for (int y = 0; y < height / 2; ++y)
      for (int x = 0; x < width / 2; ++x) {
        const double hx = 2 * x + 0.5 + ox, hy = 2 * y + 0.5;
        f.u.at(x, y) = round_sample(eval(chroma_u, hx, hy, 120.0));
        f.v.at(x, y) = round_sample(eval(chroma_v, hx, hy, 136.0));
      }
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

}  // namespace crs
