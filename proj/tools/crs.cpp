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

// Command-line front end: encode, synthesize, train, metrics, gradcheck.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "crs/pipeline.hpp"
#include "crs/report.hpp"
#include "crs/selfcheck.hpp"
#include "crs/weight_file.hpp"
#include "crs/yuv_io.hpp"

namespace {

struct SeqArgs {
  std::string input;
  int width = 0;
  int height = 0;
  int frames = 0;
  double fps = 30.0;
};

void add_seq_flags(CLI::App* app, SeqArgs& a, bool required) {
  auto* in = app->add_option("--input", a.input, "raw 8-bit YUV 4:2:0 file");
  if (required) in->required();
  app->add_option("--width", a.width, "frame width");
  app->add_option("--height", a.height, "frame height");
  app->add_option("--frames", a.frames, "frames to read (0 = all)");
  app->add_option("--fps", a.fps, "frame rate used for kbps figures");
}

crs::Sequence load_seq(const SeqArgs& a) {
  crs::Sequence s = crs::load_yuv(a.input, a.width, a.height, a.frames);
  s.fps = a.fps;
  return s;
}

struct CodecArgs {
  int gop = 8;
  std::string mode = "ldp";
  int qp = 32;
  int search = 4;
  std::string codec = "sim";
  std::string encoder_config;
};

void add_codec_flags(CLI::App* app, CodecArgs& a) {
  app->add_option("--gop", a.gop, "GoP length");
  app->add_option("--mode", a.mode, "ldp or ra")->check(CLI::IsMember({"ldp", "ra"}));
  app->add_option("--qp", a.qp, "intra QP; inter frames use QP - 5")->check(CLI::Range(0, 51));
  app->add_option("--search", a.search, "motion search radius (simulator)");
  app->add_option("--codec", a.codec, "sim or external")->check(CLI::IsMember({"sim", "external"}));
  app->add_option("--encoder-config", a.encoder_config, "key=value external encoder config");
}

crs::PipelineConfig pipeline_config(const CodecArgs& a, const std::string& work_dir) {
  crs::PipelineConfig c;
  c.gop_len = a.gop;
  c.mode = crs::parse_gop_mode(a.mode);
  c.qp_intra = a.qp;
  c.search = a.search;
  c.codec = crs::parse_codec(a.codec);
  c.work_dir = work_dir;
  if (c.codec == crs::CodecKind::external) {
    if (a.encoder_config.empty()) throw crs::ArgumentError("--codec external needs --encoder-config");
    c.encoder = crs::EncoderConfig::load(a.encoder_config);
  }
  return c;
}

std::unique_ptr<crs::CrsModel> make_model(const std::string& weights, std::uint64_t seed) {
  if (weights.empty()) return std::make_unique<crs::CrsModel>(seed);
  const crs::WeightFile wf = crs::read_weight_file(weights);
  auto m = std::make_unique<crs::CrsModel>(wf.seed);
  crs::apply_weights(wf, m->store);
  return m;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw crs::IoError("cannot create " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-resolution video synthesis toolkit"};
  app.require_subcommand(1);

  SeqArgs enc_seq;
  CodecArgs enc_codec;
  std::string enc_out = "decoded";
  auto* encode = app.add_subcommand("encode", "code a sequence: HR intra, LR inter frames");
  add_seq_flags(encode, enc_seq, true);
  add_codec_flags(encode, enc_codec);
  encode->add_option("--out-dir", enc_out, "directory for intra.yuv, inter.yuv, runs.json");

  std::string syn_dir = "decoded", syn_weights, syn_output = "synth.yuv", syn_ref, syn_report;
  std::uint64_t syn_seed = 1;
  auto* synth = app.add_subcommand("synthesize", "rebuild HR video from decoded tiers");
  synth->add_option("--decoded", syn_dir, "directory written by encode");
  synth->add_option("--weights", syn_weights, "weight file (default: initial weights from --seed)");
  synth->add_option("--seed", syn_seed, "initialization seed when no weights are given");
  synth->add_option("--output", syn_output, "output YUV");
  synth->add_option("--reference", syn_ref, "original YUV for a report");
  synth->add_option("--report", syn_report, "JSON report path (needs --reference)");

  SeqArgs tr_seq;
  CodecArgs tr_codec;
  tr_codec.gop = 4;
  tr_codec.qp = 27;
  int tr_steps = 200, tr_size = 64;
  double tr_lr = 1e-4;
  std::uint64_t tr_seed = 1;
  std::string tr_weights = "weights.crsw", tr_log;
  auto* train = app.add_subcommand("train", "desk-scale overfit on one sequence");
  add_seq_flags(train, tr_seq, false);
  add_codec_flags(train, tr_codec);
  train->add_option("--steps", tr_steps, "Adam steps (0 writes the initial weights)");
  train->add_option("--lr", tr_lr, "learning rate");
  train->add_option("--seed", tr_seed, "initialization seed");
  train->add_option("--size", tr_size, "synthetic frame size when no --input is given");
  train->add_option("--weights", tr_weights, "output weight file");
  train->add_option("--log", tr_log, "CSV of step,loss_y,loss_uv");

  std::string m_ref, m_test, m_runs, m_anchor, m_tcurve, m_out;
  int m_w = 0, m_h = 0;
  auto* metrics = app.add_subcommand("metrics", "PSNR report and optional BD-rate");
  metrics->add_option("--reference", m_ref, "original YUV");
  metrics->add_option("--test", m_test, "reconstructed YUV");
  metrics->add_option("--width", m_w, "frame width");
  metrics->add_option("--height", m_h, "frame height");
  metrics->add_option("--runs", m_runs, "decoded directory whose runs.json supplies bits");
  metrics->add_option("--anchor-curve", m_anchor, "anchor RD curve JSON");
  metrics->add_option("--test-curve", m_tcurve, "test RD curve JSON");
  metrics->add_option("--output", m_out, "report path (default stdout)");

  crs::SelfCheckOptions gc;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference model self-test");
  gradcheck->add_option("--size", gc.size, "HR edge length");
  gradcheck->add_option("--samples", gc.max_samples, "probes per checked tensor");
  gradcheck->add_option("--seed", gc.seed, "seed");
  gradcheck->add_option("--eps", gc.eps, "finite-difference step");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*encode) {
      const crs::Sequence seq = load_seq(enc_seq);
      std::filesystem::create_directories(enc_out);
      const auto d = crs::encode_sequence(seq, pipeline_config(enc_codec, enc_out + "/work"));
      crs::save_decoded(d, enc_out);
      std::cout << "encoded " << d.frame_count() << " frames into " << enc_out << "\n";
    } else if (*synth) {
      const auto d = crs::load_decoded(syn_dir);
      const auto model = make_model(syn_weights, syn_seed);
      const crs::Sequence out = crs::synthesize(*model, d);
      crs::write_yuv(syn_output, out);
      if (!syn_report.empty()) {
        if (syn_ref.empty()) throw crs::ArgumentError("--report needs --reference");
        crs::Sequence ref = crs::load_yuv(syn_ref, d.orig_width, d.orig_height, d.frame_count());
        ref.fps = d.fps;
        write_text(syn_report, crs::report_json(crs::evaluate(ref, out, d.runs)));
      }
      std::cout << "synthesized " << out.size() << " frames into " << syn_output << "\n";
    } else if (*train) {
      crs::Sequence seq = tr_seq.input.empty()
                              ? crs::synthetic_sequence(tr_size, tr_size, tr_codec.gop, tr_seed)
                              : load_seq(tr_seq);
      const auto d = crs::encode_sequence(seq, pipeline_config(tr_codec, "train_work"));
      crs::CrsModel model(tr_seed);
      const auto ys = crs::training_samples(d, seq, false);
      const auto uvs = crs::training_samples(d, seq, true);
      if (tr_steps > 0 && ys.empty()) throw crs::ArgumentError("train: sequence has no inter frames");
      crs::AdamConfig cfg;
      cfg.lr = tr_lr;
      crs::AdamState sy, suv;
      std::ofstream log;
      if (!tr_log.empty()) {
        log.open(tr_log, std::ios::trunc);
        log << "step,loss_y,loss_uv\n";
      }
      for (int s = 0; s < tr_steps; ++s) {
        const std::size_t k = static_cast<std::size_t>(s) % ys.size();
        const double ly = crs::train_step(model.luma, std::span(&ys[k], 1), sy, cfg);
        const double luv = crs::train_step(model.chroma, std::span(&uvs[k], 1), suv, cfg);
        if (log) log << s << "," << ly << "," << luv << std::endl;
        if (s % 10 == 0) std::cout << "step " << s << " loss_y " << ly << " loss_uv " << luv << std::endl;
      }
      crs::write_weight_file(tr_weights, crs::snapshot(model.store));
      std::cout << "wrote " << tr_weights << " (" << model.store.parameter_count()
                << " parameters)\n";
    } else if (*metrics) {
      crs::RdReport r;
      if (!m_ref.empty() || !m_test.empty()) {
        if (m_ref.empty() || m_test.empty()) throw crs::ArgumentError("metrics needs --reference and --test");
        const auto a = crs::load_yuv(m_ref, m_w, m_h);
        const auto b = crs::load_yuv(m_test, m_w, m_h);
        std::vector<crs::CodecRun> runs;
        if (!m_runs.empty()) runs = crs::load_decoded(m_runs).runs;
        r = crs::evaluate(a, b, runs);
      }
      if (!m_anchor.empty() || !m_tcurve.empty()) {
        if (m_anchor.empty() || m_tcurve.empty()) {
          throw crs::ArgumentError("BD metrics need --anchor-curve and --test-curve");
        }
        const auto a = crs::load_curve(m_anchor);
        const auto t = crs::load_curve(m_tcurve);
        r.bd = crs::compare_curves(a.label, a.curve, t.label, t.curve);
      }
      const std::string text = crs::report_json(r);
      if (m_out.empty()) std::cout << text;
      else write_text(m_out, text);
    } else if (*gradcheck) {
      bool ok = true;
      for (const auto& e : crs::f64::run_model_gradchecks(gc)) {
        const bool pass = e.max_rel_err < 1e-3;
        ok = ok && pass;
        std::printf("%-24s max_rel_err %.3e over %lld probes (%.1f s) %s\n", e.name.c_str(),
                    e.max_rel_err, static_cast<long long>(e.checked), e.seconds,
                    pass ? "ok" : "FAIL");
        if (!pass) std::printf("  worst: %s\n", e.worst.c_str());
      }
      return ok ? 0 : 1;
    }
  } catch (const crs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
