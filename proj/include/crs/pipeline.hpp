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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crs/codec_sim.hpp"
#include "crs/crs_net.hpp"
#include "crs/external_encoder.hpp"
#include "crs/gop.hpp"
#include "crs/train.hpp"

namespace crs {

enum class CodecKind { sim, external };

CodecKind parse_codec(const std::string& s);
std::string to_string(CodecKind c);

struct PipelineConfig {
  int gop_len = 8;
  GopMode mode = GopMode::ldp;
  int qp_intra = 32;
  int search = 4;
  CodecKind codec = CodecKind::sim;
  EncoderConfig encoder;         // used when codec == external
  std::string work_dir = ".";    // scratch space for the external encoder
};

// Everything a decoder holds after the codec: HR intra and LR inter reconstructions.
struct DecodedStream {
  int width = 0;   // padded HR dimensions
  int height = 0;
  int orig_width = 0;
  int orig_height = 0;
  double fps = 30.0;
  int gop_len = 0;
  GopMode mode = GopMode::ldp;
  int qp_intra = 0;
  CodecKind codec = CodecKind::sim;
  std::vector<GopStructure> gops;
  std::vector<CodecRun> runs;  // one per frame, sequence order

  int frame_count() const { return static_cast<int>(runs.size()); }
  const GopStructure& gop_of(int frame) const;
};

DecodedStream encode_sequence(const Sequence& seq, const PipelineConfig& cfg);

// intra.yuv (HR), inter.yuv (LR) and runs.json inside `dir`.
void save_decoded(const DecodedStream& d, const std::string& dir);
DecodedStream load_decoded(const std::string& dir);
std::string runs_json(const DecodedStream& d);

// LR temporal window (edge frames replicated inside the GoP) and HR intra references.
struct SynthesisContext {
  std::vector<const Frame*> window;
  int center = 1;
  std::vector<const Frame*> refs;
};

SynthesisContext synthesis_context(const DecodedStream& d, int frame);

Frame synthesize_frame(const CrsModel& model, const DecodedStream& d, int frame);
// Padded output; write_yuv crops to the original size.
Sequence synthesize(const CrsModel& model, const DecodedStream& d);
Sequence bicubic_baseline(const DecodedStream& d);

struct PipelineResult {
  Sequence recon;
  std::vector<CodecRun> runs;
};

PipelineResult run_pipeline(const Sequence& seq, const PipelineConfig& cfg, const CrsModel& model);

// One sample per inter frame; targets are the padded originals.
std::vector<TrainSample> training_samples(const DecodedStream& d, const Sequence& original,
                                          bool chroma);

// Deterministic textured test content drifting one pixel per frame.
Sequence synthetic_sequence(int width, int height, int frames, std::uint64_t seed);

}  // namespace crs
