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

#include <string>
#include <vector>

#include "crs/codec_sim.hpp"
#include "crs/error.hpp"

namespace crs {

class EncoderNotFound : public Error {
 public:
  using Error::Error;
};

class EncoderFailed : public Error {
 public:
  using Error::Error;
};

// Plain key=value file:
//   binary   = path or name searched on PATH
//   args     = argument template; {input} {output} {qp} {width} {height} {frames}
//   rate_log = glob for the "<frame> <bits>" log; same placeholders allowed
struct EncoderConfig {
  std::string binary;
  std::string args;
  std::string rate_log;

  static EncoderConfig parse(const std::string& text, const std::string& where);
  static EncoderConfig load(const std::string& path);
};

struct EncodeJob {
  std::string input;
  std::string output;
  int qp = 0;
  int width = 0;
  int height = 0;
  int frames = 0;
};

std::string expand_template(const std::string& tmpl, const EncodeJob& job);
std::string resolve_binary(const std::string& binary);

// Runs the encoder once and returns (reconstruction, bits) per coded frame.
std::vector<CodedFrame> run_external(const EncoderConfig& cfg, const EncodeJob& job);

// One invocation for the HR intra and one for the LR inters of every GoP.
// Frames of the returned list follow sequence order.
std::vector<CodecRun> external_encode(const Sequence& seq, const std::vector<GopStructure>& gops,
                                      const EncoderConfig& cfg, const std::string& work_dir);

}  // namespace crs
