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

#include "crs/external_encoder.hpp"

#include <glob.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "crs/resample.hpp"
#include "crs/yuv_io.hpp"

namespace crs {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_args(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

bool is_executable(const std::string& p) {
  std::error_code ec;
  return std::filesystem::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

std::string single_match(const std::string& pattern) {
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<std::string> hits;
  if (rc == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) hits.emplace_back(g.gl_pathv[i]);
  }
  ::globfree(&g);
  if (hits.empty()) throw EncoderFailed("encoder produced no rate log matching " + pattern);
  std::sort(hits.begin(), hits.end());
  return hits.front();
}

std::map<int, double> read_rate_log(const std::string& path, int frames) {
  std::ifstream in(path);
  if (!in) throw EncoderFailed("cannot open rate log " + path);
  std::map<int, double> bits;
  std::string line;
  for (int ln = 1; std::getline(in, line); ++ln) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream is(t);
    int frame = -1;
    double b = 0.0;
    std::string extra;
    if (!(is >> frame >> b) || (is >> extra) || frame < 0 || frame >= frames || !(b >= 0.0)) {
      throw ParseError(path + ":" + std::to_string(ln), "expected '<frame> <bits>', got '" + t + "'");
    }
    bits[frame] = b;
  }
  if (static_cast<int>(bits.size()) != frames) {
    throw ParseError(path, "rate log covers " + std::to_string(bits.size()) + " of " +
                               std::to_string(frames) + " frames");
  }
  return bits;
}

}  // namespace

EncoderConfig EncoderConfig::parse(const std::string& text, const std::string& where) {
  EncoderConfig cfg;
  std::istringstream in(text);
  std::string line;
  for (int ln = 1; std::getline(in, line); ++ln) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    const std::string loc = where + ":" + std::to_string(ln);
    if (eq == std::string::npos) throw ParseError(loc, "expected key = value");
    const std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
    if (key == "binary") cfg.binary = value;
    else if (key == "args") cfg.args = value;
    else if (key == "rate_log") cfg.rate_log = value;
    else throw ParseError(loc, "unknown key '" + key + "'");
  }
  if (cfg.binary.empty()) throw ParseError(where, "missing 'binary'");
  if (cfg.rate_log.empty()) throw ParseError(where, "missing 'rate_log'");
  return cfg;
}

EncoderConfig EncoderConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open encoder config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string expand_template(const std::string& tmpl, const EncodeJob& job) {
  const std::map<std::string, std::string> vars{
      {"input", job.input},
      {"output", job.output},
      {"qp", std::to_string(job.qp)},
      {"width", std::to_string(job.width)},
      {"height", std::to_string(job.height)},
      {"frames", std::to_string(job.frames)}};
  std::string out;
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i);
      if (close != std::string::npos) {
        auto it = vars.find(tmpl.substr(i + 1, close - i - 1));
        if (it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

std::string resolve_binary(const std::string& binary) {
  if (binary.find('/') != std::string::npos) {
    if (is_executable(binary)) return binary;
    throw EncoderNotFound("encoder not found: " + binary);
  }
  const char* path = std::getenv("PATH");
  std::istringstream dirs(path ? path : "");
  for (std::string d; std::getline(dirs, d, ':');) {
    if (d.empty()) continue;
    const std::string cand = d + "/" + binary;
    if (is_executable(cand)) return cand;
  }
  throw EncoderNotFound("encoder not found: " + binary + " (searched PATH)");
}

std::vector<CodedFrame> run_external(const EncoderConfig& cfg, const EncodeJob& job) {
  const std::string exe = resolve_binary(cfg.binary);
  std::vector<std::string> args{exe};
  for (auto& a : split_args(expand_template(cfg.args, job))) args.push_back(a);
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  std::error_code ec;
  std::filesystem::remove(job.output, ec);
  const pid_t pid = ::fork();
  if (pid < 0) throw EncoderFailed(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    ::execv(exe.c_str(), argv.data());
    ::_exit(127);
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw EncoderFailed(std::string("waitpid failed: ") + std::strerror(errno));
  }
  if (!WIFEXITED(status)) throw EncoderFailed(exe + " terminated abnormally");
  if (WEXITSTATUS(status) != 0) {
    throw EncoderFailed(exe + " exited with status " + std::to_string(WEXITSTATUS(status)));
  }
  if (!std::filesystem::exists(job.output)) {
    throw EncoderFailed(exe + " did not write " + job.output);
  }
  std::vector<Frame> recon;
  try {
    recon = read_frames(job.output, job.width, job.height, job.frames);
  } catch (const IoError& e) {
    throw ParseError(job.output, e.what());
  }
  const auto bits = read_rate_log(single_match(expand_template(cfg.rate_log, job)), job.frames);
  std::vector<CodedFrame> out;
  for (int i = 0; i < job.frames; ++i) out.push_back({std::move(recon[i]), bits.at(i)});
  return out;
}

std::vector<CodecRun> external_encode(const Sequence& seq, const std::vector<GopStructure>& gops,
                                      const EncoderConfig& cfg, const std::string& work_dir) {
  std::filesystem::create_directories(work_dir);
  std::vector<CodecRun> runs;
  for (std::size_t g = 0; g < gops.size(); ++g) {
    const auto& gop = gops[g];
    const std::string base = work_dir + "/gop" + std::to_string(g);
    EncodeJob intra{base + "_intra_in.yuv", base + "_intra_out.yuv", gop.qp.qp_intra,
                    seq.width, seq.height, 1};
    write_frames(intra.input, {seq.frames[gop.start]});
    auto coded = run_external(cfg, intra);
    coded[0].recon.tier = Tier::hr;
    runs.push_back({gop.start, FrameRole::intra, Tier::hr, gop.qp.qp_intra, coded[0].bits,
                    std::move(coded[0].recon)});
    if (gop.length < 2) continue;
    std::vector<Frame> lr;
    for (int i = gop.start + 1; i < gop.end(); ++i) lr.push_back(bicubic_down(seq.frames[i], 2));
    EncodeJob inter{base + "_inter_in.yuv", base + "_inter_out.yuv", gop.qp.qp_inter,
                    seq.width / 2, seq.height / 2, static_cast<int>(lr.size())};
    write_frames(inter.input, lr);
    coded = run_external(cfg, inter);
    for (std::size_t k = 0; k < coded.size(); ++k) {
      coded[k].recon.tier = Tier::lr;
      runs.push_back({gop.start + 1 + static_cast<int>(k), FrameRole::inter, Tier::lr,
                      gop.qp.qp_inter, coded[k].bits, std::move(coded[k].recon)});
    }
  }
  return runs;
}

}  // namespace crs
