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

#include "crs/yuv_io.hpp"

#include <filesystem>
#include <fstream>

#include "crs/error.hpp"
#include "crs/resample.hpp"

namespace crs {

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw ArgumentError("frame dimensions must be positive, got " + std::to_string(width) + "x" +
                        std::to_string(height));
  }
  if (width % 2 != 0 || height % 2 != 0) {
    throw ArgumentError("4:2:0 frames need even dimensions, got " + std::to_string(width) + "x" +
                        std::to_string(height));
  }
}

Plane pad_plane(const Plane& p, int width, int height) {
  Plane out(width, height);
  for (int y = 0; y < height; ++y) {
    const int sy = reflect_index(y, p.height);
    for (int x = 0; x < width; ++x) out.at(x, y) = p.at(reflect_index(x, p.width), sy);
  }
  return out;
}

Plane crop_plane(const Plane& p, int width, int height) {
  Plane out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out.at(x, y) = p.at(x, y);
  }
  return out;
}

}  // namespace

int aligned_size(int n, int align) { return (n + align - 1) / align * align; }

std::size_t frame_bytes(int width, int height) {
  return static_cast<std::size_t>(width) * height * 3 / 2;
}

Frame pad_frame(const Frame& f, int width, int height) {
  if (width < f.width || height < f.height) throw ShapeError("pad_frame: target smaller than frame");
  Frame out(width, height);
  out.tier = f.tier;
  out.y = pad_plane(f.y, width, height);
  out.u = pad_plane(f.u, width / 2, height / 2);
  out.v = pad_plane(f.v, width / 2, height / 2);
  return out;
}

Frame crop_frame(const Frame& f, int width, int height) {
  if (width > f.width || height > f.height) throw ShapeError("crop_frame: target larger than frame");
  Frame out(width, height);
  out.tier = f.tier;
  out.y = crop_plane(f.y, width, height);
  out.u = crop_plane(f.u, width / 2, height / 2);
  out.v = crop_plane(f.v, width / 2, height / 2);
  return out;
}

std::vector<Frame> read_frames(const std::string& path, int width, int height, int count) {
  check_dims(width, height);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  const std::size_t bytes = frame_bytes(width, height);
  if (count <= 0) {
    const auto size = std::filesystem::file_size(path);
    if (size == 0) throw IoError(path + ": empty file");
    if (size % bytes != 0) {
      throw IoError(path + ": size " + std::to_string(size) + " is not a whole number of " +
                    std::to_string(width) + "x" + std::to_string(height) + " frames");
    }
    count = static_cast<int>(size / bytes);
  }
  std::vector<Frame> frames;
  for (int k = 0; k < count; ++k) {
    Frame f(width, height);
    for (int i = 0; i < 3; ++i) {
      auto& s = f.plane(i).samples;
      in.read(reinterpret_cast<char*>(s.data()), static_cast<std::streamsize>(s.size()));
      if (in.gcount() != static_cast<std::streamsize>(s.size())) {
        throw IoError(path + ": short read at frame " + std::to_string(k));
      }
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

Sequence load_yuv(const std::string& path, int width, int height, int count, int align) {
  Sequence seq;
  seq.orig_width = width;
  seq.orig_height = height;
  seq.width = aligned_size(width, align);
  seq.height = aligned_size(height, align);
  for (auto& f : read_frames(path, width, height, count)) {
    seq.frames.push_back(pad_frame(f, seq.width, seq.height));
  }
  return seq;
}

void write_frames(const std::string& path, const std::vector<Frame>& frames) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path);
  for (const auto& f : frames) {
    for (int i = 0; i < 3; ++i) {
      const auto& s = f.plane(i).samples;
      out.write(reinterpret_cast<const char*>(s.data()), static_cast<std::streamsize>(s.size()));
    }
  }
  if (!out) throw IoError("write failed on " + path);
}

void write_yuv(const std::string& path, const Sequence& seq) {
  const int w = seq.orig_width > 0 ? seq.orig_width : seq.width;
  const int h = seq.orig_height > 0 ? seq.orig_height : seq.height;
  std::vector<Frame> frames;
  frames.reserve(seq.frames.size());
  for (const auto& f : seq.frames) frames.push_back(crop_frame(f, w, h));
  write_frames(path, frames);
}

}  // namespace crs
