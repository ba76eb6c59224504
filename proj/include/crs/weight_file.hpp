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

#include "crs/layers.hpp"

namespace crs {

inline constexpr char kWeightMagic[4] = {'C', 'R', 'S', 'W'};
inline constexpr std::uint32_t kWeightVersion = 1;

struct WeightEntry {
  std::string name;
  Shape shape;
  std::vector<float> values;
};

// Layout (little endian): magic "CRSW", u32 version, u64 seed, u32 count, then
// per tensor u32 name length, name bytes, u32 rank, u32 dims[rank], f32 payload;
// finally u64 FNV-1a over every payload byte in file order.
struct WeightFile {
  std::uint64_t seed = 0;
  std::vector<WeightEntry> entries;
};

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull);

std::vector<std::uint8_t> encode_weights(const WeightFile& wf);
WeightFile decode_weights(const std::vector<std::uint8_t>& bytes, const std::string& where);

WeightFile read_weight_file(const std::string& path);
void write_weight_file(const std::string& path, const WeightFile& wf);

WeightFile snapshot(const ParamStore& store);
// Copies every named tensor into the store. Missing, unknown or mis-shaped
// names are all reported in one error.
void apply_weights(const WeightFile& wf, ParamStore& store);

}  // namespace crs
