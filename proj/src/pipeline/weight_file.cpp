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

#include "crs/weight_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

namespace crs {

static_assert(std::endian::native == std::endian::little, "weight files assume a little-endian host");

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
 public:
  Reader(const std::vector<std::uint8_t>& b, std::string where) : b_(b), where_(std::move(where)) {}

  template <typename T>
  T get(const char* what) {
    T v;
    need(sizeof(T), what);
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  const std::uint8_t* take(std::size_t n, const char* what) {
    need(n, what);
    const auto* p = b_.data() + pos_;
    pos_ += n;
    return p;
  }

  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (b_.size() - pos_ < n) {
      throw ParseError(where_, std::string("truncated while reading ") + what + " at byte " +
                                   std::to_string(pos_));
    }
  }
  const std::vector<std::uint8_t>& b_;
  std::string where_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<std::uint8_t> encode_weights(const WeightFile& wf) {
  std::vector<std::uint8_t> out(kWeightMagic, kWeightMagic + 4);
  put<std::uint32_t>(out, kWeightVersion);
  put<std::uint64_t>(out, wf.seed);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(wf.entries.size()));
  std::uint64_t sum = 0xcbf29ce484222325ull;
  for (const auto& e : wf.entries) {
    if (static_cast<std::int64_t>(e.values.size()) != shape_numel(e.shape)) {
      throw ShapeError("weight " + e.name + ": payload does not match shape " + shape_str(e.shape));
    }
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.name.size()));
    out.insert(out.end(), e.name.begin(), e.name.end());
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.shape.size()));
    for (auto d : e.shape) put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    const std::size_t bytes = e.values.size() * sizeof(float);
    const auto* p = reinterpret_cast<const std::uint8_t*>(e.values.data());
    out.insert(out.end(), p, p + bytes);
    sum = fnv1a64(p, bytes, sum);
  }
  put<std::uint64_t>(out, sum);
  return out;
}

WeightFile decode_weights(const std::vector<std::uint8_t>& bytes, const std::string& where) {
  Reader r(bytes, where);
  const auto* magic = r.take(4, "magic");
  if (std::memcmp(magic, kWeightMagic, 4) != 0) throw ParseError(where, "not a CRSW weight file");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kWeightVersion) {
    throw ParseError(where, "unsupported weight format version " + std::to_string(version));
  }
  WeightFile wf;
  wf.seed = r.get<std::uint64_t>("seed");
  const auto count = r.get<std::uint32_t>("tensor count");
  std::uint64_t sum = 0xcbf29ce484222325ull;
  for (std::uint32_t i = 0; i < count; ++i) {
    WeightEntry e;
    const auto len = r.get<std::uint32_t>("name length");
    const auto* name = r.take(len, "name");
    e.name.assign(reinterpret_cast<const char*>(name), len);
    const auto rank = r.get<std::uint32_t>("rank");
    for (std::uint32_t k = 0; k < rank; ++k) e.shape.push_back(r.get<std::uint32_t>("dims"));
    const std::size_t n = static_cast<std::size_t>(shape_numel(e.shape));
    const auto* payload = r.take(n * sizeof(float), "payload");
    e.values.resize(n);
    std::memcpy(e.values.data(), payload, n * sizeof(float));
    sum = fnv1a64(payload, n * sizeof(float), sum);
    wf.entries.push_back(std::move(e));
  }
  const auto stored = r.get<std::uint64_t>("checksum");
  if (stored != sum) throw ParseError(where, "checksum mismatch, file is corrupt");
  if (r.remaining() != 0) throw ParseError(where, "trailing bytes after checksum");
  return wf;
}

WeightFile read_weight_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open weight file " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_weights(bytes, path);
}

void write_weight_file(const std::string& path, const WeightFile& wf) {
  const auto bytes = encode_weights(wf);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create weight file " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed on " + path);
}

WeightFile snapshot(const ParamStore& store) {
  WeightFile wf;
  wf.seed = store.seed();
  for (const auto& [name, t] : store.entries()) {
    WeightEntry e{name, t.shape(), {}};
    e.values.reserve(static_cast<std::size_t>(t.numel()));
    for (Real v : t.data()) e.values.push_back(static_cast<float>(v));
    wf.entries.push_back(std::move(e));
  }
  return wf;
}

void apply_weights(const WeightFile& wf, ParamStore& store) {
  std::map<std::string, const WeightEntry*> by_name;
  std::vector<std::string> problems;
  for (const auto& e : wf.entries) {
    if (!by_name.emplace(e.name, &e).second) problems.push_back("duplicate " + e.name);
  }
  std::set<std::string> known;
  for (const auto& [name, t] : store.entries()) {
    known.insert(name);
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      problems.push_back("missing " + name);
    } else if (it->second->shape != t.shape()) {
      problems.push_back("shape of " + name + " is " + shape_str(it->second->shape) +
                         ", model expects " + shape_str(t.shape()));
    }
  }
  for (const auto& e : wf.entries) {
    if (known.count(e.name) == 0) problems.push_back("unknown " + e.name);
  }
  if (!problems.empty()) {
    std::ostringstream os;
    os << "weight file does not match the model (" << problems.size() << " problems):";
    for (const auto& p : problems) os << "\n  " << p;
    throw ArgumentError(os.str());
  }
  for (const auto& [name, t] : store.entries()) {
    const auto& src = by_name.at(name)->values;
    Tensor dst = t;
    auto d = dst.data();
    for (std::size_t i = 0; i < src.size(); ++i) d[i] = static_cast<Real>(src[i]);
  }
}

}  // namespace crs
