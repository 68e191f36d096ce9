// Copyright 2026 The smpsde Authors.
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

#include "smpsde/prm.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace smpsde {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

Philox4x32::Counter block_counter(std::uint64_t block, std::uint64_t stream_id) {
  return {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
          static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
}

Philox4x32::Key seed_key(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

std::array<std::uint64_t, 2> block_words(std::uint64_t seed, std::uint64_t stream_id,
                                         std::uint64_t block) {
  const auto r = Philox4x32::generate(block_counter(block, stream_id), seed_key(seed));
  return {(static_cast<std::uint64_t>(r[1]) << 32) | r[0],
          (static_cast<std::uint64_t>(r[3]) << 32) | r[2]};
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_id(std::uint64_t parent, std::uint64_t index) {
  return mix64(mix64(parent) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {}

std::uint64_t CounterRng::next_u64() {
  if (buffered_ == 0) {
    buffer_ = block_words(seed_, stream_id_, block_++);
    buffered_ = 2;
  }
  return buffer_[static_cast<std::size_t>(2 - buffered_--)];
}

double CounterRng::uniform() { return to_unit(next_u64()); }
double CounterRng::uniform_open() { return to_open_unit(next_u64()); }

void CounterRng::seek(std::uint64_t block) {
  block_ = block;
  buffered_ = 0;
}

PointStream::PointStream(std::uint64_t seed, std::uint64_t stream_id, double strip_height)
    : seed_(seed), stream_id_(stream_id), height_(strip_height) {
  if (!(strip_height >= 0.0) || !std::isfinite(strip_height)) {
    throw std::invalid_argument("strip height must be finite and nonnegative");
  }
}

Point PointStream::next_point() {
  if (height_ == 0.0) {
    cursor_ = std::numeric_limits<double>::infinity();
    return {cursor_, 0.0};
  }
  const auto words = block_words(seed_, stream_id_, emitted_++);
  double t = cursor_ - std::log(CounterRng::to_open_unit(words[0])) / height_;
  if (!(t > cursor_)) t = std::nextafter(cursor_, std::numeric_limits<double>::infinity());
  double v = CounterRng::to_unit(words[1]) * height_;
  if (v >= height_) v = std::nextafter(height_, 0.0);
  cursor_ = t;
  return {t, v};
}

PointStream PointStream::child(std::uint64_t index) const {
  return PointStream(seed_, derive_stream_id(stream_id_, index), height_);
}

std::vector<PointStream> PointStream::fork(std::size_t k) const {
  if (k < 1) throw std::invalid_argument("fork needs k >= 1");
  std::vector<PointStream> out;
  out.reserve(k);
  for (std::size_t c = 0; c < k; ++c) out.push_back(child(c));
  return out;
}

void write_points_csv(std::ostream& os, PointStream stream, double horizon) {
  os << "u,v\n";
  char buf[64];
  for (Point p = stream.next_point(); p.time <= horizon; p = stream.next_point()) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.time, p.mark);
    os << buf;
  }
}

}  // namespace smpsde
