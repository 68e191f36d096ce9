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

// Poisson random measure with Lebesgue intensity on the strip
// [0, inf) x [0, strip_height), emitted as a time-ordered stream of points.
// Point k of stream (seed, id) is a pure function of (seed, id, k): it is
// read from block k of a Philox4x32-10 generator keyed by the seed, with the
// stream id in the upper half of the counter.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace smpsde {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter generate(Counter counter, Key key);
};

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

/// Stream id of child `index` of `parent`.
std::uint64_t derive_stream_id(std::uint64_t parent, std::uint64_t index);

/// Counter-based stream of 64-bit words; word 2k and 2k+1 come from block k.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t block() const { return block_; }
  /// Position the stream at the start of block `block`.
  void seek(std::uint64_t block);

  static double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }
  /// 52 bits, so the largest value 1 - 2^-53 stays below 1.
  static double to_open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

struct Point {
  double time = 0.0;
  double mark = 0.0;
};

/// Single-consumer point stream. Inter-arrival times are Exponential(height),
/// marks Uniform[0, height); emitted times strictly increase. A stream of
/// height zero has no points: every call returns time +inf.
class PointStream {
 public:
  PointStream(std::uint64_t seed, std::uint64_t stream_id, double strip_height);

  Point next_point();

  /// Fresh stream (cursor 0) with id derive_stream_id(stream_id(), index).
  PointStream child(std::uint64_t index) const;
  std::vector<PointStream> fork(std::size_t k) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  double strip_height() const { return height_; }
  /// Time of the last emitted point (0 before the first).
  double cursor() const { return cursor_; }
  std::uint64_t points_emitted() const { return emitted_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  double height_;
  double cursor_ = 0.0;
  std::uint64_t emitted_ = 0;
};

/// Writes "u,v" rows for every point with time <= horizon, consuming a copy
/// of `stream`.
void write_points_csv(std::ostream& os, PointStream stream, double horizon);

}  // namespace smpsde
