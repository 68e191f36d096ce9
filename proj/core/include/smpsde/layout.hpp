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

// Mark layout: every ordered pair (i, j), i != j, owns a block of the mark
// axis whose width is its sup norm. Blocks are packed in lexicographic pair
// order, so row i occupies [C_i - c_i, C_i) with C_i = c_1 + ... + c_i. At
// age y and count n the live part of block (i, j) is the half-open interval
// [offset_ij, offset_ij + lambda_ij(y, n)). Because offsets never move,
// intervals for the same pair at different (y, n) share their left end.

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "smpsde/rates.hpp"

namespace smpsde {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  bool empty() const { return !(upper > lower); }
  double length() const { return empty() ? 0.0 : upper - lower; }
  bool contains(double v) const { return lower <= v && v < upper; }
};

/// Per-target split of two same-row intervals into set differences and
/// intersection.
struct OverlapLengths {
  State target = 0;
  double only_first = 0.0;
  double only_second = 0.0;
  double both = 0.0;
};

class MarkResolution {
 public:
  MarkResolution() = default;
  explicit MarkResolution(RateModel model);

  const RateModel& model() const { return model_; }
  int num_states() const { return model_.num_states(); }

  /// Left end of the block owned by (i, j).
  double offset(State i, State j) const;
  /// C_i: right end of row i's blocks.
  double row_extent(State i) const;
  /// Lower end of row i's blocks (C_i - c_i).
  double row_start(State i) const;
  /// Sum of all sup norms; every row lies inside [0, strip_height).
  double strip_height() const { return strip_height_; }

  /// Ordered pairs in layout order.
  const std::vector<std::pair<State, State>>& pair_order() const { return pairs_; }

  Interval interval_of(State i, State j, double y, Count n) const;

  /// The target j whose interval contains v, or nullopt for no jump.
  std::optional<State> resolve_mark(State i, double y, Count n, double v) const;

  std::vector<OverlapLengths> overlap_lengths(State i, double y1, Count n1, double y2,
                                              Count n2) const;

 private:
  RateModel model_;
  std::vector<double> offsets_;  // K * K, row-major
  std::vector<double> row_start_;
  std::vector<double> row_extent_;
  std::vector<std::pair<State, State>> pairs_;
  double strip_height_ = 0.0;
};

}  // namespace smpsde
