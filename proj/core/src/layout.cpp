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

#include "smpsde/layout.hpp"

#include <algorithm>
#include <stdexcept>

namespace smpsde {

MarkResolution::MarkResolution(RateModel model) : model_(std::move(model)) {
  if (!model_.valid()) throw std::invalid_argument("mark layout needs a rate model");
  const int k = model_.num_states();
  offsets_.assign(static_cast<std::size_t>(k) * k, 0.0);
  double cursor = 0.0;
  for (State i = 1; i <= k; ++i) {
    row_start_.push_back(cursor);
    for (State j = 1; j <= k; ++j) {
      if (j == i) continue;
      pairs_.emplace_back(i, j);
      offsets_[static_cast<std::size_t>(i - 1) * k + (j - 1)] = cursor;
      cursor += model_.sup_norm(i, j);
    }
    row_extent_.push_back(cursor);
  }
  strip_height_ = cursor;
}

double MarkResolution::offset(State i, State j) const {
  return offsets_[static_cast<std::size_t>(i - 1) * num_states() + (j - 1)];
}

double MarkResolution::row_extent(State i) const {
  return row_extent_[static_cast<std::size_t>(i - 1)];
}

double MarkResolution::row_start(State i) const {
  return row_start_[static_cast<std::size_t>(i - 1)];
}

Interval MarkResolution::interval_of(State i, State j, double y, Count n) const {
  if (i == j) throw std::invalid_argument("interval_of needs i != j");
  const double a = offset(i, j);
  return {a, a + model_.rate(i, j, y, n)};
}

std::optional<State> MarkResolution::resolve_mark(State i, double y, Count n,
                                                  double v) const {
  if (v < row_start(i) || v >= row_extent(i)) return std::nullopt;
  const int k = num_states();
  // Blocks of row i are contiguous; only the block holding v can accept it.
  for (State j = k; j >= 1; --j) {
    if (j == i || model_.sup_norm(i, j) <= 0.0) continue;
    const double a = offset(i, j);
    if (v < a) continue;
    if (v < a + model_.rate(i, j, y, n)) return j;
    return std::nullopt;
  }
  return std::nullopt;
}

std::vector<OverlapLengths> MarkResolution::overlap_lengths(State i, double y1, Count n1,
                                                            double y2, Count n2) const {
  std::vector<OverlapLengths> out;
  for (State j = 1; j <= num_states(); ++j) {
    if (j == i) continue;
    const double r1 = model_.rate(i, j, y1, n1);
    const double r2 = model_.rate(i, j, y2, n2);
    out.push_back({j, std::max(0.0, r1 - r2), std::max(0.0, r2 - r1), std::min(r1, r2)});
  }
  return out;
}

}  // namespace smpsde
