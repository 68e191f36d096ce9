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

#pragma once

#include <cmath>
#include <optional>

namespace smpsde {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_depth = 40;
};

namespace detail {

template <class F>
bool simpson_refine(F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth, double& acc) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  if (!(a < lm && lm < m && m < rm && rm < b)) return false;
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) {
    acc += left + right + delta / 15.0;
    return true;
  }
  if (depth <= 0) return false;
  return simpson_refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, acc) &&
         simpson_refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, acc);
}

}  // namespace detail

/// Adaptive Simpson on [a, b] with Richardson correction. Returns nullopt when
/// the error estimate cannot be pushed below `abs_tol` within `max_depth`
/// bisections.
template <class F>
std::optional<double> adaptive_simpson(F&& f, double a, double b,
                                       const QuadratureOptions& opts = {}) {
  if (b == a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double acc = 0.0;
  if (!detail::simpson_refine(f, a, b, fa, fm, fb, whole, opts.abs_tol,
                              opts.max_depth, acc)) {
    return std::nullopt;
  }
  return acc;
}

}  // namespace smpsde
