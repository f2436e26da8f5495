// Copyright 2026 The weyldirac Authors
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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "weyldirac/types.hpp"

namespace weyldirac {

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-15;
  std::size_t max_steps = 20'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
  // Last accepted step size; reused as the first trial step of the next
  // segment when positive.
  double last_step = 0.0;
};

// Dormand-Prince 5(4) for a matrix-valued state y' = f(x, y), integrating
// from xa to xb (either direction). The error is measured against the
// largest entry of the state, so decaying columns of a growing fundamental
// matrix do not force tiny steps.
//
// `post(x, y)` is called after each accepted step and may rescale y in
// place; it returns true when it modified y.
template <class F, class Post>
void dopri5(F&& f, double xa, double xb, Matrix& y, const OdeOptions& opt,
            OdeStats& stats, Post&& post) {
  if (xa == xb) return;
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double dir = xb > xa ? 1.0 : -1.0;
  const double span = std::abs(xb - xa);
  double x = xa;
  Matrix k1 = f(x, y);
  ++stats.evaluations;

  double h = stats.last_step > 0.0 ? std::min(stats.last_step, span) : 0.0;
  if (h == 0.0) {
    const double ny = std::max(y.cwiseAbs().maxCoeff(), 1e-300);
    const double nf = std::max(k1.cwiseAbs().maxCoeff(), 1e-300);
    h = std::min(span, 0.01 * ny / nf);
    h = std::max(h, 1e-6 * span);
  }

  Matrix k2, k3, k4, k5, k6, k7, ynew, err;
  std::size_t steps = 0;
  while (dir * (xb - x) > 0.0) {
    if (++steps > opt.max_steps) {
      throw Error(ErrorKind::IntegrationFailure, "step budget exhausted", x);
    }
    bool last = false;
    const double h_try = h;
    if (h >= std::abs(xb - x)) {
      h = std::abs(xb - x);
      last = true;
    }
    // A short final piece (e.g. between nearly coincident nodes) is fine.
    if (!last && h < 1e-15 * std::max(1.0, std::abs(x))) {
      throw Error(ErrorKind::IntegrationFailure, "step size underflow", x);
    }
    const double hs = dir * h;
    k2 = f(x + c2 * hs, y + hs * (a21 * k1));
    k3 = f(x + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
    k4 = f(x + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = f(x + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double x_end = last ? xb : x + hs;
    k6 = f(x_end, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = f(x_end, ynew);
    stats.evaluations += 6;
    err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double scale =
        opt.atol + opt.rtol * std::max(y.cwiseAbs().maxCoeff(),
                                       ynew.cwiseAbs().maxCoeff());
    const double e = err.cwiseAbs().maxCoeff() / scale;
    if (!std::isfinite(e)) {
      if (!ynew.allFinite() && !y.allFinite()) {
        throw Error(ErrorKind::IntegrationFailure, "non-finite state", x);
      }
      h *= 0.2;
      ++stats.rejected;
      continue;
    }
    if (e <= 1.0) {
      x = x_end;
      y.swap(ynew);
      k1.swap(k7);
      ++stats.accepted;
      if (post(x, y)) {
        k1 = f(x, y);
        ++stats.evaluations;
      }
      const double fac = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
      stats.last_step = (last ? std::max(h, h_try) : h) * fac;
      if (!last) h *= fac;
    } else {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(e, -0.2));
    }
  }
}

template <class F>
void dopri5(F&& f, double xa, double xb, Matrix& y, const OdeOptions& opt,
            OdeStats& stats) {
  dopri5(std::forward<F>(f), xa, xb, y, opt, stats,
         [](double, Matrix&) { return false; });
}

}  // namespace weyldirac
