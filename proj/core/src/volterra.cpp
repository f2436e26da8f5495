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

#include <algorithm>
#include <cmath>

#include "weyldirac/propagator.hpp"

namespace weyldirac {

namespace {

// Weights of int_0^h exp(a t) g(t) dt for g linear between g(0) and g(h):
// w0 g(0) + w1 g(h).
void exp_weights(cplx a, double h, cplx* w0, cplx* w1) {
  const cplx ah = a * h;
  if (std::abs(ah) < 0.5) {
    // h * sum_n (ah)^n / n! * {1/((n+1)(n+2)), 1/(n+2)}
    cplx term = 1.0, s0 = 0.0, s1 = 0.0;
    for (int n = 0; n < 20; ++n) {
      s0 += term / static_cast<double>((n + 1) * (n + 2));
      s1 += term / static_cast<double>(n + 2);
      term *= ah / static_cast<double>(n + 1);
    }
    *w0 = h * s0;
    *w1 = h * s1;
    return;
  }
  const cplx e = std::exp(ah);
  *w1 = e / a - (e - 1.0) / (a * a * h);
  *w0 = (e - 1.0) / a - *w1;
}

struct Grid {
  std::vector<double> x;
  std::vector<Matrix> jb_left;   // J B(x_i + 0), cell i
  std::vector<Matrix> jb_right;  // J B(x_{i+1} - 0), cell i
};

std::vector<double> build_nodes(const PotentialSpec& spec, double xa, double y0,
                                std::vector<double> extra, double hmax) {
  std::vector<double> key = spec.breakpoints(xa, y0);
  key.push_back(xa);
  key.push_back(y0);
  for (double e : extra) key.push_back(e);
  std::sort(key.begin(), key.end());
  key.erase(std::unique(key.begin(), key.end()), key.end());
  std::vector<double> nodes;
  for (std::size_t k = 0; k + 1 < key.size(); ++k) {
    const double a = key[k], b = key[k + 1];
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / hmax)));
    for (int i = 0; i < n; ++i) nodes.push_back(a + (b - a) * i / n);
  }
  nodes.push_back(key.back());
  return nodes;
}

std::vector<double> refine(const std::vector<double>& x) {
  std::vector<double> out;
  out.reserve(2 * x.size());
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    out.push_back(x[i]);
    out.push_back(0.5 * (x[i] + x[i + 1]));
  }
  out.push_back(x.back());
  return out;
}

Grid make_grid(const PotentialSpec& spec, std::vector<double> x) {
  const Matrix j = symplectic_j(spec.m());
  Grid g;
  g.x = std::move(x);
  for (std::size_t i = 0; i + 1 < g.x.size(); ++i) {
    g.jb_left.push_back(j * spec.eval_one_sided(g.x[i], Side::Right));
    g.jb_right.push_back(j * spec.eval_one_sided(g.x[i + 1], Side::Left));
  }
  return g;
}

// Solves V(x) = e + int_x^{y0} K(x, x') J B(x') V(x') dx' on the grid nodes.
std::vector<Matrix> solve_grid(const Grid& g, cplx z, int m,
                               const VolterraOptions& opt, int* iterations,
                               double* change) {
  const std::size_t n = g.x.size();
  const Matrix id = Matrix::Identity(m, m);
  Matrix e(2 * m, m);
  e << id, kI * id;
  Matrix p(2 * m, 2 * m), q(2 * m, 2 * m);
  p << id, -kI * id, kI * id, id;
  q << id, kI * id, -kI * id, id;
  const cplx a = 2.0 * kI * z;

  std::vector<cplx> w0(n - 1), w1(n - 1), ef(n - 1);
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = g.x[i + 1] - g.x[i];
    exp_weights(a, h[i], &w0[i], &w1[i]);
    ef[i] = std::exp(a * h[i]);
  }

  std::vector<Matrix> v(n, e), next(n);
  Matrix i1 = Matrix::Zero(2 * m, m), i2 = Matrix::Zero(2 * m, m);
  for (int it = 1; it <= opt.max_iterations; ++it) {
    i1.setZero();
    i2.setZero();
    next[n - 1] = e;
    double diff = (next[n - 1] - v[n - 1]).norm();
    for (std::size_t k = n - 1; k-- > 0;) {
      const Matrix gl = g.jb_left[k] * v[k];
      const Matrix gr = g.jb_right[k] * v[k + 1];
      i1 += (0.5 * h[k]) * (gl + gr);
      i2 = w0[k] * gl + w1[k] * gr + ef[k] * i2;
      next[k] = e + 0.5 * (p * i1 + q * i2);
      diff = std::max(diff, (next[k] - v[k]).norm());
    }
    v.swap(next);
    *iterations = it;
    *change = diff;
    if (!std::isfinite(diff)) break;
    if (diff < opt.tol) return v;
  }
  throw Error(ErrorKind::IterationDivergence,
              "Volterra iteration did not settle within " +
                  std::to_string(opt.max_iterations) + " sweeps");
}

std::size_t index_of(const std::vector<double>& x, double t) {
  auto it = std::lower_bound(x.begin(), x.end(), t);
  return static_cast<std::size_t>(it - x.begin());
}

}  // namespace

Matrix WeylSolution::m_function() const {
  const Matrix& a1 = alpha.alpha1;
  const Matrix& a2 = alpha.alpha2;
  const Matrix num = a1 * u2_at_x0 - a2 * u1_at_x0;
  const Matrix den = a1 * u1_at_x0 + a2 * u2_at_x0;
  return den.transpose().partialPivLu().solve(num.transpose()).transpose();
}

WeylSolution WeylSolution::m_normalized() const {
  const Matrix den = alpha.alpha1 * u1_at_x0 + alpha.alpha2 * u2_at_x0;
  const Matrix c = den.inverse();
  WeylSolution out = *this;
  out.u1 = u1 * c;
  out.u2 = u2 * c;
  out.u1_at_x0 = u1_at_x0 * c;
  out.u2_at_x0 = u2_at_x0 * c;
  out.normalization = WeylNormalization::MNormalized;
  return out;
}

WeylSolution weyl_solution_volterra(cplx z, double x, double x0,
                                    const PotentialSpec& spec,
                                    const BoundaryData& alpha,
                                    const VolterraOptions& opt) {
  if (!(z.imag() > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "Volterra route needs Im z > 0");
  }
  if (spec.periodic() || !std::isfinite(spec.support().second)) {
    throw Error(ErrorKind::NoCompactSupport, "B must vanish beyond a finite y0");
  }
  const int m = spec.m();
  const double xa = std::min(x, x0);
  const double y0 = std::max(spec.support().second, xa);

  WeylSolution out;
  out.z = z;
  out.x = x;
  out.x0 = x0;
  out.alpha = alpha;
  const Matrix id = Matrix::Identity(m, m);

  std::vector<Matrix> at(2, Matrix());
  if (y0 <= xa) {
    Matrix e(2 * m, m);
    e << id, kI * id;
    at[0] = at[1] = e;
  } else {
    const double hmax = std::min(opt.max_cell, opt.cell_times_z / std::abs(z));
    std::vector<double> extra;
    if (x < y0) extra.push_back(x);
    if (x0 < y0) extra.push_back(x0);
    const std::vector<double> coarse = build_nodes(spec, xa, y0, extra, hmax);
    int iters = 0;
    double change = 0.0;
    auto eval_at = [&](const std::vector<Matrix>& v,
                       const std::vector<double>& nodes, double t) -> Matrix {
      if (t >= y0) {
        Matrix e(2 * m, m);
        e << id, kI * id;
        return e;
      }
      return v[index_of(nodes, t)];
    };
    const std::vector<Matrix> vc =
        solve_grid(make_grid(spec, coarse), z, m, opt, &iters, &change);
    at[0] = eval_at(vc, coarse, x);
    at[1] = eval_at(vc, coarse, x0);
    if (opt.richardson) {
      const std::vector<double> fine = refine(coarse);
      const std::vector<Matrix> vf =
          solve_grid(make_grid(spec, fine), z, m, opt, &iters, &change);
      at[0] = (4.0 * eval_at(vf, fine, x) - at[0]) / 3.0;
      at[1] = (4.0 * eval_at(vf, fine, x0) - at[1]) / 3.0;
    }
    out.iterations = iters;
    out.last_change = change;
  }
  const cplx phase_x = std::exp(kI * z * (x - x0));
  out.u1 = at[0].topRows(m) * phase_x;
  out.u2 = at[0].bottomRows(m) * phase_x;
  out.u1_at_x0 = at[1].topRows(m);
  out.u2_at_x0 = at[1].bottomRows(m);
  out.normalization = WeylNormalization::Tilde;
  return out;
}

}  // namespace weyldirac
