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

#include "weyldirac/gauge.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace weyldirac {

namespace {

Matrix blk(const Matrix& b, int i, int j) {
  const Eigen::Index m = b.rows() / 2;
  return b.block(i * m, j * m, m, m);
}

double drift(const Matrix& u) {
  return norm(u.adjoint() * u - Matrix::Identity(u.cols(), u.cols()));
}

Matrix polar_factor(const Matrix& u) {
  Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

// State [U11; U22].
Matrix generator_rhs(const Matrix& b, const Matrix& y) {
  const Eigen::Index m = b.rows() / 2;
  const Matrix s = blk(b, 0, 0) + blk(b, 1, 1);
  const Matrix d = blk(b, 0, 1) - blk(b, 1, 0);
  Matrix out(2 * m, m);
  out.topRows(m) = 0.5 * kI * (-s + kI * d) * y.topRows(m);
  out.bottomRows(m) = 0.5 * kI * (s + kI * d) * y.bottomRows(m);
  return out;
}

bool jumps_at(const PotentialSpec& spec, double x) {
  const Matrix l = spec.eval_one_sided(x, Side::Left);
  const Matrix r = spec.eval_one_sided(x, Side::Right);
  return norm(l - r) > 1e-14 * std::max(1.0, norm(r));
}

struct Sampled {
  GaugeFactors factors;
  std::vector<Matrix> b;
  // Index ranges [start, end) of continuous stretches.
  std::vector<std::pair<std::size_t, std::size_t>> runs;
};

Sampled sample(const PotentialSpec& spec, double x0, double x1, const GaugeOptions& opt) {
  if (!(x1 > x0)) throw Error(ErrorKind::EmptyWindow, "gauge needs x0 < x1");
  const int m = spec.m();
  Sampled out;
  GaugeFactors& g = out.factors;
  Matrix y(2 * m, m);
  y << Matrix::Identity(m, m), Matrix::Identity(m, m);
  OdeStats stats;

  auto record = [&](double x, Side side, const Matrix& b) {
    g.x.push_back(x);
    g.side.push_back(side);
    g.u11.push_back(y.topRows(m));
    g.u22.push_back(y.bottomRows(m));
    out.b.push_back(b);
  };
  auto check = [&](Matrix& st) {
    bool changed = false;
    for (int k = 0; k < 2; ++k) {
      auto rows = st.middleRows(k * m, m);
      const double dr = drift(Matrix(rows));
      g.max_drift = std::max(g.max_drift, dr);
      if (dr > opt.reunitarize_above) {
        rows = polar_factor(Matrix(rows));
        ++g.reunitarizations;
        changed = true;
      }
    }
    return changed;
  };

  std::size_t run_start = 0;
  bool first = true;
  for (const auto& [a, b] : spec.segments(x0, x1)) {
    const LocalForm f = spec.local_form(a, b);
    if (!first && jumps_at(spec, a)) {
      out.runs.push_back({run_start, g.x.size()});
      run_start = g.x.size();
    }
    if (first || run_start == g.x.size()) record(a, Side::Right, f.at(a));
    first = false;
    int n = 1;
    if (f.constant) n = std::max(1, static_cast<int>(std::ceil((b - a) / opt.constant_spacing - 1e-9)));
    double here = a;
    for (int i = 1; i <= n; ++i) {
      const double next = i == n ? b : a + (b - a) * i / n;
      auto rhs = [&](double x, const Matrix& st) { return generator_rhs(f.at(x), st); };
      auto post = [&](double, Matrix& st) { return check(st); };
      dopri5(rhs, here, next, y, opt.ode, stats, post);
      here = next;
      record(next, Side::Left, f.at(next));
    }
  }
  out.runs.push_back({run_start, g.x.size()});
  g.final_drift = std::max(drift(y.topRows(m)), drift(y.bottomRows(m)));
  return out;
}

}  // namespace

GaugeFactors gauge_factors(const PotentialSpec& spec, double x0, double x1,
                           const GaugeOptions& opt) {
  return sample(spec, x0, x1, opt).factors;
}

PotentialSpec gauge_with_omega(const PotentialSpec& spec, const Matrix& omega,
                               double x0, double x1, const GaugeOptions& opt) {
  const int m = spec.m();
  if (omega.rows() != m || omega.cols() != m) {
    throw Error(ErrorKind::InvalidArgument, "omega must be m x m");
  }
  if (!is_hermitian(omega, kDefaultAlgebraicTol)) {
    throw Error(ErrorKind::NotHermitianOmega, "omega is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (omega + omega.adjoint()));
  const Matrix twist = es.eigenvectors() *
                       es.eigenvalues().unaryExpr([](double t) { return std::polar(1.0, t); }).asDiagonal() *
                       es.eigenvectors().adjoint();

  const Sampled s = sample(spec, x0, x1, opt);
  const GaugeFactors& g = s.factors;
  std::vector<Piece> pieces;
  for (const auto& [lo, hi] : s.runs) {
    std::vector<double> xs;
    std::vector<Matrix> vs;
    for (std::size_t i = lo; i < hi; ++i) {
      const Matrix& b = s.b[i];
      const Matrix comb = (blk(b, 0, 1) + blk(b, 1, 0)) - kI * (blk(b, 0, 0) - blk(b, 1, 1));
      const Matrix w = twist * g.u11[i].inverse() * comb * g.u22[i] * twist;
      const Matrix t11 = -0.5 * im_part(w);
      const Matrix t12 = 0.5 * re_part(w);
      Matrix bt(2 * m, 2 * m);
      bt << t11, t12, t12, -t11;
      xs.push_back(g.x[i]);
      vs.push_back(bt);
    }
    if (xs.size() < 2) continue;
    pieces.push_back(Piece::grid(xs.front(), xs.back(), xs, vs));
  }
  std::optional<double> period;
  if (spec.periodic()) {
    const double w = *spec.period();
    if (std::abs((x1 - x0) - w) <= 1e-12 * std::max(1.0, w)) period = w;
  }
  const std::string name = spec.name().empty() ? "normal_form" : spec.name() + "_normal_form";
  return PotentialSpec(m, pieces, period, name, spec.outside());
}

PotentialSpec normal_form(const PotentialSpec& spec, double x0, double x1,
                          const GaugeOptions& opt) {
  return gauge_with_omega(spec, Matrix::Zero(spec.m(), spec.m()), x0, x1, opt);
}

}  // namespace weyldirac
