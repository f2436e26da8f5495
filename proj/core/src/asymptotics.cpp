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

#include "weyldirac/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace weyldirac {

namespace {

Matrix blk(const Matrix& b, int i, int j) {
  const Eigen::Index m = b.rows() / 2;
  return b.block(i * m, j * m, m, m);
}

double sgn(ExpansionSign s) { return s == ExpansionSign::Plus ? 1.0 : -1.0; }

// m_1 as a linear function of B (also used for B').
Matrix first_from(const Matrix& b, double s) {
  return -0.5 * (blk(b, 0, 1) + blk(b, 1, 0)) +
         s * 0.5 * kI * (blk(b, 0, 0) - blk(b, 1, 1));
}

}  // namespace

std::vector<Matrix> differentiate(const std::vector<double>& x,
                                  const std::vector<Matrix>& f) {
  const std::size_t n = x.size();
  if (n < 3 || f.size() != n) {
    throw Error(ErrorKind::InsufficientDerivatives,
                "finite differences need at least three samples");
  }
  std::vector<Matrix> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
    d[i] = (-h2 / (h1 * (h1 + h2))) * f[i - 1] + ((h2 - h1) / (h1 * h2)) * f[i] +
           (h1 / (h2 * (h1 + h2))) * f[i + 1];
  }
  {
    const double h1 = x[1] - x[0], h2 = x[2] - x[1];
    d[0] = (-(2 * h1 + h2) / (h1 * (h1 + h2))) * f[0] + ((h1 + h2) / (h1 * h2)) * f[1] -
           (h1 / (h2 * (h1 + h2))) * f[2];
  }
  {
    const double h1 = x[n - 2] - x[n - 3], h2 = x[n - 1] - x[n - 2];
    d[n - 1] = (h2 / (h1 * (h1 + h2))) * f[n - 3] - ((h1 + h2) / (h1 * h2)) * f[n - 2] +
               ((2 * h2 + h1) / (h2 * (h1 + h2))) * f[n - 1];
  }
  return d;
}

DerivativeSamples sample_derivatives(const std::vector<double>& x,
                                     const std::vector<Matrix>& b, int order) {
  if (x.size() != b.size()) {
    throw Error(ErrorKind::InvalidArgument, "grid and samples differ in length");
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "grid must be strictly increasing");
    }
  }
  DerivativeSamples out{x, b, {}};
  const std::vector<Matrix>* prev = &out.b;
  for (int k = 0; k < order; ++k) {
    out.derivs.push_back(differentiate(x, *prev));
    prev = &out.derivs.back();
  }
  return out;
}

DerivativeSamples sample_derivatives(const PotentialSpec& spec, double x_lo,
                                     double x_hi, int points, int order) {
  if (points < 3 || !(x_hi > x_lo)) {
    throw Error(ErrorKind::InvalidArgument, "need x_lo < x_hi and points >= 3");
  }
  std::vector<double> x(points);
  std::vector<Matrix> b(points);
  for (int i = 0; i < points; ++i) {
    x[i] = x_lo + (x_hi - x_lo) * i / (points - 1);
    b[i] = spec.eval(x[i]);
  }
  return sample_derivatives(x, b, order);
}

std::vector<ExpansionCoefficients> expansion_coefficients_on_grid(
    const DerivativeSamples& derivs, int n, ExpansionSign sign) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "order must be >= 0");
  if (n >= 2 && derivs.order() < n - 1) {
    throw Error(ErrorKind::InsufficientDerivatives,
                "order " + std::to_string(n) + " needs B^(" + std::to_string(n - 1) +
                    "), have " + std::to_string(derivs.order()));
  }
  const std::size_t g = derivs.x.size();
  if (g == 0) throw Error(ErrorKind::InsufficientDerivatives, "empty grid");
  if (n >= 3 && g < 3) {
    throw Error(ErrorKind::InsufficientDerivatives, "grid too short to differentiate");
  }
  const int m = derivs.m();
  const double s = sgn(sign);
  const Matrix id = Matrix::Identity(m, m);

  // mk[k][i]
  std::vector<std::vector<Matrix>> mk(n + 1, std::vector<Matrix>(g));
  for (std::size_t i = 0; i < g; ++i) mk[0][i] = s * kI * id;
  if (n >= 1) {
    for (std::size_t i = 0; i < g; ++i) mk[1][i] = first_from(derivs.b[i], s);
  }
  for (int k = 1; k < n; ++k) {
    std::vector<Matrix> dk;
    if (k == 1) {
      dk.resize(g);
      for (std::size_t i = 0; i < g; ++i) dk[i] = first_from(derivs.derivs[0][i], s);
    } else {
      dk = differentiate(derivs.x, mk[k]);
    }
    for (std::size_t i = 0; i < g; ++i) {
      const Matrix& b = derivs.b[i];
      const Matrix b22 = blk(b, 1, 1);
      Matrix acc = dk[i] + blk(b, 0, 1) * mk[k][i] + mk[k][i] * blk(b, 1, 0);
      for (int l = 1; l <= k; ++l) acc += mk[l][i] * mk[k + 1 - l][i];
      for (int l = 0; l <= k; ++l) acc += mk[l][i] * b22 * mk[k - l][i];
      mk[k + 1][i] = s * 0.5 * kI * acc;
    }
  }

  std::vector<ExpansionCoefficients> out(g);
  for (std::size_t i = 0; i < g; ++i) {
    out[i].sign = sign;
    out[i].x = derivs.x[i];
    out[i].order = n;
    out[i].coeffs.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
      if (!mk[k][i].allFinite()) {
        throw Error(ErrorKind::NonFiniteValue, "non-finite expansion coefficient");
      }
      out[i].coeffs.push_back(mk[k][i]);
    }
  }
  return out;
}

ExpansionCoefficients expansion_coefficients(const DerivativeSamples& derivs,
                                             double x, int n, ExpansionSign sign) {
  const auto grid = expansion_coefficients_on_grid(derivs, n, sign);
  const auto& xs = derivs.x;
  if (x < xs.front() || x > xs.back()) {
    throw Error(ErrorKind::OutOfDomain, "x outside the sampled grid");
  }
  auto it = std::lower_bound(xs.begin(), xs.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  if (hi < xs.size() && xs[hi] == x) return grid[hi];
  const std::size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  ExpansionCoefficients out = grid[lo];
  out.x = x;
  for (int k = 0; k <= n; ++k) {
    out.coeffs[k] = (1 - t) * grid[lo].coeffs[k] + t * grid[hi].coeffs[k];
  }
  return out;
}

Matrix evaluate_expansion(const ExpansionCoefficients& c, cplx z) {
  Matrix acc = c.coeffs.front();
  cplx zk = 1.0;
  for (std::size_t k = 1; k < c.coeffs.size(); ++k) {
    zk /= z;
    acc += zk * c.coeffs[k];
  }
  return acc;
}

ExpansionFit fit_expansion(const std::vector<FitSample>& samples, int n,
                           const FitOptions& opt) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "fit order must be >= 1");
  if (static_cast<int>(samples.size()) < n + 2) {
    throw Error(ErrorKind::InvalidArgument,
                "need at least " + std::to_string(n + 2) + " samples");
  }
  const Eigen::Index m = samples.front().m.rows();
  double rmin = INFINITY, rmax = 0.0;
  std::vector<double> moduli;
  for (const auto& s : samples) {
    if (s.m.rows() != m || s.m.cols() != m || !s.m.allFinite()) {
      throw Error(ErrorKind::InvalidArgument, "sample matrices must be finite m x m");
    }
    const double half = 0.5 * opt.sector_angle;
    if (std::abs(std::arg(s.z) - std::numbers::pi / 2) >= half) {
      throw Error(ErrorKind::SectorViolation,
                  "arg z = " + std::to_string(std::arg(s.z)) + " outside the sector");
    }
    const double r = std::abs(s.z);
    for (double o : moduli) {
      if (std::abs(o - r) <= 1e-12 * r) {
        throw Error(ErrorKind::InvalidArgument, "sample moduli must be distinct");
      }
    }
    moduli.push_back(r);
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  if (rmax / rmin < opt.min_modulus_ratio) {
    throw Error(ErrorKind::IllConditionedFit,
                "|z| ratio " + std::to_string(rmax / rmin) + " is too small");
  }

  const double s = sgn(opt.sign);
  const Eigen::Index ns = static_cast<Eigen::Index>(samples.size());
  Matrix a(ns, n);
  Matrix rhs(ns, m * m);
  for (Eigen::Index j = 0; j < ns; ++j) {
    const auto& smp = samples[j];
    // Rescaled by |z|^n; columns normalized by rmin^k below.
    const double w = std::pow(std::abs(smp.z) / rmin, n);
    cplx zk = 1.0;
    for (int k = 0; k < n; ++k) {
      zk *= rmin / smp.z;
      a(j, k) = w * zk;
    }
    const Matrix r = smp.m - s * kI * Matrix::Identity(m, m);
    for (Eigen::Index c = 0; c < m * m; ++c) rhs(j, c) = w * r(c % m, c / m);
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!(cond < opt.max_condition)) {
    throw Error(ErrorKind::IllConditionedFit,
                "design matrix condition " + std::to_string(cond));
  }
  const Matrix sol = svd.solve(rhs);

  ExpansionFit fit;
  fit.condition = cond;
  fit.coefficients.sign = opt.sign;
  fit.coefficients.order = n;
  fit.coefficients.coeffs.push_back(s * kI * Matrix::Identity(m, m));
  for (int k = 0; k < n; ++k) {
    Matrix c(m, m);
    const double scale = std::pow(rmin, k + 1);
    for (Eigen::Index e = 0; e < m * m; ++e) c(e % m, e / m) = sol(k, e) * scale;
    fit.coefficients.coeffs.push_back(c);
  }
  for (const auto& smp : samples) {
    fit.residuals.push_back(norm(smp.m - evaluate_expansion(fit.coefficients, smp.z)));
  }
  return fit;
}

Matrix fullline_first_coeff(const PotentialSpec& spec, double x) {
  auto combo = [](const Matrix& b) {
    const Eigen::Index m = b.rows() / 2;
    const Matrix d = blk(b, 0, 0) - blk(b, 1, 1);
    const Matrix o = blk(b, 0, 1) + blk(b, 1, 0);
    Matrix c(2 * m, 2 * m);
    c << d, o, o, -d;
    return c;
  };
  const Matrix right = spec.eval_one_sided(x, Side::Right);
  const Matrix left = spec.eval_one_sided(x, Side::Left);
  return cplx(0.0, -1.0 / 8.0) * (combo(right) + combo(left));
}

void write_coefficients_csv(std::ostream& os, const ExpansionCoefficients& c) {
  os << "k,row,col,re,im\n";
  char buf[128];
  for (std::size_t k = 0; k < c.coeffs.size(); ++k) {
    const Matrix& mk = c.coeffs[k];
    for (Eigen::Index i = 0; i < mk.rows(); ++i) {
      for (Eigen::Index j = 0; j < mk.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%zu,%ld,%ld,%.17g,%.17g\n", k,
                      static_cast<long>(i), static_cast<long>(j), mk(i, j).real(),
                      mk(i, j).imag());
        os << buf;
      }
    }
  }
}

}  // namespace weyldirac
