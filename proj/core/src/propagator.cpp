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

#include "weyldirac/propagator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace weyldirac {

namespace {

// A = -J (z + B), so that Y' = A Y.
Matrix generator(const Matrix& b, cplx z) {
  const int m = static_cast<int>(b.rows() / 2);
  const Matrix zb = b + z * Matrix::Identity(2 * m, 2 * m);
  Matrix a(2 * m, 2 * m);
  a.topRows(m) = zb.bottomRows(m);
  a.bottomRows(m) = -zb.topRows(m);
  return a;
}

double max_abs(const Matrix& x) {
  return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

constexpr double kEigenCondLimit = 1e8;

}  // namespace

Matrix ScaledMatrix::unscaled() const { return value * std::exp(log_scale); }

void ScaledMatrix::normalize() {
  const double s = max_abs(value);
  if (s > 0.0 && std::isfinite(s)) {
    value /= s;
    log_scale += std::log(s);
  }
}

void ScaledMatrix::fold() {
  if (log_scale == 0.0) return;
  const double s = max_abs(value);
  if (s == 0.0 || log_scale + std::log(s) < 600.0) {
    value *= std::exp(log_scale);
    log_scale = 0.0;
  }
}

Propagator::Propagator(const PotentialSpec& spec, cplx z,
                       PropagationOptions opt)
    : spec_(spec), z_(z), opt_(opt) {}

const Propagator::ExpData& Propagator::exp_data(const Matrix& b) {
  for (const ExpData& d : exp_cache_) {
    if (d.b.rows() == b.rows() && d.b == b) return d;
  }
  if (exp_cache_.size() >= 64) exp_cache_.erase(exp_cache_.begin());
  ExpData d;
  d.b = b;
  d.a = generator(b, z_);
  Eigen::ComplexEigenSolver<Matrix> es(d.a);
  if (es.info() == Eigen::Success) {
    d.p = es.eigenvectors();
    d.lambda = es.eigenvalues();
    Eigen::JacobiSVD<Matrix> svd(d.p);
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1)
                                               : std::numeric_limits<double>::infinity();
    if (cond < kEigenCondLimit) {
      d.p_inv = d.p.inverse();
      d.diagonalizable = true;
    }
  }
  exp_cache_.push_back(std::move(d));
  return exp_cache_.back();
}

void Propagator::apply_constant(ScaledMatrix& y, const Matrix& b,
                                double length) {
  const ExpData& d = exp_data(b);
  if (d.diagonalizable) {
    double s = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < d.lambda.size(); ++k) {
      s = std::max(s, (d.lambda(k) * length).real());
    }
    Vector e(d.lambda.size());
    for (Eigen::Index k = 0; k < d.lambda.size(); ++k) {
      e(k) = std::exp(d.lambda(k) * length - s);
    }
    y.value = d.p * (e.asDiagonal() * (d.p_inv * y.value));
    y.log_scale += s;
    ++diag_.exact_segments;
  } else {
    // Scaling and squaring with renormalization between squarings.
    const Matrix n = d.a * length;
    const double nn = n.cwiseAbs().rowwise().sum().maxCoeff();
    int k = nn > 0.5 ? static_cast<int>(std::ceil(std::log2(nn / 0.5))) : 0;
    ScaledMatrix e{(n / std::ldexp(1.0, k)).exp(), 0.0};
    for (int i = 0; i < k; ++i) {
      e.value = e.value * e.value;
      e.log_scale *= 2.0;
      e.normalize();
    }
    y.value = e.value * y.value;
    y.log_scale += e.log_scale;
    ++diag_.pade_segments;
  }
  if (max_abs(y.value) > opt_.renormalize_above ||
      max_abs(y.value) < 1.0 / opt_.renormalize_above) {
    y.normalize();
  }
}

void Propagator::apply_linear(ScaledMatrix& y, const LocalForm& f, double a,
                              double b) {
  const Matrix a_l = generator(f.b_l, z_);
  const Matrix slope = generator(f.b_r, 0.0) * (1.0 / (f.x_r - f.x_l)) -
                       generator(f.b_l, 0.0) * (1.0 / (f.x_r - f.x_l));
  const double x_l = f.x_l;
  auto rhs = [&](double x, const Matrix& yy) -> Matrix {
    return (a_l + (x - x_l) * slope) * yy;
  };
  const double limit = opt_.renormalize_above;
  double& log_scale = y.log_scale;
  auto post = [&](double, Matrix& yy) {
    const double s = max_abs(yy);
    if (s > limit) {
      yy /= s;
      log_scale += std::log(s);
      return true;
    }
    return false;
  };
  const std::size_t acc0 = ode_stats_.accepted, rej0 = ode_stats_.rejected,
                    ev0 = ode_stats_.evaluations;
  dopri5(rhs, a, b, y.value, opt_.ode, ode_stats_, post);
  diag_.steps += ode_stats_.accepted - acc0;
  diag_.rejected += ode_stats_.rejected - rej0;
  diag_.evaluations += ode_stats_.evaluations - ev0;
}

void Propagator::advance_plain(ScaledMatrix& y, double from, double to) {
  for (const auto& [a, b] : spec_.segments(from, to)) {
    const LocalForm f = spec_.local_form(a, b);
    if (f.constant) {
      apply_constant(y, f.b_l, b - a);
    } else {
      apply_linear(y, f, a, b);
    }
  }
}

void Propagator::apply_period_power(ScaledMatrix& y, long long n,
                                    bool forward) {
  const double w = *spec_.period();
  const double p0 = spec_.period_origin();
  ScaledMatrix* base = forward ? &forward_period_ : &backward_period_;
  bool& have = forward ? have_forward_period_ : have_backward_period_;
  if (!have) {
    ScaledMatrix t{Matrix::Identity(spec_.dim(), spec_.dim()), 0.0};
    if (forward) {
      advance_plain(t, p0, p0 + w);
    } else {
      advance_plain(t, p0 + w, p0);
    }
    t.normalize();
    *base = t;
    have = true;
  }
  ScaledMatrix p = *base;
  while (n > 0) {
    if (n & 1) {
      y.value = p.value * y.value;
      y.log_scale += p.log_scale;
      y.normalize();
    }
    n >>= 1;
    if (n > 0) {
      p.value = p.value * p.value;
      p.log_scale *= 2.0;
      p.normalize();
    }
  }
  ++diag_.period_powers;
}

void Propagator::advance(ScaledMatrix& y, double from, double to) {
  if (!std::isfinite(from) || !std::isfinite(to)) {
    throw Error(ErrorKind::InvalidArgument, "propagation endpoints must be finite");
  }
  if (from == to) return;
  if (!spec_.periodic()) {
    advance_plain(y, from, to);
    return;
  }
  const double w = *spec_.period();
  if (std::abs(to - from) <= 3.0 * w) {
    advance_plain(y, from, to);
    return;
  }
  const double p0 = spec_.period_origin();
  if (to > from) {
    const double t1 = p0 + std::ceil((from - p0) / w) * w;
    const long long n = static_cast<long long>(std::floor((to - t1) / w));
    const double t2 = t1 + static_cast<double>(n) * w;
    advance_plain(y, from, t1);
    apply_period_power(y, n, true);
    advance_plain(y, t2, to);
  } else {
    const double t1 = p0 + std::floor((from - p0) / w) * w;
    const long long n = static_cast<long long>(std::floor((t1 - to) / w));
    const double t2 = t1 - static_cast<double>(n) * w;
    advance_plain(y, from, t1);
    apply_period_power(y, n, false);
    advance_plain(y, t2, to);
  }
}

ScaledMatrix Propagator::transfer(double from, double to) {
  ScaledMatrix t{Matrix::Identity(spec_.dim(), spec_.dim()), 0.0};
  advance(t, from, to);
  return t;
}

Matrix FundamentalSystem::psi() const {
  Matrix p(theta.rows(), theta.cols() + phi.cols());
  p << theta, phi;
  return p;
}

namespace {

FundamentalSystem integrate_fs(cplx z, double x, double x0,
                               const BoundaryData& alpha,
                               const PotentialSpec& spec,
                               const PropagationOptions& opt) {
  const int m = alpha.m();
  if (spec.m() != m) {
    throw Error(ErrorKind::InvalidArgument,
                "boundary data and potential have different block sizes");
  }
  ScaledMatrix y;
  y.value.resize(2 * m, 2 * m);
  y.value << alpha.adjoint_column(), alpha.j_adjoint_column();
  Propagator prop(spec, z, opt);
  prop.advance(y, x0, x);
  y.fold();
  FundamentalSystem fs;
  fs.z = z;
  fs.x = x;
  fs.x0 = x0;
  fs.theta = y.value.leftCols(m);
  fs.phi = y.value.rightCols(m);
  fs.alpha = alpha;
  fs.log_scale = y.log_scale;
  fs.diagnostics = prop.diagnostics();
  return fs;
}

}  // namespace

FundamentalSystem fundamental_system(cplx z, double x, double x0,
                                     const BoundaryData& alpha,
                                     const PotentialSpec& spec,
                                     const PropagationOptions& opt) {
  FundamentalSystem fs = integrate_fs(z, x, x0, alpha, spec, opt);
  if (opt.monitor_symplectic) {
    const FundamentalSystem bar = integrate_fs(std::conj(z), x, x0, alpha, spec, opt);
    fs.diagnostics.symplectic_defect = symplectic_defect(bar, fs);
    fs.diagnostics.relative_defect = fs.log_scale != 0.0 || bar.log_scale != 0.0;
  }
  return fs;
}

double symplectic_defect(const FundamentalSystem& at_zbar,
                         const FundamentalSystem& at_z) {
  if (at_zbar.x != at_z.x || at_zbar.x0 != at_z.x0 ||
      at_zbar.z != std::conj(at_z.z) ||
      at_zbar.alpha.alpha1 != at_z.alpha.alpha1 ||
      at_zbar.alpha.alpha2 != at_z.alpha.alpha2) {
    throw Error(ErrorKind::MismatchedEvaluation,
                "symplectic defect needs the same x, x0, alpha and conjugate z");
  }
  const int m = at_z.alpha.m();
  const Matrix j = symplectic_j(m);
  const Matrix pb = at_zbar.psi();
  const Matrix pz = at_z.psi();
  const double ls = at_zbar.log_scale + at_z.log_scale;
  if (ls == 0.0) return norm(pb.adjoint() * j * pz - j);
  return norm(pb.adjoint() * j * pz - std::exp(-ls) * j) /
         (norm(pb) * norm(pz));
}

}  // namespace weyldirac
