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

#include "weyldirac/full_line.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include <unsupported/Eigen/MatrixFunctions>

#include "weyldirac/csv.hpp"
#include "weyldirac/propagator.hpp"

namespace weyldirac {

namespace {

constexpr double kBranchBand = 1e-12;
constexpr double kBranchShift = 1e-14;

}  // namespace

Matrix FullLineM::full() const {
  const Eigen::Index m = m11.rows();
  Matrix out(2 * m, 2 * m);
  out << m11, m12, m21, m22;
  return out;
}

FullLineM fullline_m(cplx z, double x0, const BoundaryData& alpha,
                     const PotentialSpec& spec, const FullLineOptions& opt) {
  if (z.imag() == 0.0) {
    throw Error(ErrorKind::DegenerateArguments, "full-line M needs Im z != 0");
  }
  const Matrix mp = halfline_m(z, x0, alpha, spec, HalfLineSide::Plus, opt.halfline).m_value;
  const Matrix mm = halfline_m(z, x0, alpha, spec, HalfLineSide::Minus, opt.halfline).m_value;
  const Matrix d = mm - mp;
  Eigen::JacobiSVD<Matrix> svd(d);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!(cond <= opt.max_condition)) {
    throw Error(ErrorKind::SingularDifference,
                "cond(M_- - M_+) = " + std::to_string(cond));
  }
  const Matrix di = d.inverse();
  FullLineM out;
  out.z = z;
  out.x0 = x0;
  out.alpha = alpha;
  out.m_plus = mp;
  out.m_minus = mm;
  out.m11 = di;
  out.m12 = 0.5 * di * (mm + mp);
  out.m21 = 0.5 * (mm + mp) * di;
  const Matrix a = mp * di * mm;
  const Matrix b = mm * di * mp;
  out.m22 = 0.5 * (a + b);
  out.m22_defect = norm(a - b);
  return out;
}

GreensFunction::GreensFunction(cplx z, double x0, const PotentialSpec& spec,
                               const FullLineOptions& opt)
    : spec_(spec), z_(z), x0_(x0), opt_(opt),
      m_(fullline_m(z, x0, alpha0(spec.m()), spec, opt)),
      delta_inv_(m_.m11) {}

Matrix GreensFunction::weyl_column(cplx z, double x, const Matrix& mval,
                                   double& log_scale) const {
  PropagationOptions p = opt_.halfline.propagation;
  p.monitor_symplectic = false;
  const FundamentalSystem fs = fundamental_system(z, x, x0_, alpha0(spec_.m()), spec_, p);
  log_scale += fs.log_scale;
  return fs.theta + fs.phi * mval;
}

Matrix GreensFunction::branch(double x, double xp, bool lower) const {
  // lower: x < x', U_-(z, x) D^{-1} U_+(conj z, x')*.
  const Matrix& left_m = lower ? m_.m_minus : m_.m_plus;
  const Matrix& right_m = lower ? m_.m_plus : m_.m_minus;
  double ls = 0.0;
  const Matrix ul = weyl_column(z_, x, left_m, ls);
  // M_+-(conj z) = M_+-(z)*.
  const Matrix ur = weyl_column(std::conj(z_), xp, right_m.adjoint(), ls);
  Matrix g = ul * delta_inv_ * ur.adjoint();
  if (ls != 0.0) g *= std::exp(ls);
  return g;
}

GreensMatrix GreensFunction::operator()(double x, double xp) const {
  if (x == xp) {
    throw Error(ErrorKind::DegenerateArguments,
                "G(z, x, x) is discontinuous; use the diagonal average");
  }
  GreensMatrix out{z_, x, xp, branch(x, xp, x < xp)};
  if (!out.value.allFinite()) {
    throw Error(ErrorKind::NonFiniteValue, "Green's matrix overflowed");
  }
  return out;
}

Matrix GreensFunction::diagonal(double x) const {
  return 0.5 * (branch(x, x, true) + branch(x, x, false));
}

GreensMatrix greens_matrix(cplx z, double x, double xp, double x0,
                           const PotentialSpec& spec, const FullLineOptions& opt) {
  if (z.imag() == 0.0) {
    throw Error(ErrorKind::DegenerateArguments, "Green's matrix needs Im z != 0");
  }
  if (x == xp) {
    throw Error(ErrorKind::DegenerateArguments,
                "G(z, x, x) is discontinuous; use the diagonal average");
  }
  return GreensFunction(z, x0, spec, opt)(x, xp);
}

Matrix principal_log(const Matrix& a) {
  if (!a.allFinite()) throw Error(ErrorKind::LogBranchFailure, "non-finite matrix");
  Eigen::ComplexSchur<Matrix> schur(a);
  Matrix t = schur.matrixT();
  const double scale = std::max(1.0, norm(a));
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    const cplx ev = t(i, i);
    if (!std::isfinite(ev.real()) || !std::isfinite(ev.imag()) ||
        std::abs(ev) <= 1e-300 * scale) {
      throw Error(ErrorKind::LogBranchFailure, "eigenvalue at zero or non-finite");
    }
    if (ev.real() < 0.0 && std::abs(ev.imag()) <= kBranchBand * std::abs(ev)) {
      t(i, i) = cplx(ev.real(), std::abs(ev.imag()) + kBranchShift * std::abs(ev));
    }
  }
  const Matrix& u = schur.matrixU();
  const Matrix l = (u * t * u.adjoint()).log();
  if (!l.allFinite()) throw Error(ErrorKind::LogBranchFailure, "log did not converge");
  return l;
}

namespace {

Matrix upsilon_raw(double lambda, double eps, double x0, const BoundaryData& alpha,
                   const PotentialSpec& spec, const FullLineOptions& opt) {
  const Matrix m = fullline_m(cplx(lambda, eps), x0, alpha, spec, opt).full();
  return im_part(principal_log(m)) / std::numbers::pi;
}

}  // namespace

UpsilonSample upsilon(double lambda, double x0, const BoundaryData& alpha,
                      const PotentialSpec& spec, double epsilon,
                      const UpsilonOptions& opt) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  }
  UpsilonSample s;
  s.lambda = lambda;
  s.epsilon = epsilon;
  s.raw = upsilon_raw(lambda, epsilon, x0, alpha, spec, opt.fullline);
  if (opt.richardson) {
    const Matrix half = upsilon_raw(lambda, 0.5 * epsilon, x0, alpha, spec, opt.fullline);
    s.value = 2.0 * half - s.raw;
  } else {
    s.value = s.raw;
  }
  // Hermitian by construction up to rounding.
  s.value = 0.5 * (s.value + s.value.adjoint());
  s.min_eigenvalue = min_eigenvalue_hermitian(s.value);
  s.max_eigenvalue = max_eigenvalue_hermitian(s.value);
  return s;
}

void write_upsilon_csv(std::ostream& os, const std::vector<UpsilonSample>& s) {
  if (s.empty()) return;
  const Eigen::Index n = s.front().value.rows();
  os << "lambda,epsilon," << csv::matrix_header("upsilon", n, n) << '\n';
  for (const auto& v : s) {
    os << csv::num(v.lambda) << ',' << csv::num(v.epsilon) << csv::matrix_fields(v.value)
       << '\n';
  }
}

void write_fullline_csv(std::ostream& os, const std::vector<FullLineM>& s) {
  if (s.empty()) return;
  const Eigen::Index n = 2 * s.front().m11.rows();
  os << "z_re,z_im,x0," << csv::matrix_header("M", n, n) << ",m22_defect\n";
  for (const auto& v : s) {
    os << csv::num(v.z.real()) << ',' << csv::num(v.z.imag()) << ',' << csv::num(v.x0)
       << csv::matrix_fields(v.full()) << ',' << csv::num(v.m22_defect) << '\n';
  }
}

}  // namespace weyldirac
