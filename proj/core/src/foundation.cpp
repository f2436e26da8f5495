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

#include "weyldirac/foundation.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace weyldirac {

Matrix BoundaryData::alpha() const {
  Matrix a(m(), 2 * m());
  a << alpha1, alpha2;
  return a;
}

Matrix BoundaryData::adjoint_column() const {
  Matrix c(2 * m(), m());
  c << alpha1.adjoint(), alpha2.adjoint();
  return c;
}

Matrix BoundaryData::j_adjoint_column() const {
  Matrix c(2 * m(), m());
  c << -alpha2.adjoint(), alpha1.adjoint();
  return c;
}

BoundaryData validate_boundary_data(const Matrix& alpha1, const Matrix& alpha2,
                                    double tol) {
  if (alpha1.rows() != alpha1.cols() || alpha2.rows() != alpha2.cols() ||
      alpha1.rows() != alpha2.rows() || alpha1.rows() == 0) {
    throw Error(ErrorKind::InvalidArgument,
                "boundary data blocks must be square and of equal size");
  }
  if (!all_finite(alpha1) || !all_finite(alpha2)) {
    throw Error(ErrorKind::NonFiniteValue, "boundary data has non-finite entries");
  }
  const auto m = alpha1.rows();
  const Matrix gram = alpha1 * alpha1.adjoint() + alpha2 * alpha2.adjoint();
  const double n_defect = norm(gram - Matrix::Identity(m, m));
  if (n_defect > tol) {
    throw Error(ErrorKind::NotNormalized,
                "||alpha alpha* - I|| = " + std::to_string(n_defect));
  }
  // alpha J alpha* = alpha2 alpha1* - alpha1 alpha2*.
  const Matrix ljl = alpha2 * alpha1.adjoint() - alpha1 * alpha2.adjoint();
  const double l_defect = norm(ljl);
  if (l_defect > tol) {
    throw Error(ErrorKind::NotLagrangian,
                "||alpha J alpha*|| = " + std::to_string(l_defect));
  }
  return BoundaryData{alpha1, alpha2};
}

BoundaryData alpha0(int m) {
  return BoundaryData{Matrix::Identity(m, m), Matrix::Zero(m, m)};
}

BoundaryData boundary_data_from(const Matrix& w_unitary,
                                const Matrix& a_hermitian) {
  const Matrix a = re_part(a_hermitian);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  const auto& v = es.eigenvectors();
  const Eigen::VectorXd& lam = es.eigenvalues();
  Vector c(lam.size()), s(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    c(k) = std::cos(lam(k));
    s(k) = std::sin(lam(k));
  }
  const Matrix cos_a = v * c.asDiagonal() * v.adjoint();
  const Matrix sin_a = v * s.asDiagonal() * v.adjoint();
  return validate_boundary_data(w_unitary * cos_a, w_unitary * sin_a, 1e-9);
}

Matrix BoundaryCondition::beta() const {
  Matrix b(m(), 2 * m());
  b << beta1, beta2;
  return b;
}

bool BoundaryCondition::self_adjoint(double tol) const {
  return norm(im_part(beta2 * beta1.adjoint())) <= tol;
}

BoundaryCondition make_boundary_condition(const Matrix& beta1,
                                          const Matrix& beta2, double tol) {
  if (beta1.rows() != beta1.cols() || beta2.rows() != beta2.cols() ||
      beta1.rows() != beta2.rows() || beta1.rows() == 0) {
    throw Error(ErrorKind::InvalidArgument,
                "boundary condition blocks must be square and of equal size");
  }
  const auto m = beta1.rows();
  Matrix b(m, 2 * m);
  b << beta1, beta2;
  Eigen::JacobiSVD<Matrix> svd(b);
  const auto& sv = svd.singularValues();
  if (sv(m - 1) <= tol * std::max(1.0, sv(0))) {
    throw Error(ErrorKind::InvalidBoundaryCondition, "rank(beta) < m");
  }
  // Normalize: beta <- (beta beta*)^{-1/2} beta.
  const Matrix gram = b * b.adjoint();
  const Matrix inv_sqrt = gram.sqrt().inverse();
  const Matrix bn = inv_sqrt * b;
  BoundaryCondition out{bn.leftCols(m), bn.rightCols(m)};
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      im_part(out.beta2 * out.beta1.adjoint()), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(m - 1);
  if (lo < -tol && hi > tol) {
    throw Error(ErrorKind::InvalidBoundaryCondition,
                "Im(beta2 beta1*) is indefinite");
  }
  return out;
}

BoundaryCondition dirichlet_condition(int m) {
  return BoundaryCondition{Matrix::Identity(m, m), Matrix::Zero(m, m)};
}

SignFactor sigma(double s, double t, cplx z) {
  if (s == t || z.imag() == 0.0) {
    throw Error(ErrorKind::DegenerateArguments,
                "sigma needs s != t and Im z != 0");
  }
  const double v = (s - t) * z.imag();
  return SignFactor{v > 0 ? 1 : -1};
}

}  // namespace weyldirac
