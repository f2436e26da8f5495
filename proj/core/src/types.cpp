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

#include "weyldirac/types.hpp"

#include <atomic>

#include <Eigen/Eigenvalues>

namespace weyldirac {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::NotLagrangian: return "NotLagrangian";
    case ErrorKind::InvalidBoundaryCondition: return "InvalidBoundaryCondition";
    case ErrorKind::DegenerateArguments: return "DegenerateArguments";
    case ErrorKind::NonHermitianPiece: return "NonHermitianPiece";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::InvalidPotential: return "InvalidPotential";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::IntegrationFailure: return "IntegrationFailure";
    case ErrorKind::MismatchedEvaluation: return "MismatchedEvaluation";
    case ErrorKind::NoCompactSupport: return "NoCompactSupport";
    case ErrorKind::IterationDivergence: return "IterationDivergence";
    case ErrorKind::EigenvalueHit: return "EigenvalueHit";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::PoleEncountered: return "PoleEncountered";
    case ErrorKind::SingularCayley: return "SingularCayley";
    case ErrorKind::ContractivityLost: return "ContractivityLost";
    case ErrorKind::NotContractive: return "NotContractive";
    case ErrorKind::InsufficientDerivatives: return "InsufficientDerivatives";
    case ErrorKind::IllConditionedFit: return "IllConditionedFit";
    case ErrorKind::SectorViolation: return "SectorViolation";
    case ErrorKind::SingularDifference: return "SingularDifference";
    case ErrorKind::LogBranchFailure: return "LogBranchFailure";
    case ErrorKind::DifferentiationFailure: return "DifferentiationFailure";
    case ErrorKind::NotPeriodic: return "NotPeriodic";
    case ErrorKind::DifferenceBelowNoise: return "DifferenceBelowNoise";
    case ErrorKind::NotHermitianOmega: return "NotHermitianOmega";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<double> location)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      location_(location) {}

namespace {
std::atomic<NormPolicy> g_norm_policy{NormPolicy::Spectral};
}

void set_norm_policy(NormPolicy policy) { g_norm_policy.store(policy); }
NormPolicy norm_policy() { return g_norm_policy.load(); }

double norm(const Matrix& x) {
  if (x.size() == 0) return 0.0;
  if (norm_policy() == NormPolicy::Frobenius) return x.norm();
  if (x.rows() == 1 || x.cols() == 1) return x.norm();
  Eigen::JacobiSVD<Matrix> svd(x);
  return svd.singularValues()(0);
}

Matrix symplectic_j(int m) {
  Matrix j = Matrix::Zero(2 * m, 2 * m);
  j.block(0, m, m, m) = -Matrix::Identity(m, m);
  j.block(m, 0, m, m) = Matrix::Identity(m, m);
  return j;
}

Matrix re_part(const Matrix& x) { return 0.5 * (x + x.adjoint()); }

Matrix im_part(const Matrix& x) {
  return (x - x.adjoint()) / cplx(0.0, 2.0);
}

double hermiticity_defect(const Matrix& x) { return norm(x - x.adjoint()); }

bool is_hermitian(const Matrix& x, double tol) {
  return x.rows() == x.cols() && hermiticity_defect(x) <= tol;
}

bool all_finite(const Matrix& x) { return x.allFinite(); }

double min_eigenvalue_hermitian(const Matrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(re_part(x), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue_hermitian(const Matrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(re_part(x), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

}  // namespace weyldirac
