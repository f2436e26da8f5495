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

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace weyldirac {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

enum class ErrorKind {
  NotNormalized,
  NotLagrangian,
  InvalidBoundaryCondition,
  DegenerateArguments,
  NonHermitianPiece,
  NonFiniteValue,
  InvalidPotential,
  OutOfDomain,
  EmptyWindow,
  IntegrationFailure,
  MismatchedEvaluation,
  NoCompactSupport,
  IterationDivergence,
  EigenvalueHit,
  NoConvergence,
  SingularDenominator,
  PoleEncountered,
  SingularCayley,
  ContractivityLost,
  NotContractive,
  InsufficientDerivatives,
  IllConditionedFit,
  SectorViolation,
  SingularDifference,
  LogBranchFailure,
  DifferentiationFailure,
  NotPeriodic,
  DifferenceBelowNoise,
  NotHermitianOmega,
  InvalidArgument,
  IoError,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this type. `location` carries
// the last good abscissa for integration errors (e.g. PoleEncountered).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<double> location = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<double> location() const noexcept { return location_; }

 private:
  ErrorKind kind_;
  std::optional<double> location_;
};

// Matrix norm policy. Spectral is the default; Frobenius is cheaper and
// bounds the spectral norm from above.
enum class NormPolicy { Spectral, Frobenius };

void set_norm_policy(NormPolicy policy);
NormPolicy norm_policy();

double norm(const Matrix& x);

// J = [[0, -I], [I, 0]] with m x m blocks.
Matrix symplectic_j(int m);

// Re X = (X + X*)/2 and Im X = (X - X*)/(2i); both Hermitian.
Matrix re_part(const Matrix& x);
Matrix im_part(const Matrix& x);

double hermiticity_defect(const Matrix& x);
bool is_hermitian(const Matrix& x, double tol);
bool all_finite(const Matrix& x);

// Smallest / largest eigenvalue of the Hermitian part of x.
double min_eigenvalue_hermitian(const Matrix& x);
double max_eigenvalue_hermitian(const Matrix& x);

inline constexpr double kDefaultAlgebraicTol = 1e-10;

}  // namespace weyldirac
