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

#include "weyldirac/types.hpp"

namespace weyldirac {

// Separated boundary data alpha = (alpha1 alpha2), an m x 2m matrix with
// alpha alpha* = I and alpha J alpha* = 0.
struct BoundaryData {
  Matrix alpha1;
  Matrix alpha2;

  int m() const { return static_cast<int>(alpha1.rows()); }
  Matrix alpha() const;
  // The 2m x m columns alpha* and J alpha*.
  Matrix adjoint_column() const;
  Matrix j_adjoint_column() const;
};

BoundaryData validate_boundary_data(const Matrix& alpha1, const Matrix& alpha2,
                                    double tol = kDefaultAlgebraicTol);

// alpha0 = (I 0).
BoundaryData alpha0(int m);

// alpha1 = W cos(A), alpha2 = W sin(A) with W unitary, A Hermitian.
BoundaryData boundary_data_from(const Matrix& w_unitary,
                                const Matrix& a_hermitian);

// Boundary condition at the far endpoint of a regular interval: rank m and
// Im(beta2 beta1*) semidefinite. Normalized to beta beta* = I on
// construction.
struct BoundaryCondition {
  Matrix beta1;
  Matrix beta2;

  int m() const { return static_cast<int>(beta1.rows()); }
  Matrix beta() const;
  // Im(beta2 beta1*) == 0 within tol.
  bool self_adjoint(double tol = kDefaultAlgebraicTol) const;
};

BoundaryCondition make_boundary_condition(const Matrix& beta1,
                                          const Matrix& beta2,
                                          double tol = kDefaultAlgebraicTol);

// beta = (I 0), the default truncation condition.
BoundaryCondition dirichlet_condition(int m);

struct SignFactor {
  int value = 1;
};

// sign((s - t) Im z).
SignFactor sigma(double s, double t, cplx z);

}  // namespace weyldirac
