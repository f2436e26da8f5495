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

#include <vector>

#include "weyldirac/foundation.hpp"
#include "weyldirac/ode.hpp"
#include "weyldirac/potential.hpp"

namespace weyldirac {

struct RiccatiState {
  Matrix v;
  double x = 0.0;
  cplx z;
};

struct CayleyState {
  Matrix theta;
  double x = 0.0;
  cplx z;
  SignFactor sign;
  // lambda_min(I - theta* theta).
  double contractivity = 0.0;
};

// Right-hand side of V' = -zV^2 - V B22 V - B12 V - V B21 - B11 - z
// (the alpha0 dynamics of V = u2 u1^{-1}).
Matrix riccati_rhs(cplx z, const Matrix& v, const Matrix& b);

// || V' - riccati_rhs(z, V, B) ||.
double riccati_residual(cplx z, const Matrix& v, const Matrix& dv,
                        const Matrix& b);

struct RiccatiOptions {
  OdeOptions ode{};
  // ||V||_max above this aborts with PoleEncountered.
  double pole_threshold = 1e8;
};

// Trajectory from x0 to x1 (either direction), one state per accepted step
// including both endpoints.
std::vector<RiccatiState> integrate_riccati(cplx z, const Matrix& v0, double x0,
                                            double x1, const PotentialSpec& spec,
                                            const RiccatiOptions& opt = {});

// theta = (I + i sigma M)(I - i sigma M)^{-1}.
Matrix cayley(const Matrix& m, SignFactor sign);
// M = -i sigma (theta + I)^{-1} (theta - I).
Matrix cayley_inverse(const Matrix& theta, SignFactor sign);

Matrix cayley_rhs(cplx z, const Matrix& theta, const Matrix& b,
                  SignFactor sign);

struct CayleyOptions {
  OdeOptions ode{};
  double contractivity_tol = 1e-9;
};

std::vector<CayleyState> integrate_cayley(cplx z, const Matrix& theta0,
                                          double x0, double x1,
                                          const PotentialSpec& spec,
                                          SignFactor sign,
                                          const CayleyOptions& opt = {});

}  // namespace weyldirac
