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

#include "weyldirac/foundation.hpp"
#include "weyldirac/potential.hpp"
#include "weyldirac/propagator.hpp"

namespace weyldirac {

// M(z, c, x0, alpha, beta) = -[beta Phi(c)]^{-1} beta Theta(c).
Matrix regular_m(cplx z, double c, double x0, const BoundaryData& alpha,
                 const BoundaryCondition& beta, const PotentialSpec& spec,
                 const PropagationOptions& opt = {});

// Same map applied to an already propagated Psi(c) (possibly rescaled).
Matrix regular_m_from_psi(const Matrix& psi_c, const BoundaryCondition& beta);

struct DiskFunctional {
  // E_c(M) * exp(-2 log_scale); log_scale is zero unless U(c) overflows.
  Matrix value;
  double log_scale = 0.0;
  double hermiticity_defect = 0.0;
};

// E_c(M) = sigma(x0, c, z) U(c)* (iJ) U(c) with U = Psi (I; M).
DiskFunctional e_c(const Matrix& m_value, cplx z, double c, double x0,
                   const BoundaryData& alpha, const PotentialSpec& spec,
                   const PropagationOptions& opt = {});

enum class DiskClass { Interior, Boundary, Exterior };
const char* to_string(DiskClass c);

struct WeylPoint {
  Matrix m_value;
  cplx z;
  double c = 0.0;
  double x0 = 0.0;
  DiskClass classification = DiskClass::Exterior;
  DiskFunctional e_c_value;
  double lambda_max = 0.0;
  double tolerance = 0.0;
};

// Classifies lambda_max(E_c(M)) against rel_tol * (1 + ||E_c||).
WeylPoint disk_membership(const Matrix& m_value, cplx z, double c, double x0,
                          const BoundaryData& alpha, const PotentialSpec& spec,
                          double rel_tol = 1e-8,
                          const PropagationOptions& opt = {});

enum class HalfLineSide { Plus, Minus };

struct HalfLineOptions {
  // Cauchy tolerance on successive truncations, relative to max(1, ||M||).
  double tol = 1e-12;
  // Consecutive doublings that must satisfy the Cauchy test.
  int consecutive = 2;
  // First |c - x0|; zero means 1, or one period for periodic specs.
  double initial_length = 0.0;
  double max_length = 1e9;
  // For B vanishing outside a bounded set, start from the decaying free
  // solution at the edge of the support instead of doubling.
  bool exact_tail = true;
  PropagationOptions propagation{};
};

struct HalfLineM {
  HalfLineSide side = HalfLineSide::Plus;
  Matrix m_value;
  cplx z;
  double x0 = 0.0;
  BoundaryData alpha;
  // Last Cauchy difference; estimates the Weyl disk radius at c_final.
  double tail_bound = 0.0;
  double c_final = 0.0;
  int doublings = 0;
};

// Limit-point M_+ (c -> +inf) or M_- (c -> -inf) through regular
// M-functions with beta = (I 0) on doubling intervals.
HalfLineM halfline_m(cplx z, double x0, const BoundaryData& alpha,
                     const PotentialSpec& spec, HalfLineSide side,
                     const HalfLineOptions& opt = {});

inline HalfLineM halfline_m(cplx z, double x0, const BoundaryData& alpha,
                            const PotentialSpec& spec,
                            const HalfLineOptions& opt = {}) {
  return halfline_m(z, x0, alpha, spec, HalfLineSide::Plus, opt);
}

// M_alpha = [-alpha J gamma* + alpha gamma* M_gamma]
//           [alpha gamma* + alpha J gamma* M_gamma]^{-1}.
Matrix lft_boundary_change(const Matrix& m_gamma, const BoundaryData& alpha,
                           const BoundaryData& gamma);

}  // namespace weyldirac
