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

#include <iosfwd>
#include <vector>

#include "weyldirac/potential.hpp"

namespace weyldirac {

enum class ExpansionSign { Plus, Minus };

// B and its derivatives B', ..., B^(order) sampled on a strictly increasing
// grid. derivs[k][i] is B^(k+1)(x[i]).
struct DerivativeSamples {
  std::vector<double> x;
  std::vector<Matrix> b;
  std::vector<std::vector<Matrix>> derivs;

  int order() const { return static_cast<int>(derivs.size()); }
  int m() const { return b.empty() ? 0 : static_cast<int>(b.front().rows() / 2); }
};

// Second-order finite differences on a non-uniform grid (one-sided at the
// ends). Needs at least three points.
std::vector<Matrix> differentiate(const std::vector<double>& x,
                                  const std::vector<Matrix>& f);

DerivativeSamples sample_derivatives(const std::vector<double>& x,
                                     const std::vector<Matrix>& b, int order);
DerivativeSamples sample_derivatives(const PotentialSpec& spec, double x_lo,
                                     double x_hi, int points, int order);

struct ExpansionCoefficients {
  ExpansionSign sign = ExpansionSign::Plus;
  double x = 0.0;
  // coeffs[k] = m_k, k = 0..order.
  std::vector<Matrix> coeffs;
  int order = 0;
};

// Coefficients m_{+-,0..n} at every grid point.
std::vector<ExpansionCoefficients> expansion_coefficients_on_grid(
    const DerivativeSamples& derivs, int n, ExpansionSign sign);

// Same, linearly interpolated to x.
ExpansionCoefficients expansion_coefficients(const DerivativeSamples& derivs,
                                             double x, int n, ExpansionSign sign);

Matrix evaluate_expansion(const ExpansionCoefficients& c, cplx z);

struct FitSample {
  cplx z;
  Matrix m;
};

struct FitOptions {
  ExpansionSign sign = ExpansionSign::Plus;
  // Opening angle of the sector around the positive imaginary axis.
  double sector_angle = 1.5;
  double min_modulus_ratio = 2.0;
  double max_condition = 1e12;
};

struct ExpansionFit {
  ExpansionCoefficients coefficients;
  // ||M_j - model(z_j)|| per sample.
  std::vector<double> residuals;
  double condition = 0.0;
};

ExpansionFit fit_expansion(const std::vector<FitSample>& samples, int n,
                           const FitOptions& opt = {});

// M_1(x, alpha0) of the 2m x 2m full-line expansion, averaged over the
// one-sided limits of B at x.
Matrix fullline_first_coeff(const PotentialSpec& spec, double x);

// Columns k, row, col, re, im.
void write_coefficients_csv(std::ostream& os, const ExpansionCoefficients& c);

}  // namespace weyldirac
