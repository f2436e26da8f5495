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

#include "weyldirac/weyl_disk.hpp"

namespace weyldirac {

struct FullLineOptions {
  HalfLineOptions halfline{};
  // cond(M_- - M_+) above this is SingularDifference.
  double max_condition = 1e12;
};

struct FullLineM {
  Matrix m11, m12, m21, m22;
  cplx z;
  double x0 = 0.0;
  BoundaryData alpha;
  Matrix m_plus, m_minus;
  // ||M_+ D^{-1} M_- - M_- D^{-1} M_+||, D = M_- - M_+.
  double m22_defect = 0.0;

  Matrix full() const;
};

FullLineM fullline_m(cplx z, double x0, const BoundaryData& alpha,
                     const PotentialSpec& spec, const FullLineOptions& opt = {});

struct GreensMatrix {
  cplx z;
  double x = 0.0;
  double xp = 0.0;
  Matrix value;
};

// G(z, x, x') for alpha0, with the half-line data at x0 computed once.
class GreensFunction {
 public:
  GreensFunction(cplx z, double x0, const PotentialSpec& spec,
                 const FullLineOptions& opt = {});

  // x != x'.
  GreensMatrix operator()(double x, double xp) const;
  // [G(x, x+0) + G(x, x-0)] / 2.
  Matrix diagonal(double x) const;

  const FullLineM& m() const { return m_; }

 private:
  // U_-(z, x) or U_+(z, x), 2m x m.
  Matrix weyl_column(cplx z, double x, const Matrix& mval, double& log_scale) const;
  Matrix branch(double x, double xp, bool lower) const;

  const PotentialSpec& spec_;
  cplx z_;
  double x0_;
  FullLineOptions opt_;
  FullLineM m_;
  Matrix delta_inv_;
};

GreensMatrix greens_matrix(cplx z, double x, double xp, double x0,
                           const PotentialSpec& spec,
                           const FullLineOptions& opt = {});

// Principal logarithm. Eigenvalues within 1e-12 of the negative real axis
// are nudged into the upper half-plane by 1e-14i first.
Matrix principal_log(const Matrix& a);

struct UpsilonOptions {
  FullLineOptions fullline{};
  bool richardson = true;
};

struct UpsilonSample {
  double lambda = 0.0;
  double epsilon = 0.0;
  // Extrapolated value (or raw value without Richardson).
  Matrix value;
  Matrix raw;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

UpsilonSample upsilon(double lambda, double x0, const BoundaryData& alpha,
                      const PotentialSpec& spec, double epsilon,
                      const UpsilonOptions& opt = {});

void write_upsilon_csv(std::ostream& os, const std::vector<UpsilonSample>& s);
void write_fullline_csv(std::ostream& os, const std::vector<FullLineM>& s);

}  // namespace weyldirac
