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

#include <cstddef>
#include <limits>
#include <vector>

#include "weyldirac/foundation.hpp"
#include "weyldirac/ode.hpp"
#include "weyldirac/potential.hpp"
#include "weyldirac/types.hpp"

namespace weyldirac {

// value * exp(log_scale). Used to carry solutions whose growth would
// overflow a double.
struct ScaledMatrix {
  Matrix value;
  double log_scale = 0.0;

  Matrix unscaled() const;
  // Divide value by its largest entry and fold the factor into log_scale.
  void normalize();
  // Multiply the scale back into value when the result stays below e^600.
  void fold();
};

struct PropagationOptions {
  OdeOptions ode{};
  // Renormalize the state once its largest entry exceeds this.
  double renormalize_above = 1e100;
  // fundamental_system also integrates at conj(z) to report the
  // symplectic defect.
  bool monitor_symplectic = true;
};

struct PropagationDiagnostics {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
  std::size_t exact_segments = 0;
  std::size_t pade_segments = 0;
  std::size_t period_powers = 0;
  double symplectic_defect = std::numeric_limits<double>::quiet_NaN();
  // True when the defect is relative to ||Psi(conj z)|| ||Psi(z)|| because
  // the solutions were rescaled.
  bool relative_defect = false;
};

// Transports solutions of J Y' = (z + B) Y along the line. Constant pieces
// use the exact exponential, linear grid cells the 5(4) pair, and long
// stretches of periodic specs a powered period map. Keeps a reference to
// `spec`, which must outlive the propagator.
class Propagator {
 public:
  Propagator(const PotentialSpec& spec, cplx z, PropagationOptions opt = {});

  cplx z() const { return z_; }
  const PotentialSpec& spec() const { return spec_; }

  void advance(ScaledMatrix& y, double from, double to);
  ScaledMatrix transfer(double from, double to);

  const PropagationDiagnostics& diagnostics() const { return diag_; }

 private:
  struct ExpData {
    Matrix b;
    Matrix a;
    Matrix p;
    Matrix p_inv;
    Vector lambda;
    bool diagonalizable = false;
  };

  const ExpData& exp_data(const Matrix& b);
  void apply_constant(ScaledMatrix& y, const Matrix& b, double length);
  void apply_linear(ScaledMatrix& y, const LocalForm& f, double a, double b);
  void advance_plain(ScaledMatrix& y, double from, double to);
  void apply_period_power(ScaledMatrix& y, long long n, bool forward);

  const PotentialSpec& spec_;
  cplx z_;
  PropagationOptions opt_;
  PropagationDiagnostics diag_;
  OdeStats ode_stats_;
  std::vector<ExpData> exp_cache_;
  bool have_forward_period_ = false;
  bool have_backward_period_ = false;
  ScaledMatrix forward_period_;
  ScaledMatrix backward_period_;
};

// Psi = (Theta Phi) with Psi(x0) = (alpha*  J alpha*).
struct FundamentalSystem {
  cplx z;
  double x = 0.0;
  double x0 = 0.0;
  Matrix theta;
  Matrix phi;
  BoundaryData alpha;
  // True solution is (theta phi) * exp(log_scale); zero unless the growth
  // is not representable.
  double log_scale = 0.0;
  PropagationDiagnostics diagnostics;

  Matrix psi() const;
};

FundamentalSystem fundamental_system(cplx z, double x, double x0,
                                     const BoundaryData& alpha,
                                     const PotentialSpec& spec,
                                     const PropagationOptions& opt = {});

// ||Psi(conj z, x)* J Psi(z, x) - J||.
double symplectic_defect(const FundamentalSystem& at_zbar,
                         const FundamentalSystem& at_z);

enum class WeylNormalization { Tilde, MNormalized };

// Blocks of the Weyl solution U_+ at x, together with its value at x0.
// The tilde normalization is U_+(x) ~ (I, iI)^T exp(iz(x - x0)) beyond the
// support of B.
struct WeylSolution {
  cplx z;
  double x = 0.0;
  double x0 = 0.0;
  Matrix u1;
  Matrix u2;
  Matrix u1_at_x0;
  Matrix u2_at_x0;
  BoundaryData alpha;
  WeylNormalization normalization = WeylNormalization::Tilde;
  int iterations = 0;
  double last_change = 0.0;

  // M_+(z, x0, alpha) from the values at x0.
  Matrix m_function() const;
  // Right-multiplied so that alpha U_+(x0) = I.
  WeylSolution m_normalized() const;
};

struct VolterraOptions {
  // Cell width is at most max_cell and at most cell_times_z / |z|.
  double max_cell = 1e-3;
  double cell_times_z = 5e-3;
  double tol = 1e-12;
  int max_iterations = 200;
  bool richardson = true;
};

WeylSolution weyl_solution_volterra(cplx z, double x, double x0,
                                    const PotentialSpec& spec,
                                    const BoundaryData& alpha,
                                    const VolterraOptions& opt = {});

}  // namespace weyldirac
