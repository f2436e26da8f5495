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

#include "weyldirac/ode.hpp"
#include "weyldirac/potential.hpp"

namespace weyldirac {

struct GaugeOptions {
  OdeOptions ode{};
  // Polar re-unitarization once ||U*U - I|| exceeds this.
  double reunitarize_above = 1e-10;
  // Sample spacing on constant pieces.
  double constant_spacing = 0.01;
};

// U_11, U_22 with U_jj(x0) = I. Breakpoints of B appear twice, once per
// side; a sample at a jump is tagged with the side it belongs to.
struct GaugeFactors {
  std::vector<double> x;
  std::vector<Side> side;
  std::vector<Matrix> u11;
  std::vector<Matrix> u22;
  // Largest ||U*U - I|| seen before any correction, and at the end.
  double max_drift = 0.0;
  double final_drift = 0.0;
  int reunitarizations = 0;
};

GaugeFactors gauge_factors(const PotentialSpec& spec, double x0, double x1,
                           const GaugeOptions& opt = {});

// B~ on [x0, x1] as grid pieces (one per continuous stretch of B). The
// period is kept when [x0, x1] is exactly one period of a periodic input.
PotentialSpec normal_form(const PotentialSpec& spec, double x0, double x1,
                          const GaugeOptions& opt = {});

PotentialSpec gauge_with_omega(const PotentialSpec& spec, const Matrix& omega,
                               double x0, double x1, const GaugeOptions& opt = {});

}  // namespace weyldirac
