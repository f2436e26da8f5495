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
#include <optional>
#include <vector>

#include "weyldirac/full_line.hpp"

namespace weyldirac {

// ---- trace formula ------------------------------------------------------

struct TraceSample {
  cplx z;
  // 2 z^2 d/dz log M(z, x).
  Matrix lhs;
  double residual = 0.0;
  // ||lhs(h) - lhs(h/2)||, a noise estimate for the difference quotient.
  double step_sensitivity = 0.0;
};

struct TraceCheck {
  double x = 0.0;
  double ray = 0.0;
  // [[B11 - B22, B12 + B21], [B12 + B21, B22 - B11]] averaged over x +- 0.
  Matrix limit;
  std::vector<TraceSample> samples;
};

struct TraceOptions {
  FullLineOptions fullline{};
  double relative_step = 1e-3;
  // DifferentiationFailure when step_sensitivity > rel * ||lhs|| + abs.
  double noise_rel = 0.1;
  double noise_abs = 1e-6;
};

TraceCheck trace_check(double x, const PotentialSpec& spec, double ray,
                       const std::vector<double>& zmags,
                       const TraceOptions& opt = {});

// ---- Floquet theory -----------------------------------------------------

struct Monodromy {
  cplx z;
  double x0 = 0.0;
  double period = 0.0;
  Matrix value;
  // Sorted by modulus, ascending.
  std::vector<cplx> multipliers;
};

Monodromy monodromy(cplx z, const PotentialSpec& spec, double x0,
                    const PropagationOptions& opt = {});

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  // The run reaches the end of the grid, so the true interval may extend.
  bool open_below = false;
  bool open_above = false;
};

struct BandStructure {
  std::vector<double> lambdas;
  std::vector<bool> in_band;
  std::vector<std::vector<cplx>> multipliers;
  std::vector<Interval> bands;
  std::vector<Interval> gaps;
  double tolerance = 0.0;
};

// Recomputes bands/gaps from lambdas and in_band.
void assign_intervals(BandStructure& b);

// In-band iff every multiplier satisfies ||mu| - 1| <= tol * period.
BandStructure band_spectrum(const PotentialSpec& spec,
                            const std::vector<double>& lambdas, double tol = 1e-6,
                            double x0 = 0.0);

// ---- reflectionless / Borg ----------------------------------------------

struct ReflectionlessResult {
  bool reflectionless = true;
  double worst_deviation = 0.0;
  double worst_x = 0.0;
  double worst_lambda = 0.0;
  std::vector<UpsilonSample> samples;
};

ReflectionlessResult reflectionless_check(const PotentialSpec& spec,
                                          const std::vector<double>& xs,
                                          const std::vector<double>& lambdas,
                                          double epsilon = 1e-6, double tol = 1e-3,
                                          const UpsilonOptions& opt = {});

struct BorgOptions {
  // Spectral window [-Lambda, Lambda]; zero means 10 ||B||_inf + 10.
  double lambda_max = 0.0;
  double step = 0.01;
  double band_tol = 1e-6;
  double combination_tol = 1e-8;
  int samples_per_period = 64;
};

struct BorgReport {
  double lambda_max = 0.0;
  BandStructure bands;
  bool full_spectrum = false;
  std::vector<double> x;
  std::vector<Matrix> diagonal_difference;  // B11 - B22
  std::vector<Matrix> offdiagonal_sum;      // B12 + B21
  double max_combination = 0.0;
  // Full spectrum (with unimodular multipliers everywhere) forces the
  // combinations to vanish.
  bool consistent = true;
};

BorgReport borg_diagnostic(const PotentialSpec& spec, const BorgOptions& opt = {});

// ---- local uniqueness ---------------------------------------------------

struct DecayOptions {
  HalfLineOptions halfline{};
  OdeOptions ode{};
  // Samples with a difference below noise_factor * halfline.tol *
  // max(1, ||M||) at the end of the window are discarded.
  double noise_factor = 10.0;
};

struct DecayFit {
  double ray = 0.0;
  double a = 0.0;
  std::vector<double> zmags;
  std::vector<double> im_z;
  // log ||M_1+(z, x0) - M_2+(z, x0)||.
  std::vector<double> log_difference;
  // log_difference ~ intercept - slope * Im z; slope ~ 2a.
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double window_estimate = 0.0;
  int discarded = 0;
};

// Both specs must coincide on (x0, x0 + a). The difference of the alpha0
// M-functions at x0 + a is carried back to x0 through the Riccati
// difference equation, in log-scaled form.
DecayFit uniqueness_decay(const PotentialSpec& spec1, const PotentialSpec& spec2,
                          double x0, double a, double ray,
                          const std::vector<double>& zmags,
                          const DecayOptions& opt = {});

void write_band_csv(std::ostream& os, const BandStructure& b);
void write_trace_csv(std::ostream& os, const TraceCheck& t);
void write_decay_csv(std::ostream& os, const DecayFit& d);

}  // namespace weyldirac
