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
#include <string>
#include <vector>

#include "weyldirac/types.hpp"

namespace weyldirac::cli {

// "1.5", "2i", "-0.5+3e2i", "1-i".
cplx parse_complex(const std::string& text);

// "a:b:n" (inclusive linear grid), "a:b:n:log" (geometric) or a comma list.
std::vector<double> parse_real_list(const std::string& text);
std::vector<cplx> parse_complex_list(const std::string& text);

struct RunConfig {
  std::string subcommand;
  std::string potential;
  std::string potential2;

  // Boundary data: a JSON file with "alpha1"/"alpha2", or the angle t in
  // alpha = (cos t I, sin t I). Default alpha0.
  std::string alpha_file;
  std::optional<double> alpha_angle;

  double x0 = 0.0;
  double x1 = 1.0;
  double a = 1.0;
  std::vector<double> xs;
  std::vector<double> xps;
  std::vector<cplx> zs;
  std::vector<double> zmags;
  double ray = 1.5707963267948966;
  std::vector<double> lambdas;
  std::vector<double> cs;
  double epsilon = 1e-6;
  int order = 2;
  std::string sign = "plus";
  std::string side = "plus";
  std::vector<double> fit_zmags;
  std::optional<double> lambda_max;
  double step = 0.01;
  std::optional<double> omega_scalar;
  std::string omega_file;

  // Tolerances.
  double halfline_tol = 1e-12;
  double ode_rtol = 1e-12;
  double band_tol = 1e-6;
  double reflect_tol = 1e-3;
  double disk_tol = 1e-8;

  std::string output;  // file prefix; empty means the subcommand name
  bool to_stdout = false;
  int threads = 0;  // 0: WEYLDIRAC_THREADS or hardware concurrency
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitModuleError = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand, writing <prefix>.csv and <prefix>.json (or the CSV to
// `out` with to_stdout). Module errors go to `err` as {"error": kind}.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv and calls run().
int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err);

}  // namespace weyldirac::cli
