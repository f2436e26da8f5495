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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "weyldirac/types.hpp"

namespace weyldirac {

enum class PieceKind { Constant, Grid };

// One piece of a piecewise description of B on [x_lo, x_hi). Grid pieces
// interpolate linearly between nodes; the nodes must cover [x_lo, x_hi] and
// are read in coordinates x - shift.
struct Piece {
  double x_lo = 0.0;
  double x_hi = 0.0;
  PieceKind kind = PieceKind::Constant;
  Matrix value;
  std::vector<double> grid_x;
  std::vector<Matrix> grid_values;
  double shift = 0.0;

  static Piece constant(double x_lo, double x_hi, Matrix value);
  static Piece grid(double x_lo, double x_hi, std::vector<double> x,
                    std::vector<Matrix> values);
};

enum class OutsidePolicy { Zero, Error };
enum class Side { Left, Right };

// B restricted to an interval free of breakpoints: constant, or linear
// between (x_l, b_l) and (x_r, b_r).
struct LocalForm {
  bool constant = true;
  double x_l = 0.0;
  double x_r = 0.0;
  Matrix b_l;
  Matrix b_r;

  Matrix at(double x) const;
};

// Piecewise model of the 2m x 2m Hermitian coefficient B(x). Immutable after
// construction. Evaluation is right-continuous at piece boundaries.
class PotentialSpec {
 public:
  PotentialSpec() = default;
  PotentialSpec(int m, std::vector<Piece> pieces,
                std::optional<double> period = std::nullopt,
                std::string name = {},
                OutsidePolicy outside = OutsidePolicy::Zero,
                double tol = kDefaultAlgebraicTol);

  static PotentialSpec zero(int m);
  static PotentialSpec constant(const Matrix& b, std::string name = {});
  static PotentialSpec constant_on(const Matrix& b, double lo, double hi,
                                   std::string name = {});
  static PotentialSpec periodic_constant(const Matrix& b, double period,
                                         std::string name = {});

  int m() const { return m_; }
  int dim() const { return 2 * m_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::optional<double> period() const { return period_; }
  bool periodic() const { return period_.has_value(); }
  const std::string& name() const { return name_; }
  OutsidePolicy outside() const { return outside_; }

  // Hull of the pieces; infinite for periodic specs.
  std::pair<double, double> support() const;
  // True when B vanishes outside a bounded interval.
  bool compactly_supported() const;
  // Start of the tiled period for periodic specs.
  double period_origin() const;

  Matrix eval(double x) const;
  Matrix eval_one_sided(double x, Side side) const;

  // Sorted points strictly between a and b (either order) where B may be
  // non-smooth: piece ends and grid nodes.
  std::vector<double> breakpoints(double a, double b) const;

  // Form of B on [a, b]; requires no breakpoint strictly inside.
  LocalForm local_form(double a, double b) const;

  // [a, b] split at breakpoints into consecutive (from, to) pairs running
  // from a to b. Slivers shorter than 1e-13 max(1, |x|) are merged.
  std::vector<std::pair<double, double>> segments(double a, double b) const;

  // sup_x ||B(x)|| over the pieces (0 for the zero spec).
  double sup_norm() const;

 private:
  double wrap(double x, double* shift) const;
  const Piece* find_piece(double x, Side side) const;
  Matrix eval_wrapped(double x, Side side) const;

  int m_ = 0;
  std::vector<Piece> pieces_;
  std::optional<double> period_;
  std::string name_;
  OutsidePolicy outside_ = OutsidePolicy::Zero;
};

// B on [x0, y0], zero elsewhere.
PotentialSpec truncate_potential(const PotentialSpec& spec, double x0,
                                 double y0);

// B22 = -B11, B21 = B12 with B11, B12 Hermitian, sampled over [a, b].
bool check_normal_form(const PotentialSpec& spec, double a, double b,
                       double tol = kDefaultAlgebraicTol);

// JSON potential files.
PotentialSpec potential_from_json(const std::string& text);
std::string potential_to_json(const PotentialSpec& spec);
PotentialSpec load_potential(const std::string& path);
// n x n complex matrix in the same encoding as potential data: rows of
// [re, im] pairs (plain numbers are read as real).
Matrix matrix_from_json(const std::string& text, int n);
std::string matrix_to_json(const Matrix& x);
void save_potential(const PotentialSpec& spec, const std::string& path);

}  // namespace weyldirac
