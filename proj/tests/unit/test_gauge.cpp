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


#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "oracles.hpp"
#include "weyldirac/gauge.hpp"
#include "weyldirac/spectral.hpp"

namespace weyldirac {
namespace {

PotentialSpec random_pieces(int m, int count, double length, std::uint64_t seed,
                            bool normal) {
  std::mt19937_64 rng(seed);
  std::vector<Piece> pieces;
  for (int i = 0; i < count; ++i) {
    const double lo = length * i / count, hi = length * (i + 1) / count;
    pieces.push_back(Piece::constant(
        lo, hi, normal ? oracle::random_normal_form(m, rng) : oracle::random_hermitian(2 * m, rng)));
  }
  return PotentialSpec(m, pieces);
}

double max_gap(const PotentialSpec& a, const PotentialSpec& b, double lo, double hi) {
  double worst = 0.0;
  for (int i = 0; i <= 997; ++i) {
    const double x = lo + (hi - lo) * (i + 0.5) / 998.0;
    worst = std::max(worst, norm(a.eval(x) - b.eval(x)));
  }
  return worst;
}

TEST(GaugeFactors, NormalFormHasIdentityFactors) {
  const PotentialSpec spec = random_pieces(2, 3, 1.0, 1, true);
  const auto g = gauge_factors(spec, 0.0, 1.0);
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    EXPECT_LT(norm(g.u11[i] - Matrix::Identity(2, 2)), 1e-14);
    EXPECT_LT(norm(g.u22[i] - Matrix::Identity(2, 2)), 1e-14);
  }
}

TEST(GaugeFactors, ScalarDiagonalClosedForm) {
  const double b = 0.9;
  Matrix bm(2, 2);
  bm << b, 0, 0, b;
  const auto g = gauge_factors(PotentialSpec::constant(bm), 0.5, 2.0);
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const double t = g.x[i] - 0.5;
    EXPECT_LT(std::abs(g.u11[i](0, 0) - std::polar(1.0, -b * t)), 1e-10);
    EXPECT_LT(std::abs(g.u22[i](0, 0) - std::polar(1.0, b * t)), 1e-10);
  }
}

TEST(GaugeFactors, UnitarityOnLongInterval) {
  const PotentialSpec spec = random_pieces(3, 10, 10.0, 2, false);
  const auto g = gauge_factors(spec, 0.0, 10.0);
  EXPECT_LT(g.max_drift, 1e-8);
  EXPECT_LT(g.final_drift, 1e-8);
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    EXPECT_LT(norm(g.u11[i].adjoint() * g.u11[i] - Matrix::Identity(3, 3)), 1e-8);
  }
}

TEST(NormalForm, FixedPointOnNormalInput) {
  const PotentialSpec spec = random_pieces(2, 4, 1.0, 3, true);
  EXPECT_LT(max_gap(normal_form(spec, 0.0, 1.0), spec, 0.0, 1.0), 1e-13);
}

TEST(NormalForm, ScalarDiagonalMapsToZero) {
  Matrix bm(2, 2);
  bm << 0.7, 0, 0, 0.7;
  const PotentialSpec nf = normal_form(PotentialSpec::constant(bm), 0.0, 1.0);
  EXPECT_LT(max_gap(nf, PotentialSpec::zero(1), 0.0, 1.0), 1e-15);
}

TEST(NormalForm, GenericOutputIsNormalAndIdempotent) {
  const PotentialSpec spec = random_pieces(2, 5, 2.0, 4, false);
  const PotentialSpec nf = normal_form(spec, 0.0, 2.0);
  EXPECT_TRUE(check_normal_form(nf, 0.0, 2.0, 1e-9));
  const PotentialSpec nf2 = normal_form(nf, 0.0, 2.0);
  EXPECT_LT(max_gap(nf2, nf, 0.0, 2.0), 1e-9);
}

TEST(NormalForm, PreservesNormOfCombination) {
  // |W| is gauge invariant: ||2 (B~11, B~12)|| relates to the unitarily
  // conjugated combination, so singular values must match.
  const PotentialSpec spec = random_pieces(2, 2, 1.0, 8, false);
  const PotentialSpec nf = normal_form(spec, 0.0, 1.0);
  for (double x : {0.2, 0.7}) {
    const Matrix b = spec.eval(x), t = nf.eval(x);
    const Matrix c = (b.block(0, 2, 2, 2) + b.block(2, 0, 2, 2)) -
                     kI * (b.block(0, 0, 2, 2) - b.block(2, 2, 2, 2));
    const Matrix ct = 2.0 * t.block(0, 2, 2, 2) - 2.0 * kI * t.block(0, 0, 2, 2);
    Eigen::JacobiSVD<Matrix> s1(c), s2(ct);
    EXPECT_LT((s1.singularValues() - s2.singularValues()).norm(), 1e-9);
  }
}

TEST(GaugeOmega, ZeroAndHalfPi) {
  const PotentialSpec spec = random_pieces(2, 3, 1.0, 5, false);
  const PotentialSpec nf = normal_form(spec, 0.0, 1.0);
  EXPECT_LT(max_gap(gauge_with_omega(spec, Matrix::Zero(2, 2), 0.0, 1.0), nf, 0.0, 1.0), 1e-15);
  const PotentialSpec flipped =
      gauge_with_omega(spec, 0.5 * std::numbers::pi * Matrix::Identity(2, 2), 0.0, 1.0);
  double worst = 0.0;
  for (double x : {0.1, 0.45, 0.9}) worst = std::max(worst, norm(flipped.eval(x) + nf.eval(x)));
  EXPECT_LT(worst, 1e-14);
}

TEST(GaugeOmega, RejectsNonHermitian) {
  Matrix w(2, 2);
  w << 0, 1, 0, 0;
  EXPECT_ERROR_KIND(gauge_with_omega(PotentialSpec::zero(2), w, 0.0, 1.0),
                    ErrorKind::NotHermitianOmega);
}

TEST(NormalForm, PeriodicSpectrumInvariant) {
  Matrix bm(2, 2);
  bm << 0.6, 0, 0, 0.6;
  const PotentialSpec spec = PotentialSpec::periodic_constant(bm, 1.0);
  const PotentialSpec nf = normal_form(spec, 0.0, 1.0);
  ASSERT_TRUE(nf.periodic());
  std::vector<double> grid;
  for (int i = 0; i <= 60; ++i) grid.push_back(-3.0 + 0.1 * i);
  const auto b1 = band_spectrum(spec, grid);
  const auto b2 = band_spectrum(nf, grid);
  EXPECT_EQ(b1.in_band, b2.in_band);
  EXPECT_EQ(b1.gaps.size(), 0u);
}

}  // namespace
}  // namespace weyldirac
