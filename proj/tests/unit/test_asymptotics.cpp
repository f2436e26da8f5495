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
#include <sstream>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "oracles.hpp"
#include "weyldirac/asymptotics.hpp"
#include "weyldirac/weyl_disk.hpp"

namespace weyldirac {
namespace {

using std::numbers::pi;

Matrix scalar(cplx v) { return Matrix::Constant(1, 1, v); }

DerivativeSamples constant_samples(const Matrix& b, int order) {
  std::vector<double> x;
  std::vector<Matrix> v;
  for (int i = 0; i < 11; ++i) {
    x.push_back(0.1 * i);
    v.push_back(b);
  }
  return sample_derivatives(x, v, order);
}

// B = phi(x) [[a, q], [q, -a]], phi = sin^4(pi x) on [0, 1].
double bump(double x) { return (x <= 0 || x >= 1) ? 0.0 : std::pow(std::sin(pi * x), 4); }

Matrix bump_b(double x) {
  const double f = bump(x);
  Matrix b(2, 2);
  b << 0.6 * f, 0.9 * f, 0.9 * f, -0.6 * f;
  return b;
}

PotentialSpec bump_spec(int points) {
  std::vector<double> xs;
  std::vector<Matrix> vs;
  for (int i = 0; i <= points; ++i) {
    xs.push_back(double(i) / points);
    vs.push_back(bump_b(xs.back()));
  }
  return PotentialSpec(1, {Piece::grid(0.0, 1.0, xs, vs)}, std::nullopt, "bump");
}

TEST(Expansion, ConstantQClosedForm) {
  const double q = 0.8;
  const auto c = expansion_coefficients(constant_samples(oracle::off_diagonal_b(q), 2),
                                        0.5, 3, ExpansionSign::Plus);
  ASSERT_EQ(c.coeffs.size(), 4u);
  EXPECT_EQ(c.coeffs[0](0, 0), kI);
  EXPECT_NEAR(std::abs(c.coeffs[1](0, 0) + q), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c.coeffs[2](0, 0) + kI * q * q / 2.0), 0.0, 1e-14);
  // i sqrt(1 + q^2 / y^2) with z = iy has no z^-3 term.
  EXPECT_NEAR(std::abs(c.coeffs[3](0, 0)), 0.0, 1e-14);
}

TEST(Expansion, MatchesClosedFormMPlus) {
  const double q = 0.8;
  const auto c = expansion_coefficients(constant_samples(oracle::off_diagonal_b(q), 3),
                                        0.0, 4, ExpansionSign::Plus);
  for (double y : {50.0, 200.0}) {
    const cplx z{0.3 * y, y};
    const cplx exact = oracle::const_q_m_plus(q, z);
    EXPECT_LT(std::abs(evaluate_expansion(c, z)(0, 0) - exact), 5.0 / std::pow(y, 5));
  }
}

TEST(Expansion, MinusSignClosedForm) {
  const double q = 0.8;
  const auto c = expansion_coefficients(constant_samples(oracle::off_diagonal_b(q), 2),
                                        0.0, 3, ExpansionSign::Minus);
  const cplx z{0.0, 300.0};
  EXPECT_LT(std::abs(evaluate_expansion(c, z)(0, 0) - oracle::const_q_m_minus(q, z)),
            1e-9);
}

TEST(Expansion, FreeIsTrivial) {
  const auto c = expansion_coefficients(constant_samples(Matrix::Zero(4, 4), 4), 0.3, 5,
                                        ExpansionSign::Minus);
  EXPECT_EQ(c.coeffs[0], -kI * Matrix::Identity(2, 2));
  for (int k = 1; k <= 5; ++k) EXPECT_EQ(norm(c.coeffs[k]), 0.0);
}

TEST(Expansion, DiagonalB) {
  const double b = 0.7;
  Matrix bm(2, 2);
  bm << b, 0, 0, -b;
  const auto c = expansion_coefficients(constant_samples(bm, 0), 0.0, 1, ExpansionSign::Plus);
  EXPECT_NEAR(std::abs(c.coeffs[1](0, 0) - kI * b), 0.0, 1e-15);
}

TEST(Expansion, SignSymmetryNormalForm) {
  std::mt19937_64 rng(9);
  const Matrix b = oracle::random_normal_form(3, rng);
  const auto s = constant_samples(b, 0);
  const Matrix p = expansion_coefficients(s, 0.0, 1, ExpansionSign::Plus).coeffs[1];
  const Matrix mi = expansion_coefficients(s, 0.0, 1, ExpansionSign::Minus).coeffs[1];
  EXPECT_LT(norm(re_part(p) - re_part(mi)), 1e-14);
  EXPECT_LT(norm(im_part(p) + im_part(mi)), 1e-14);
}

TEST(Expansion, InsufficientDerivatives) {
  EXPECT_ERROR_KIND(expansion_coefficients(constant_samples(Matrix::Zero(2, 2), 1), 0.0,
                                           3, ExpansionSign::Plus),
                    ErrorKind::InsufficientDerivatives);
}

TEST(Expansion, DifferentiateIsSecondOrder) {
  std::vector<double> x;
  std::vector<Matrix> f;
  for (int i = 0; i <= 40; ++i) {
    const double t = std::pow(i / 40.0, 1.3);
    x.push_back(t);
    f.push_back(scalar(t * t));
  }
  const auto d = differentiate(x, f);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(d[i](0, 0).real(), 2 * x[i], 1e-12);
  }
}

std::vector<FitSample> const_q_samples(double q, std::vector<double> ys) {
  std::vector<FitSample> out;
  for (double y : ys) out.push_back({cplx{0, y}, scalar(oracle::const_q_m_plus(q, {0, y}))});
  return out;
}

TEST(Fit, ConstantQImaginaryAxis) {
  const double q = 0.8;
  const auto fit = fit_expansion(const_q_samples(q, {10, 20, 40, 80}), 2);
  EXPECT_LT(std::abs(fit.coefficients.coeffs[1](0, 0) + q), 0.01 * q);
  for (double r : fit.residuals) EXPECT_LT(r, 1e-3);
}

TEST(Fit, FreeSamplesVanish) {
  std::vector<FitSample> s;
  for (double y : {10.0, 20.0, 40.0, 80.0}) s.push_back({cplx{0, y}, scalar(kI)});
  const auto fit = fit_expansion(s, 2);
  for (int k = 1; k <= 2; ++k) EXPECT_LT(norm(fit.coefficients.coeffs[k]), 1e-9);
}

TEST(Fit, Errors) {
  EXPECT_ERROR_KIND(fit_expansion(const_q_samples(1.0, {10, 11, 12, 13}), 2),
                    ErrorKind::IllConditionedFit);
  auto s = const_q_samples(1.0, {10, 20, 40, 80});
  s[2].z = cplx{40, 1};
  EXPECT_ERROR_KIND(fit_expansion(s, 2), ErrorKind::SectorViolation);
  EXPECT_ERROR_KIND(fit_expansion(const_q_samples(1.0, {10, 20, 40}), 2),
                    ErrorKind::InvalidArgument);
}

TEST(Fit, AgreesWithRecursionOnSmoothBump) {
  const PotentialSpec spec = bump_spec(4000);
  const double x0 = 0.4;
  std::vector<double> gx;
  std::vector<Matrix> gb;
  for (int i = 0; i <= 400; ++i) {
    gx.push_back(i / 400.0);
    gb.push_back(bump_b(gx.back()));
  }
  const auto rec = expansion_coefficients(sample_derivatives(gx, gb, 3), x0, 4,
                                          ExpansionSign::Plus);
  std::vector<FitSample> samples;
  for (double y : {40.0, 60.0, 90.0, 135.0, 200.0, 300.0, 450.0, 675.0}) {
    const cplx z{0.0, y};
    samples.push_back({z, halfline_m(z, x0, alpha0(1), spec).m_value});
  }
  const auto fit = fit_expansion(samples, 6);
  for (int k = 1; k <= 3; ++k) {
    const cplx r = rec.coeffs[k](0, 0);
    const cplx f = fit.coefficients.coeffs[k](0, 0);
    EXPECT_LT(std::abs(f - r), 0.01 * std::abs(r)) << "k=" << k << " fit " << f << " rec " << r;
  }
}

TEST(FullLineCoeff, ConstantNormalForm) {
  std::mt19937_64 rng(4);
  const Matrix b = oracle::random_normal_form(2, rng);
  const PotentialSpec spec = PotentialSpec::constant(b);
  EXPECT_LT(norm(fullline_first_coeff(spec, 0.3) + 0.5 * kI * b), 1e-15);
  EXPECT_EQ(norm(fullline_first_coeff(PotentialSpec::zero(2), 0.3)), 0.0);
}

TEST(FullLineCoeff, StepAverages) {
  const Matrix b = oracle::off_diagonal_b(1.0);
  const PotentialSpec spec = PotentialSpec::constant_on(b, 0.0, 1.0);
  EXPECT_LT(norm(fullline_first_coeff(spec, 0.0) + 0.25 * kI * b), 1e-15);
  EXPECT_LT(norm(fullline_first_coeff(spec, 1.0) + 0.25 * kI * b), 1e-15);
}

TEST(Expansion, CsvLayout) {
  const auto c = expansion_coefficients(constant_samples(oracle::off_diagonal_b(1.0), 0),
                                        0.0, 1, ExpansionSign::Plus);
  std::ostringstream os;
  write_coefficients_csv(os, c);
  EXPECT_EQ(os.str(), "k,row,col,re,im\n0,0,0,0,1\n1,0,0,-1,0\n");
}

}  // namespace
}  // namespace weyldirac
