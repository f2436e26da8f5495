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

#include "weyldirac/riccati.hpp"

#include <cmath>

namespace weyldirac {

namespace {

constexpr double kSingularLimit = 1e12;

struct Blocks {
  Matrix b11, b12, b21, b22;
};

Blocks split(const Matrix& b) {
  const Eigen::Index m = b.rows() / 2;
  return {b.block(0, 0, m, m), b.block(0, m, m, m), b.block(m, 0, m, m),
          b.block(m, m, m, m)};
}

Matrix checked_inverse(const Matrix& a, const char* what) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 0.0) || sv(0) / sv(sv.size() - 1) > kSingularLimit) {
    throw Error(ErrorKind::SingularCayley, what);
  }
  return a.inverse();
}

double lambda_min_contraction(const Matrix& theta) {
  const Eigen::Index m = theta.rows();
  return min_eigenvalue_hermitian(Matrix::Identity(m, m) - theta.adjoint() * theta);
}

}  // namespace

Matrix riccati_rhs(cplx z, const Matrix& v, const Matrix& b) {
  const Blocks k = split(b);
  const Eigen::Index m = v.rows();
  return -z * (v * v) - v * k.b22 * v - k.b12 * v - v * k.b21 - k.b11 -
         z * Matrix::Identity(m, m);
}

double riccati_residual(cplx z, const Matrix& v, const Matrix& dv,
                        const Matrix& b) {
  return norm(dv - riccati_rhs(z, v, b));
}

std::vector<RiccatiState> integrate_riccati(cplx z, const Matrix& v0, double x0,
                                            double x1, const PotentialSpec& spec,
                                            const RiccatiOptions& opt) {
  if (z.imag() == 0.0) {
    throw Error(ErrorKind::DegenerateArguments, "Riccati flow needs Im z != 0");
  }
  if (v0.rows() != spec.m() || v0.cols() != spec.m()) {
    throw Error(ErrorKind::InvalidArgument, "V0 must be m x m");
  }
  std::vector<RiccatiState> traj;
  traj.push_back({v0, x0, z});
  Matrix v = v0;
  OdeStats stats;
  double last_good = x0;
  for (const auto& [a, b] : spec.segments(x0, x1)) {
    const LocalForm f = spec.local_form(a, b);
    auto rhs = [&](double x, const Matrix& y) { return riccati_rhs(z, y, f.at(x)); };
    auto post = [&](double x, Matrix& y) {
      if (!y.allFinite() || y.cwiseAbs().maxCoeff() > opt.pole_threshold) {
        throw Error(ErrorKind::PoleEncountered,
                    "||V|| exceeded " + std::to_string(opt.pole_threshold) +
                        " after x = " + std::to_string(last_good),
                    last_good);
      }
      last_good = x;
      traj.push_back({y, x, z});
      return false;
    };
    try {
      dopri5(rhs, a, b, v, opt.ode, stats, post);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::IntegrationFailure) {
        throw Error(ErrorKind::PoleEncountered,
                    std::string("integration broke down near a pole: ") + e.what(),
                    last_good);
      }
      throw;
    }
  }
  return traj;
}

Matrix cayley(const Matrix& m, SignFactor sign) {
  const Eigen::Index n = m.rows();
  const Matrix id = Matrix::Identity(n, n);
  const cplx is = kI * static_cast<double>(sign.value);
  const Matrix den = checked_inverse(id - is * m, "I - i sigma M is singular");
  return (id + is * m) * den;
}

Matrix cayley_inverse(const Matrix& theta, SignFactor sign) {
  const Eigen::Index n = theta.rows();
  const Matrix id = Matrix::Identity(n, n);
  const cplx is = kI * static_cast<double>(sign.value);
  const Matrix inv = checked_inverse(theta + id, "theta + I is singular");
  return -is * inv * (theta - id);
}

Matrix cayley_rhs(cplx z, const Matrix& theta, const Matrix& b,
                  SignFactor sign) {
  const Blocks k = split(b);
  const Eigen::Index m = theta.rows();
  const Matrix id = Matrix::Identity(m, m);
  const cplx is = kI * static_cast<double>(sign.value);
  const Matrix p = id + theta;
  const Matrix q = id - theta;
  return 0.5 * (p * (-is * (z * id + k.b11)) * p + p * k.b12 * q +
                q * k.b21 * p + q * (is * (z * id + k.b22)) * q);
}

std::vector<CayleyState> integrate_cayley(cplx z, const Matrix& theta0,
                                          double x0, double x1,
                                          const PotentialSpec& spec,
                                          SignFactor sign,
                                          const CayleyOptions& opt) {
  if (theta0.rows() != spec.m() || theta0.cols() != spec.m()) {
    throw Error(ErrorKind::InvalidArgument, "theta0 must be m x m");
  }
  const double c0 = lambda_min_contraction(theta0);
  if (norm(theta0) > 1.0 + opt.contractivity_tol) {
    throw Error(ErrorKind::NotContractive,
                "||theta0|| = " + std::to_string(norm(theta0)) + " > 1");
  }
  std::vector<CayleyState> traj;
  traj.push_back({theta0, x0, z, sign, c0});
  Matrix th = theta0;
  OdeStats stats;
  for (const auto& [a, b] : spec.segments(x0, x1)) {
    const LocalForm f = spec.local_form(a, b);
    auto rhs = [&](double x, const Matrix& y) { return cayley_rhs(z, y, f.at(x), sign); };
    auto post = [&](double x, Matrix& y) {
      const double c = lambda_min_contraction(y);
      if (c < -opt.contractivity_tol) {
        throw Error(ErrorKind::ContractivityLost,
                    "lambda_min(I - theta* theta) = " + std::to_string(c), x);
      }
      traj.push_back({y, x, z, sign, c});
      return false;
    };
    dopri5(rhs, a, b, th, opt.ode, stats, post);
  }
  return traj;
}

}  // namespace weyldirac
