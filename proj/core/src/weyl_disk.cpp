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

#include "weyldirac/weyl_disk.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace weyldirac {

namespace {

constexpr double kConditionLimit = 1e12;

double smallest_singular_value(const Matrix& x) {
  Eigen::JacobiSVD<Matrix> svd(x);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

Matrix propagated_psi(cplx z, double c, double x0, const BoundaryData& alpha,
                      const PotentialSpec& spec, const PropagationOptions& opt,
                      double* log_scale) {
  const int m = alpha.m();
  if (spec.m() != m) {
    throw Error(ErrorKind::InvalidArgument,
                "boundary data and potential have different block sizes");
  }
  ScaledMatrix y;
  y.value.resize(2 * m, 2 * m);
  y.value << alpha.adjoint_column(), alpha.j_adjoint_column();
  Propagator prop(spec, z, opt);
  prop.advance(y, x0, c);
  y.fold();
  *log_scale = y.log_scale;
  return y.value;
}

}  // namespace

Matrix regular_m_from_psi(const Matrix& psi_c, const BoundaryCondition& beta) {
  const int m = beta.m();
  const Matrix b = beta.beta();
  const Matrix bt = b * psi_c.leftCols(m);
  const Matrix bp = b * psi_c.rightCols(m);
  const double smin = smallest_singular_value(bp);
  const double scale = norm(b) * norm(psi_c.rightCols(m));
  if (!(smin > 0.0) || scale / smin > kConditionLimit) {
    throw Error(ErrorKind::EigenvalueHit,
                "beta Phi(c) is singular (condition " +
                    std::to_string(smin > 0.0 ? scale / smin : INFINITY) + ")");
  }
  return -bp.partialPivLu().solve(bt);
}

Matrix regular_m(cplx z, double c, double x0, const BoundaryData& alpha,
                 const BoundaryCondition& beta, const PotentialSpec& spec,
                 const PropagationOptions& opt) {
  if (c == x0) {
    throw Error(ErrorKind::DegenerateArguments, "regular_m needs c != x0");
  }
  double ls = 0.0;
  const Matrix psi = propagated_psi(z, c, x0, alpha, spec, opt, &ls);
  return regular_m_from_psi(psi, beta);
}

DiskFunctional e_c(const Matrix& m_value, cplx z, double c, double x0,
                   const BoundaryData& alpha, const PotentialSpec& spec,
                   const PropagationOptions& opt) {
  const SignFactor s = sigma(x0, c, z);
  const int m = alpha.m();
  double ls = 0.0;
  const Matrix psi = propagated_psi(z, c, x0, alpha, spec, opt, &ls);
  Matrix top(2 * m, m);
  top << Matrix::Identity(m, m), m_value;
  const Matrix u = psi * top;
  const Matrix ij = kI * symplectic_j(m);
  DiskFunctional out;
  out.value = static_cast<double>(s.value) * (u.adjoint() * ij * u);
  out.log_scale = ls;
  out.hermiticity_defect = hermiticity_defect(out.value);
  return out;
}

const char* to_string(DiskClass c) {
  switch (c) {
    case DiskClass::Interior: return "interior";
    case DiskClass::Boundary: return "boundary";
    case DiskClass::Exterior: return "exterior";
  }
  return "unknown";
}

WeylPoint disk_membership(const Matrix& m_value, cplx z, double c, double x0,
                          const BoundaryData& alpha, const PotentialSpec& spec,
                          double rel_tol, const PropagationOptions& opt) {
  WeylPoint p;
  p.m_value = m_value;
  p.z = z;
  p.c = c;
  p.x0 = x0;
  p.e_c_value = e_c(m_value, z, c, x0, alpha, spec, opt);
  const Matrix& e = p.e_c_value.value;
  const double unit = std::exp(-2.0 * p.e_c_value.log_scale);
  p.tolerance = rel_tol * (unit + norm(e));
  p.lambda_max = max_eigenvalue_hermitian(e);
  if (p.lambda_max < -p.tolerance) {
    p.classification = DiskClass::Interior;
  } else if (p.lambda_max <= p.tolerance) {
    p.classification = DiskClass::Boundary;
  } else {
    p.classification = DiskClass::Exterior;
  }
  return p;
}

HalfLineM halfline_m(cplx z, double x0, const BoundaryData& alpha,
                     const PotentialSpec& spec, HalfLineSide side,
                     const HalfLineOptions& opt) {
  if (z.imag() == 0.0) {
    throw Error(ErrorKind::DegenerateArguments, "halfline_m needs Im z != 0");
  }
  const int m = alpha.m();
  if (spec.m() != m) {
    throw Error(ErrorKind::InvalidArgument,
                "boundary data and potential have different block sizes");
  }
  const double dir = side == HalfLineSide::Plus ? 1.0 : -1.0;

  HalfLineM out;
  out.side = side;
  out.z = z;
  out.x0 = x0;
  out.alpha = alpha;

  if (opt.exact_tail && !spec.periodic() && spec.outside() == OutsidePolicy::Zero) {
    const auto [lo, hi] = spec.support();
    // lo == hi: B vanishes identically.
    const double edge = lo == hi ? x0 : dir > 0 ? std::max(hi, x0) : std::min(lo, x0);
    if (std::isfinite(edge)) {
      // (I, +-iI)^T exp(+-izx) decays toward the chosen end.
      const double kappa = dir * (z.imag() > 0 ? 1.0 : -1.0);
      Propagator prop(spec, z, opt.propagation);
      ScaledMatrix y;
      y.value.resize(2 * m, m);
      y.value << Matrix::Identity(m, m), kI * kappa * Matrix::Identity(m, m);
      prop.advance(y, edge, x0);
      const Matrix top = alpha.alpha() * y.value;
      const Matrix bottom = -alpha.alpha() * symplectic_j(m) * y.value;
      const double smin = smallest_singular_value(top);
      if (!(smin > 0.0) || norm(top) / smin > kConditionLimit) {
        throw Error(ErrorKind::EigenvalueHit, "alpha U_+-(x0) is singular");
      }
      out.m_value = top.transpose().partialPivLu().solve(bottom.transpose()).transpose();
      if (!out.m_value.allFinite()) {
        throw Error(ErrorKind::NonFiniteValue, "non-finite half-line M");
      }
      out.c_final = edge;
      return out;
    }
  }

  double length = opt.initial_length;
  if (!(length > 0.0)) length = spec.periodic() ? *spec.period() : 1.0;

  const BoundaryCondition beta = dirichlet_condition(m);
  Propagator prop(spec, z, opt.propagation);
  ScaledMatrix y;
  y.value.resize(2 * m, 2 * m);
  y.value << alpha.adjoint_column(), alpha.j_adjoint_column();

  double here = x0;
  Matrix prev;
  int streak = 0;
  double last_diff = INFINITY;
  while (length <= opt.max_length) {
    const double c = x0 + dir * length;
    prop.advance(y, here, c);
    here = c;
    y.normalize();
    const Matrix mc = regular_m_from_psi(y.value, beta);
    if (!mc.allFinite()) {
      throw Error(ErrorKind::NoConvergence, "non-finite truncated M", c);
    }
    if (prev.size() != 0) {
      last_diff = norm(mc - prev);
      const double bound = opt.tol * std::max(1.0, norm(mc));
      streak = last_diff <= bound ? streak + 1 : 0;
    }
    prev = mc;
    out.c_final = c;
    ++out.doublings;
    if (streak >= opt.consecutive) {
      out.m_value = mc;
      out.tail_bound = last_diff;
      return out;
    }
    length *= 2.0;
  }
  throw Error(ErrorKind::NoConvergence,
              "half-line M did not converge within |c - x0| <= " +
                  std::to_string(opt.max_length) + " (last change " +
                  std::to_string(last_diff) + ")",
              out.c_final);
}

Matrix lft_boundary_change(const Matrix& m_gamma, const BoundaryData& alpha,
                           const BoundaryData& gamma) {
  const Matrix& a1 = alpha.alpha1;
  const Matrix& a2 = alpha.alpha2;
  const Matrix& g1 = gamma.alpha1;
  const Matrix& g2 = gamma.alpha2;
  const Matrix ajg = a2 * g1.adjoint() - a1 * g2.adjoint();
  const Matrix ag = a1 * g1.adjoint() + a2 * g2.adjoint();
  const Matrix num = -ajg + ag * m_gamma;
  const Matrix den = ag + ajg * m_gamma;
  const double smin = smallest_singular_value(den);
  const double scale = 1.0 + norm(m_gamma);
  if (!(smin > 0.0) || scale / smin > kConditionLimit) {
    throw Error(ErrorKind::SingularDenominator,
                "alpha gamma* + alpha J gamma* M_gamma is singular");
  }
  return den.transpose().partialPivLu().solve(num.transpose()).transpose();
}

}  // namespace weyldirac
