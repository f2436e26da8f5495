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

#include "weyldirac/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "weyldirac/csv.hpp"
#include "weyldirac/propagator.hpp"
#include "weyldirac/riccati.hpp"

namespace weyldirac {

namespace {

Matrix blk(const Matrix& b, int i, int j) {
  const Eigen::Index m = b.rows() / 2;
  return b.block(i * m, j * m, m, m);
}

Matrix combination(const Matrix& b) {
  const Eigen::Index m = b.rows() / 2;
  const Matrix d = blk(b, 0, 0) - blk(b, 1, 1);
  const Matrix o = blk(b, 0, 1) + blk(b, 1, 0);
  Matrix c(2 * m, 2 * m);
  c << d, o, o, -d;
  return c;
}

}  // namespace

TraceCheck trace_check(double x, const PotentialSpec& spec, double ray,
                       const std::vector<double>& zmags, const TraceOptions& opt) {
  if (!(ray > 0.0 && ray < std::numbers::pi)) {
    throw Error(ErrorKind::InvalidArgument, "ray must point into the upper half-plane");
  }
  TraceCheck out;
  out.x = x;
  out.ray = ray;
  out.limit = 0.5 * (combination(spec.eval_one_sided(x, Side::Right)) +
                     combination(spec.eval_one_sided(x, Side::Left)));
  const cplx dir = std::polar(1.0, ray);
  const BoundaryData a0 = alpha0(spec.m());
  auto logm = [&](cplx z) {
    return principal_log(fullline_m(z, x, a0, spec, opt.fullline).full());
  };
  for (double r : zmags) {
    if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "|z| must be positive");
    const cplx z = r * dir;
    const double h = r * opt.relative_step;
    auto quotient = [&](double step) {
      const Matrix d = (logm(z + step * dir) - logm(z - step * dir)) / (2.0 * step * dir);
      return Matrix(2.0 * z * z * d);
    };
    const Matrix l1 = quotient(h);
    const Matrix l2 = quotient(0.5 * h);
    TraceSample s;
    s.z = z;
    // Richardson on the O(h^2) error.
    s.lhs = (4.0 * l2 - l1) / 3.0;
    s.step_sensitivity = norm(l1 - l2);
    if (!s.lhs.allFinite() ||
        s.step_sensitivity > opt.noise_rel * norm(s.lhs) + opt.noise_abs) {
      throw Error(ErrorKind::DifferentiationFailure,
                  "difference quotient unstable at |z| = " + std::to_string(r));
    }
    s.residual = norm(s.lhs - out.limit);
    out.samples.push_back(std::move(s));
  }
  return out;
}

Monodromy monodromy(cplx z, const PotentialSpec& spec, double x0,
                    const PropagationOptions& opt) {
  if (!spec.periodic()) throw Error(ErrorKind::NotPeriodic, "monodromy needs a period");
  const double w = *spec.period();
  const int n = 2 * spec.m();
  Propagator prop(spec, z, opt);
  ScaledMatrix y;
  y.value = Matrix::Identity(n, n);
  prop.advance(y, x0, x0 + w);
  Monodromy out;
  out.z = z;
  out.x0 = x0;
  out.period = w;
  out.value = y.unscaled();
  if (!out.value.allFinite()) {
    throw Error(ErrorKind::NonFiniteValue, "monodromy overflowed");
  }
  Eigen::ComplexEigenSolver<Matrix> es(out.value, false);
  for (Eigen::Index i = 0; i < n; ++i) out.multipliers.push_back(es.eigenvalues()(i));
  std::sort(out.multipliers.begin(), out.multipliers.end(),
            [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
  return out;
}

namespace {

void collect_runs(const std::vector<double>& l, const std::vector<bool>& flag,
                  bool want, std::vector<Interval>& out) {
  const std::size_t n = l.size();
  std::size_t i = 0;
  while (i < n) {
    if (flag[i] != want) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && flag[j + 1] == want) ++j;
    out.push_back({l[i], l[j], i == 0, j == n - 1});
    i = j + 1;
  }
}

}  // namespace

void assign_intervals(BandStructure& b) {
  b.bands.clear();
  b.gaps.clear();
  collect_runs(b.lambdas, b.in_band, true, b.bands);
  collect_runs(b.lambdas, b.in_band, false, b.gaps);
}

BandStructure band_spectrum(const PotentialSpec& spec,
                            const std::vector<double>& lambdas, double tol, double x0) {
  if (!spec.periodic()) throw Error(ErrorKind::NotPeriodic, "band_spectrum needs a period");
  if (lambdas.empty()) throw Error(ErrorKind::EmptyWindow, "empty lambda grid");
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > lambdas[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "lambda grid must be increasing");
    }
  }
  BandStructure out;
  out.lambdas = lambdas;
  out.tolerance = tol * *spec.period();
  PropagationOptions p;
  p.monitor_symplectic = false;
  for (double l : lambdas) {
    const Monodromy mono = monodromy(cplx(l, 0.0), spec, x0, p);
    bool in = true;
    for (cplx mu : mono.multipliers) {
      if (std::abs(std::abs(mu) - 1.0) > out.tolerance) in = false;
    }
    out.in_band.push_back(in);
    out.multipliers.push_back(mono.multipliers);
  }
  assign_intervals(out);
  return out;
}

ReflectionlessResult reflectionless_check(const PotentialSpec& spec,
                                          const std::vector<double>& xs,
                                          const std::vector<double>& lambdas,
                                          double epsilon, double tol,
                                          const UpsilonOptions& opt) {
  ReflectionlessResult out;
  const int n = 2 * spec.m();
  const Matrix half = 0.5 * Matrix::Identity(n, n);
  const BoundaryData a0 = alpha0(spec.m());
  for (double x : xs) {
    for (double l : lambdas) {
      UpsilonSample s = upsilon(l, x, a0, spec, epsilon, opt);
      const double dev = norm(s.value - half);
      if (dev > out.worst_deviation || out.samples.empty()) {
        out.worst_deviation = dev;
        out.worst_x = x;
        out.worst_lambda = l;
      }
      out.samples.push_back(std::move(s));
    }
  }
  out.reflectionless = out.worst_deviation <= tol;
  return out;
}

BorgReport borg_diagnostic(const PotentialSpec& spec, const BorgOptions& opt) {
  if (!spec.periodic()) throw Error(ErrorKind::NotPeriodic, "borg_diagnostic needs a period");
  BorgReport out;
  out.lambda_max = opt.lambda_max > 0.0 ? opt.lambda_max : 10.0 * spec.sup_norm() + 10.0;
  std::vector<double> grid;
  const long steps = std::lround(2.0 * out.lambda_max / opt.step);
  for (long i = 0; i <= steps; ++i) grid.push_back(-out.lambda_max + i * opt.step);
  out.bands = band_spectrum(spec, grid, opt.band_tol);
  out.full_spectrum = std::all_of(out.bands.in_band.begin(), out.bands.in_band.end(),
                                  [](bool b) { return b; });

  const double w = *spec.period();
  const double x0 = spec.period_origin();
  std::vector<double> xs;
  for (int i = 0; i < opt.samples_per_period; ++i) {
    xs.push_back(x0 + w * (i + 0.5) / opt.samples_per_period);
  }
  for (double b : spec.breakpoints(x0, x0 + w)) xs.push_back(b);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (double x : xs) {
    for (Side side : {Side::Left, Side::Right}) {
      const Matrix b = spec.eval_one_sided(x, side);
      const Matrix d = blk(b, 0, 0) - blk(b, 1, 1);
      const Matrix o = blk(b, 0, 1) + blk(b, 1, 0);
      out.max_combination = std::max({out.max_combination, norm(d), norm(o)});
      if (side == Side::Right) {
        out.x.push_back(x);
        out.diagonal_difference.push_back(d);
        out.offdiagonal_sum.push_back(o);
      }
    }
  }
  out.consistent = !out.full_spectrum || out.max_combination <= opt.combination_tol;
  return out;
}

namespace {

void check_agreement(const PotentialSpec& s1, const PotentialSpec& s2, double lo,
                     double hi) {
  if (!(hi > lo)) return;
  std::vector<double> xs;
  auto add = [&](const std::vector<double>& bps) {
    xs.insert(xs.end(), bps.begin(), bps.end());
  };
  add(s1.breakpoints(lo, hi));
  add(s2.breakpoints(lo, hi));
  xs.push_back(lo);
  xs.push_back(hi);
  std::sort(xs.begin(), xs.end());
  std::vector<double> probes;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (xs[i + 1] <= xs[i]) continue;
    for (int k = 1; k < 8; ++k) probes.push_back(xs[i] + (xs[i + 1] - xs[i]) * k / 8.0);
  }
  for (double x : probes) {
    const Matrix d = s1.eval(x) - s2.eval(x);
    if (norm(d) > 1e-12 * std::max(1.0, norm(s1.eval(x)))) {
      throw Error(ErrorKind::InvalidArgument,
                  "potentials differ inside the agreement window at x = " +
                      std::to_string(x));
    }
  }
}

}  // namespace

DecayFit uniqueness_decay(const PotentialSpec& spec1, const PotentialSpec& spec2,
                          double x0, double a, double ray,
                          const std::vector<double>& zmags, const DecayOptions& opt) {
  if (spec1.m() != spec2.m()) {
    throw Error(ErrorKind::InvalidArgument, "potentials have different block sizes");
  }
  if (!(a >= 0.0)) throw Error(ErrorKind::InvalidArgument, "window length must be >= 0");
  if (!(ray > 0.0 && ray < std::numbers::pi)) {
    throw Error(ErrorKind::InvalidArgument, "ray must point into the upper half-plane");
  }
  check_agreement(spec1, spec2, x0, x0 + a);
  const int m = spec1.m();
  const BoundaryData a0 = alpha0(m);

  DecayFit out;
  out.ray = ray;
  out.a = a;
  for (double r : zmags) {
    const cplx z = std::polar(r, ray);
    const Matrix v1 = halfline_m(z, x0 + a, a0, spec1, HalfLineSide::Plus, opt.halfline).m_value;
    const Matrix v2 = halfline_m(z, x0 + a, a0, spec2, HalfLineSide::Plus, opt.halfline).m_value;
    const Matrix d0 = v1 - v2;
    const double dn = norm(d0);
    if (!(dn > opt.noise_factor * opt.halfline.tol * std::max({1.0, norm(v1), norm(v2)}))) {
      ++out.discarded;
      continue;
    }
    // Y = [V2; D / e^s], D = V1 - V2.
    double s = std::log(dn);
    Matrix y(2 * m, m);
    y << v2, d0 / dn;
    if (a > 0.0) {
      for (const auto& [lo, hi] : spec2.segments(x0 + a, x0)) {
        const LocalForm f = spec2.local_form(lo, hi);
        auto rhs = [&](double x, const Matrix& st) {
          const Matrix b = f.at(x);
          const Matrix b22 = blk(b, 1, 1);
          const Matrix v = st.topRows(m);
          const Matrix dh = st.bottomRows(m);
          const double e = std::exp(s);
          Matrix out_(2 * m, m);
          out_.topRows(m) = riccati_rhs(z, v, b);
          out_.bottomRows(m) = -z * (v * dh + dh * v + e * dh * dh) -
                               (v * b22 * dh + dh * b22 * v + e * dh * b22 * dh) -
                               blk(b, 0, 1) * dh - dh * blk(b, 1, 0);
          return out_;
        };
        auto post = [&](double, Matrix& st) {
          const double n = norm(st.bottomRows(m));
          if (!(n > 0.0) || !std::isfinite(n)) {
            throw Error(ErrorKind::IntegrationFailure, "difference equation broke down");
          }
          st.bottomRows(m) /= n;
          s += std::log(n);
          return true;
        };
        OdeStats stats;
        dopri5(rhs, lo, hi, y, opt.ode, stats, post);
      }
    }
    out.zmags.push_back(r);
    out.im_z.push_back(z.imag());
    out.log_difference.push_back(s + std::log(norm(y.bottomRows(m))));
  }
  if (out.zmags.empty()) {
    throw Error(ErrorKind::DifferenceBelowNoise,
                "M-functions agree to solver tolerance at every sample");
  }
  const std::size_t n = out.zmags.size();
  if (n < 2) {
    throw Error(ErrorKind::IllConditionedFit, "need two usable samples for a slope");
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += out.im_z[i];
    my += out.log_difference[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = out.im_z[i] - mx, dy = out.log_difference[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::IllConditionedFit, "Im z does not vary");
  const double beta = sxy / sxx;
  out.slope = -beta;
  out.intercept = my - beta * mx;
  out.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  out.window_estimate = 0.5 * out.slope;
  return out;
}

void write_band_csv(std::ostream& os, const BandStructure& b) {
  std::size_t nm = b.multipliers.empty() ? 0 : b.multipliers.front().size();
  os << "lambda,in_band";
  for (std::size_t k = 0; k < nm; ++k) os << ",mu" << k << "_re,mu" << k << "_im";
  os << '\n';
  for (std::size_t i = 0; i < b.lambdas.size(); ++i) {
    os << csv::num(b.lambdas[i]) << ',' << (b.in_band[i] ? 1 : 0);
    for (cplx mu : b.multipliers[i]) os << ',' << csv::num(mu.real()) << ',' << csv::num(mu.imag());
    os << '\n';
  }
}

void write_trace_csv(std::ostream& os, const TraceCheck& t) {
  if (t.samples.empty()) return;
  const Eigen::Index n = t.limit.rows();
  os << "z_re,z_im," << csv::matrix_header("lhs", n, n) << ",residual,step_sensitivity\n";
  for (const auto& s : t.samples) {
    os << csv::num(s.z.real()) << ',' << csv::num(s.z.imag()) << csv::matrix_fields(s.lhs)
       << ',' << csv::num(s.residual) << ',' << csv::num(s.step_sensitivity) << '\n';
  }
}

void write_decay_csv(std::ostream& os, const DecayFit& d) {
  os << "abs_z,im_z,log_difference\n";
  for (std::size_t i = 0; i < d.zmags.size(); ++i) {
    os << csv::num(d.zmags[i]) << ',' << csv::num(d.im_z[i]) << ','
       << csv::num(d.log_difference[i]) << '\n';
  }
}

}  // namespace weyldirac
