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

// Acceptance suite: one PASS/FAIL line per criterion. Reference values come
// from closed forms written out here, not from the library.
//
//   weyldirac_acceptance               run all criteria
//   weyldirac_acceptance --criterion N run one
//   weyldirac_acceptance --list

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "weyldirac/asymptotics.hpp"
#include "weyldirac/full_line.hpp"
#include "weyldirac/gauge.hpp"
#include "weyldirac/riccati.hpp"
#include "weyldirac/spectral.hpp"
#include "weyldirac/weyl_disk.hpp"

using namespace weyldirac;
using std::numbers::pi;

namespace {

constexpr cplx kI{0.0, 1.0};

// Collects sub-check results for one criterion.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (!failures_.empty()) failures_ += "; ";
      failures_ += what;
    }
  }
  void note(const std::string& s) {
    if (!notes_.empty()) notes_ += ", ";
    notes_ += s;
  }
  bool pass() const { return pass_; }
  std::string detail() const { return pass_ ? notes_ : failures_ + " | " + notes_; }

 private:
  bool pass_ = true;
  std::string failures_;
  std::string notes_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

Matrix scalar(cplx v) { return Matrix::Constant(1, 1, v); }

// ---- 1 ----------------------------------------------------------------------
void free_case(Checks& c) {
  double worst_half = 0.0, worst_full = 0.0;
  for (int m : {1, 2}) {
    const PotentialSpec spec = PotentialSpec::zero(m);
    for (cplx z : {kI, cplx(1, 1), std::polar(1e3, pi / 3)}) {
      const Matrix h = halfline_m(z, 0.0, alpha0(m), spec).m_value;
      worst_half = std::max(worst_half, norm(h - kI * Matrix::Identity(m, m)));
      const Matrix f = fullline_m(z, 0.0, alpha0(m), spec).full();
      worst_full = std::max(worst_full, norm(f - 0.5 * kI * Matrix::Identity(2 * m, 2 * m)));
    }
  }
  c.expect(worst_half < 1e-8, "||M_+ - iI|| = " + fmt(worst_half));
  c.expect(worst_full < 1e-8, "||M - (i/2)I|| = " + fmt(worst_full));
  c.note("max half-line error " + fmt(worst_half) + ", full-line " + fmt(worst_full));
}

// ---- 2 ----------------------------------------------------------------------
void constant_coefficient(Checks& c) {
  const PotentialSpec spec = PotentialSpec::constant(oracle::off_diagonal_b(1.0));
  const cplx z{0.0, 2.0};
  const cplx expected = kI * (1.0 + std::sqrt(5.0)) / 2.0;
  const cplx got = halfline_m(z, 0.0, alpha0(1), spec).m_value(0, 0);
  const double err = std::abs(got - expected);
  c.expect(err < 1e-6, "|M_+ - i(1+sqrt5)/2| = " + fmt(err));
  c.note("error " + fmt(err));
}

// ---- 3 ----------------------------------------------------------------------
// B = 0, alpha = (1, 0): U(c) = (cos zc + M sin zc, M cos zc - sin zc) and
// E_c = sigma U* (iJ) U with sigma = -1 for c > x0, Im z > 0.
cplx free_e_c(cplx m, cplx z, double c) {
  const cplx u1 = std::cos(z * c) + m * std::sin(z * c);
  const cplx u2 = m * std::cos(z * c) - std::sin(z * c);
  return -(std::conj(u1) * (-kI * u2) + std::conj(u2) * (kI * u1));
}

// Self-adjoint boundary condition (cos t, sin t) at c.
cplx free_circle_point(cplx z, double c, double t) { return -1.0 / std::tan(z * c + t); }

void disk_suite(Checks& c) {
  const PotentialSpec spec = PotentialSpec::zero(1);
  const cplx z = kI;
  double worst = 0.0;
  for (double cc : {1.0, 2.0}) {
    std::vector<cplx> ms = {kI, -kI, cplx(0.3, 0.5), cplx(-1.0, 2.0)};
    for (double t : {0.0, 0.7, pi / 2, 2.5}) ms.push_back(free_circle_point(z, cc, t));
    for (cplx m : ms) {
      const cplx e = e_c(scalar(m), z, cc, 0.0, alpha0(1), spec).value(0, 0);
      worst = std::max(worst, std::abs(e - free_e_c(m, z, cc)));
    }
  }
  c.expect(worst < 1e-9, "E_c closed-form error " + fmt(worst));

  int boundary = 0, nested = 0, monotone = 0, total = 0;
  for (double t : {0.0, 0.4, 0.9, pi / 2, 2.0, 2.8}) {
    ++total;
    const cplx m1 = free_circle_point(z, 1.0, t);
    const cplx m2 = free_circle_point(z, 2.0, t);
    if (disk_membership(scalar(m1), z, 1.0, 0.0, alpha0(1), spec).classification ==
            DiskClass::Boundary &&
        disk_membership(scalar(m2), z, 2.0, 0.0, alpha0(1), spec).classification ==
            DiskClass::Boundary) {
      ++boundary;
    }
    if (disk_membership(scalar(m2), z, 1.0, 0.0, alpha0(1), spec).classification ==
        DiskClass::Interior) {
      ++nested;
    }
    for (cplx m : {m1, m2, kI, cplx(0.2, -0.1)}) {
      const Matrix d = e_c(scalar(m), z, 2.0, 0.0, alpha0(1), spec).value -
                       e_c(scalar(m), z, 1.0, 0.0, alpha0(1), spec).value;
      if (d(0, 0).real() >= -1e-10) ++monotone;
    }
  }
  // Regular M for beta = (cos t, sin t) is the circle point of t.
  double reg_err = 0.0;
  for (double t : {0.0, 0.4, pi / 2, 2.0}) {
    const auto beta = make_boundary_condition(scalar(std::cos(t)), scalar(std::sin(t)));
    const Matrix reg = regular_m(z, 1.0, 0.0, alpha0(1), beta, spec);
    reg_err = std::max(reg_err, std::abs(reg(0, 0) - free_circle_point(z, 1.0, t)));
  }
  c.expect(reg_err < 1e-10, "regular M error " + fmt(reg_err));
  c.expect(boundary == total, "circle points on boundary " + std::to_string(boundary) + "/" +
                                   std::to_string(total));
  c.expect(nested == total, "c=2 circle points interior at c=1 " + std::to_string(nested) + "/" +
                                 std::to_string(total));
  c.expect(monotone == 4 * total, "E_2 - E_1 >= 0 in " + std::to_string(monotone) + "/" +
                                      std::to_string(4 * total));
  c.note("E_c error " + fmt(worst) + ", regular M error " + fmt(reg_err) + ", " +
         std::to_string(total) + " circle points");
}

// ---- 4 ----------------------------------------------------------------------
void riccati_consistency(Checks& c) {
  const PotentialSpec spec = PotentialSpec::zero(1);
  const cplx z{1.0, 0.1};
  const double cc = 1.2;
  const auto traj = integrate_riccati(z, scalar(std::tan(z * cc)), 0.0, 0.9, spec);
  double worst = 0.0;
  for (const auto& s : traj) worst = std::max(worst, std::abs(s.v(0, 0) - std::tan(z * (cc - s.x))));
  c.expect(traj.back().x == 0.9, "trajectory did not reach 0.9");
  c.expect(worst < 1e-7, "tan trajectory error " + fmt(worst));

  std::mt19937_64 rng(4);
  double round = 0.0;
  for (int n : {1, 2, 3}) {
    for (int sgn : {1, -1}) {
      const Matrix m = oracle::random_hermitian(n, rng) + kI * double(sgn) * Matrix::Identity(n, n);
      round = std::max(round, norm(cayley_inverse(cayley(m, SignFactor{sgn}), SignFactor{sgn}) - m));
    }
  }
  c.expect(round < 1e-12, "Cayley round trip " + fmt(round));
  c.note("tan error " + fmt(worst) + " over " + std::to_string(traj.size()) +
         " points, Cayley round trip " + fmt(round));
}

// ---- 5 ----------------------------------------------------------------------
double bump(double x) { return (x <= 0 || x >= 1) ? 0.0 : std::pow(std::sin(pi * x), 4); }

std::vector<Piece> bump_pieces(double lo, double hi, int n, double a, double q) {
  std::vector<double> xs;
  std::vector<Matrix> vs;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    const double f = bump((x - lo) / (hi - lo));
    Matrix b(2, 2);
    b << a * f, q * f, q * f, -a * f;
    xs.push_back(x);
    vs.push_back(b);
  }
  return {Piece::grid(lo, hi, xs, vs)};
}

// Largest relative gap between fitted and recursive m_1, m_2.
double fit_vs_recursion(const PotentialSpec& spec, const DerivativeSamples& d, double x0) {
  const auto rec = expansion_coefficients(d, x0, 3, ExpansionSign::Plus);
  std::vector<FitSample> samples;
  for (double y : {40.0, 60.0, 90.0, 135.0, 200.0, 300.0, 450.0, 675.0, 1000.0}) {
    const cplx z{0.0, y};
    samples.push_back({z, halfline_m(z, x0, alpha0(1), spec).m_value});
  }
  const auto fit = fit_expansion(samples, 6);
  double worst = 0.0;
  for (int k : {1, 2}) {
    const double r = norm(rec.coeffs[k]);
    worst = std::max(worst, norm(fit.coefficients.coeffs[k] - rec.coeffs[k]) / r);
  }
  return worst;
}

void asymptotic_fit(Checks& c) {
  const Matrix bq = oracle::off_diagonal_b(1.0);
  const PotentialSpec cq = PotentialSpec::constant(bq);
  std::vector<double> cx;
  std::vector<Matrix> cb;
  for (int i = 0; i <= 20; ++i) {
    cx.push_back(-1.0 + 0.1 * i);
    cb.push_back(bq);
  }
  const double e_const = fit_vs_recursion(cq, sample_derivatives(cx, cb, 2), 0.0);

  const PotentialSpec bs(1, bump_pieces(0.0, 1.0, 4000, 0.6, 0.9));
  std::vector<double> gx;
  std::vector<Matrix> gb;
  for (int i = 0; i <= 400; ++i) {
    gx.push_back(i / 400.0);
    gb.push_back(bs.eval(gx.back()));
  }
  const double e_bump = fit_vs_recursion(bs, sample_derivatives(gx, gb, 2), 0.4);
  c.expect(e_const < 0.01, "constant q relative gap " + fmt(e_const));
  c.expect(e_bump < 0.02, "bump relative gap " + fmt(e_bump));
  c.note("relative gap constant q " + fmt(e_const) + ", bump " + fmt(e_bump));
}

// ---- 6 ----------------------------------------------------------------------
PotentialSpec bump_then(double q) {
  auto pieces = bump_pieces(0.0, 1.0, 2000, 0.5, 0.7);
  if (q != 0.0) pieces.push_back(Piece::constant(1.0, 2.0, oracle::off_diagonal_b(q)));
  return PotentialSpec(1, pieces);
}

void exponential_closeness(Checks& c) {
  const auto fit = uniqueness_decay(bump_then(1.0), bump_then(0.0), 0.0, 1.0, pi / 2,
                                    {20.0, 40.0, 60.0, 80.0, 100.0});
  c.expect(fit.slope >= 1.9 && fit.slope <= 2.1, "slope " + fmt(fit.slope));
  c.note("slope " + fmt(fit.slope) + ", r2 " + fmt(fit.r2));
}

// ---- 7 ----------------------------------------------------------------------
void trace_formula(Checks& c) {
  const PotentialSpec spec = PotentialSpec::constant(oracle::off_diagonal_b(1.0));
  const auto t = trace_check(0.0, spec, pi / 2, {100.0, 300.0, 1000.0});
  Matrix limit(2, 2);
  limit << 0, 2, 2, 0;
  // Recompute the residual against the hand-written limit.
  std::vector<double> r;
  for (const auto& s : t.samples) r.push_back(norm(s.lhs - limit));
  c.expect(r[0] < 1e-2, "residual at 100 = " + fmt(r[0]));
  c.expect(r[1] < r[0] && r[2] < r[1], "residuals not decreasing");
  c.note("residuals " + fmt(r[0]) + ", " + fmt(r[1]) + ", " + fmt(r[2]));
}

// ---- 8 ----------------------------------------------------------------------
void upsilon_reflectionless(Checks& c) {
  double worst_free = 0.0;
  for (int m : {1, 2}) {
    for (double lambda : {-2.0, 0.5, 2.0}) {
      const auto u = upsilon(lambda, 0.0, alpha0(m), PotentialSpec::zero(m), 1e-4);
      worst_free = std::max(worst_free, norm(u.value - 0.5 * Matrix::Identity(2 * m, 2 * m)));
    }
  }
  c.expect(worst_free < 1e-3, "free ||Y - I/2|| = " + fmt(worst_free));

  const PotentialSpec cq = PotentialSpec::constant(oracle::off_diagonal_b(1.0));
  const double band = upsilon(2.0, 0.0, alpha0(1), cq, 1e-4).value(0, 0).real();
  const double gap = upsilon(0.5, 0.0, alpha0(1), cq, 1e-4).value(0, 0).real();
  c.expect(std::abs(band - 0.5) < 1e-3, "Y11(2) = " + fmt(band) + ", want 0.5");
  c.expect(std::abs(gap) < 1e-3, "Y11(0.5) = " + fmt(gap) + ", want 0");

  const PotentialSpec bs(1, bump_pieces(0.0, 1.0, 400, 0.0, 2.0));
  const auto r = reflectionless_check(bs, {0.5}, {0.5, 1.0, 1.5}, 1e-4);
  c.expect(!r.reflectionless, "bump passed reflectionless_check");
  c.note("free error " + fmt(worst_free) + ", Y11(2) " + fmt(band) + ", Y11(0.5) " + fmt(gap) +
         ", bump deviation " + fmt(r.worst_deviation));
}

// ---- 9 ----------------------------------------------------------------------
void floquet_borg(Checks& c) {
  const PotentialSpec cq = PotentialSpec::periodic_constant(oracle::off_diagonal_b(1.0), 1.0);
  std::vector<double> grid;
  for (int i = 0; i <= 600; ++i) grid.push_back(-3.0 + 0.01 * i);
  const auto bands = band_spectrum(cq, grid);
  bool edges = bands.gaps.size() == 1;
  if (edges) {
    edges = std::abs(bands.gaps[0].lo + 1.0) <= 0.01 + 1e-12 &&
            std::abs(bands.gaps[0].hi - 1.0) <= 0.01 + 1e-12;
  }
  c.expect(edges, "constant q gap not at (-1, 1)");

  const PotentialSpec free = PotentialSpec::periodic_constant(Matrix::Zero(2, 2), 1.0);
  const auto fb = band_spectrum(free, grid);
  c.expect(fb.gaps.empty() && std::all_of(fb.in_band.begin(), fb.in_band.end(), [](bool b) { return b; }),
           "free spectrum has gaps");

  BorgOptions opt;
  opt.step = 0.05;
  Matrix d(2, 2);
  d << 0.8, 0, 0, 0.8;
  const auto b1 = borg_diagnostic(free, opt);
  const auto b2 = borg_diagnostic(cq, opt);
  const auto b3 = borg_diagnostic(PotentialSpec::periodic_constant(d, 1.0), opt);
  c.expect(b1.consistent && b1.full_spectrum, "free Borg verdict");
  c.expect(b2.consistent && !b2.full_spectrum, "constant q Borg verdict");
  c.expect(b3.consistent && b3.full_spectrum, "diag(b, b) Borg verdict");
  if (!bands.gaps.empty()) {
    c.note("gap [" + fmt(bands.gaps[0].lo) + ", " + fmt(bands.gaps[0].hi) + "]");
  }
  c.note("3 Borg examples");
}

// ---- 10 ---------------------------------------------------------------------
PotentialSpec random_pieces(int m, int count, double length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Piece> pieces;
  for (int i = 0; i < count; ++i) {
    pieces.push_back(Piece::constant(length * i / count, length * (i + 1) / count,
                                     oracle::random_hermitian(2 * m, rng)));
  }
  return PotentialSpec(m, pieces);
}

double max_gap(const PotentialSpec& a, const PotentialSpec& b, double lo, double hi,
               double sign = 1.0) {
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double x = lo + (hi - lo) * (i + 0.5) / 500.0;
    worst = std::max(worst, norm(a.eval(x) - sign * b.eval(x)));
  }
  return worst;
}

void gauge_suite(Checks& c) {
  const auto g = gauge_factors(random_pieces(3, 10, 10.0, 2), 0.0, 10.0);
  c.expect(g.max_drift < 1e-8, "unitarity drift " + fmt(g.max_drift));

  const PotentialSpec spec = random_pieces(2, 5, 2.0, 4);
  const PotentialSpec nf = normal_form(spec, 0.0, 2.0);
  const double idem = max_gap(normal_form(nf, 0.0, 2.0), nf, 0.0, 2.0);
  c.expect(idem < 1e-9, "idempotence gap " + fmt(idem));
  c.expect(check_normal_form(nf, 0.0, 2.0, 1e-9), "output not in normal form");

  Matrix d(4, 4);
  d.setZero();
  d.topLeftCorner(2, 2) = Matrix::Identity(2, 2) * 0.7;
  d.bottomRightCorner(2, 2) = Matrix::Identity(2, 2) * 0.7;
  d(0, 1) = d(2, 3) = cplx(0.1, 0.2);
  d(1, 0) = d(3, 2) = cplx(0.1, -0.2);
  const double zero_gap = max_gap(normal_form(PotentialSpec::constant(d), 0.0, 1.0),
                                  PotentialSpec::zero(2), 0.0, 1.0);
  c.expect(zero_gap < 1e-12, "diag(b, b) image " + fmt(zero_gap));

  const PotentialSpec flipped = gauge_with_omega(spec, 0.5 * pi * Matrix::Identity(2, 2), 0.0, 2.0);
  const double flip = max_gap(flipped, nf, 0.0, 2.0, -1.0);
  c.expect(flip < 1e-13, "sign flip gap " + fmt(flip));
  c.note("drift " + fmt(g.max_drift) + ", idempotence " + fmt(idem) + ", diag(b,b) " +
         fmt(zero_gap) + ", flip " + fmt(flip));
}

// ---- 11 ---------------------------------------------------------------------
void herglotz_sweep(Checks& c) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> width(0.1, 1.0);
  const std::vector<cplx> zs = {kI, cplx(2.0, 0.5), cplx(-1.0, 0.1), cplx(0.5, 3.0),
                                cplx(-4.0, 1.0)};
  double min_im = INFINITY, lo = INFINITY, hi = -INFINITY;
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + trial % 2;
    std::vector<Piece> pieces;
    double x = -1.0;
    for (int k = 0; k < 4; ++k) {
      const double w = width(rng);
      pieces.push_back(Piece::constant(x, x + w, oracle::random_normal_form(m, rng)));
      x += w;
    }
    const PotentialSpec spec(m, pieces);
    for (cplx z : zs) {
      const double im = min_eigenvalue_hermitian(im_part(halfline_m(z, 0.0, alpha0(m), spec).m_value));
      const auto u = upsilon(z.real(), 0.0, alpha0(m), spec, 1e-4);
      min_im = std::min(min_im, im);
      lo = std::min(lo, u.min_eigenvalue);
      hi = std::max(hi, u.max_eigenvalue);
      if (!(im > 0.0) || u.min_eigenvalue < -1e-6 || u.max_eigenvalue > 1 + 1e-6) ++bad;
    }
  }
  c.expect(bad == 0, std::to_string(bad) + " of 500 cases violate");
  c.note("min lambda(Im M_+) " + fmt(min_im) + ", Y eigenvalues in [" + fmt(lo) + ", " + fmt(hi) +
         "]");
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Checks&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "free-case exactness", free_case},
      {2, "constant-coefficient oracle", constant_coefficient},
      {3, "disk suite", disk_suite},
      {4, "Riccati consistency", riccati_consistency},
      {5, "asymptotic recursion vs fit", asymptotic_fit},
      {6, "exponential closeness", exponential_closeness},
      {7, "trace formula", trace_formula},
      {8, "Upsilon and reflectionless", upsilon_reflectionless},
      {9, "Floquet bands and Borg", floquet_borg},
      {10, "gauge suite", gauge_suite},
      {11, "Herglotz sweep", herglotz_sweep},
  };
  return all;
}

bool run_one(const Criterion& cr) {
  const auto t0 = std::chrono::steady_clock::now();
  Checks c;
  try {
    cr.run(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << (c.pass() ? "PASS " : "FAIL ") << cr.id << " " << cr.name << ": " << c.detail()
            << " (" << fmt(s) << " s)" << std::endl;
  return c.pass();
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--list") == 0) {
      for (const auto& cr : criteria()) std::cout << cr.id << " " << cr.name << "\n";
      return 0;
    }
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
      continue;
    }
    std::cerr << "usage: " << argv[0] << " [--criterion N] [--list]\n";
    return 2;
  }
  bool ok = true;
  bool found = false;
  for (const auto& cr : criteria()) {
    if (only != 0 && cr.id != only) continue;
    found = true;
    ok = run_one(cr) && ok;
  }
  if (!found) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }
  return ok ? 0 : 1;
}
