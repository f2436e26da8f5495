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

#include "weyldirac/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace weyldirac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_block(const Matrix& b, int m, double tol, const std::string& where) {
  if (b.rows() != 2 * m || b.cols() != 2 * m) {
    throw Error(ErrorKind::InvalidPotential,
                where + ": expected a " + std::to_string(2 * m) + "x" +
                    std::to_string(2 * m) + " matrix");
  }
  if (!b.allFinite()) return;  // reported by eval
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if ((b - b.adjoint()).cwiseAbs().maxCoeff() > tol * scale) {
    throw Error(ErrorKind::NonHermitianPiece, where + " is not Hermitian");
  }
}

Matrix interpolate(const Piece& p, double x) {
  const double t = x - p.shift;
  const auto& g = p.grid_x;
  auto it = std::upper_bound(g.begin(), g.end(), t);
  std::size_t i = it == g.begin() ? 0 : static_cast<std::size_t>(it - g.begin()) - 1;
  if (i + 1 >= g.size()) i = g.size() - 2;
  const double w = (t - g[i]) / (g[i + 1] - g[i]);
  if (w == 0.0) return p.grid_values[i];
  if (w == 1.0) return p.grid_values[i + 1];
  return (1.0 - w) * p.grid_values[i] + w * p.grid_values[i + 1];
}

}  // namespace

Piece Piece::constant(double x_lo, double x_hi, Matrix value) {
  Piece p;
  p.x_lo = x_lo;
  p.x_hi = x_hi;
  p.kind = PieceKind::Constant;
  p.value = std::move(value);
  return p;
}

Piece Piece::grid(double x_lo, double x_hi, std::vector<double> x,
                  std::vector<Matrix> values) {
  Piece p;
  p.x_lo = x_lo;
  p.x_hi = x_hi;
  p.kind = PieceKind::Grid;
  p.grid_x = std::move(x);
  p.grid_values = std::move(values);
  return p;
}

PotentialSpec::PotentialSpec(int m, std::vector<Piece> pieces,
                             std::optional<double> period, std::string name,
                             OutsidePolicy outside, double tol)
    : m_(m),
      pieces_(std::move(pieces)),
      period_(period),
      name_(std::move(name)),
      outside_(outside) {
  if (m_ <= 0) throw Error(ErrorKind::InvalidPotential, "m must be positive");
  std::sort(pieces_.begin(), pieces_.end(),
            [](const Piece& a, const Piece& b) { return a.x_lo < b.x_lo; });
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const Piece& p = pieces_[k];
    const std::string where = "piece " + std::to_string(k);
    if (std::isnan(p.x_lo) || std::isnan(p.x_hi) || !(p.x_hi > p.x_lo)) {
      throw Error(ErrorKind::InvalidPotential, where + ": empty interval");
    }
    if (k > 0 && p.x_lo < pieces_[k - 1].x_hi) {
      throw Error(ErrorKind::InvalidPotential, where + ": overlaps predecessor");
    }
    if (p.kind == PieceKind::Constant) {
      check_block(p.value, m_, tol, where);
    } else {
      if (p.grid_x.size() < 2 || p.grid_x.size() != p.grid_values.size()) {
        throw Error(ErrorKind::InvalidPotential,
                    where + ": grid needs >= 2 nodes with matching values");
      }
      for (std::size_t i = 1; i < p.grid_x.size(); ++i) {
        if (!(p.grid_x[i] > p.grid_x[i - 1])) {
          throw Error(ErrorKind::InvalidPotential,
                      where + ": grid not strictly increasing");
        }
      }
      if (!std::isfinite(p.x_lo) || !std::isfinite(p.x_hi) ||
          p.grid_x.front() + p.shift > p.x_lo ||
          p.grid_x.back() + p.shift < p.x_hi) {
        throw Error(ErrorKind::InvalidPotential,
                    where + ": grid does not cover the piece");
      }
      for (std::size_t i = 0; i < p.grid_values.size(); ++i) {
        check_block(p.grid_values[i], m_, tol,
                    where + " node " + std::to_string(i));
      }
    }
  }
  if (period_) {
    const double w = *period_;
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::InvalidPotential, "period must be positive");
    }
    if (pieces_.empty()) {
      throw Error(ErrorKind::InvalidPotential, "periodic spec has no pieces");
    }
    const double slack = 1e-12 * std::max(1.0, w);
    for (std::size_t k = 1; k < pieces_.size(); ++k) {
      if (std::abs(pieces_[k].x_lo - pieces_[k - 1].x_hi) > slack) {
        throw Error(ErrorKind::InvalidPotential,
                    "periodic pieces must tile the period without gaps");
      }
    }
    const double span = pieces_.back().x_hi - pieces_.front().x_lo;
    if (std::abs(span - w) > slack) {
      throw Error(ErrorKind::InvalidPotential,
                  "periodic pieces must tile exactly one period");
    }
  }
}

PotentialSpec PotentialSpec::zero(int m) {
  return PotentialSpec(m, {}, std::nullopt, "zero");
}

PotentialSpec PotentialSpec::constant(const Matrix& b, std::string name) {
  const int m = static_cast<int>(b.rows() / 2);
  return PotentialSpec(m, {Piece::constant(-kInf, kInf, b)}, std::nullopt,
                       std::move(name));
}

PotentialSpec PotentialSpec::constant_on(const Matrix& b, double lo, double hi,
                                         std::string name) {
  const int m = static_cast<int>(b.rows() / 2);
  return PotentialSpec(m, {Piece::constant(lo, hi, b)}, std::nullopt,
                       std::move(name));
}

PotentialSpec PotentialSpec::periodic_constant(const Matrix& b, double period,
                                               std::string name) {
  const int m = static_cast<int>(b.rows() / 2);
  return PotentialSpec(m, {Piece::constant(0.0, period, b)}, period,
                       std::move(name));
}

std::pair<double, double> PotentialSpec::support() const {
  if (period_) return {-kInf, kInf};
  double lo = kInf, hi = -kInf;
  for (const Piece& p : pieces_) {
    const bool zero = p.kind == PieceKind::Constant
                          ? p.value.isZero(0.0)
                          : std::all_of(p.grid_values.begin(),
                                        p.grid_values.end(),
                                        [](const Matrix& v) { return v.isZero(0.0); });
    if (zero) continue;
    lo = std::min(lo, p.x_lo);
    hi = std::max(hi, p.x_hi);
  }
  if (lo > hi) return {0.0, 0.0};
  return {lo, hi};
}

bool PotentialSpec::compactly_supported() const {
  if (period_) return false;
  const auto [lo, hi] = support();
  return std::isfinite(lo) && std::isfinite(hi);
}

double PotentialSpec::period_origin() const {
  return pieces_.empty() ? 0.0 : pieces_.front().x_lo;
}

double PotentialSpec::wrap(double x, double* shift) const {
  const double w = *period_;
  const double p0 = period_origin();
  double k = std::floor((x - p0) / w);
  double y = x - k * w;
  if (y >= p0 + w) {
    k += 1.0;
    y = x - k * w;
  } else if (y < p0) {
    k -= 1.0;
    y = x - k * w;
  }
  *shift = k * w;
  return y;
}

const Piece* PotentialSpec::find_piece(double x, Side side) const {
  auto it = std::upper_bound(
      pieces_.begin(), pieces_.end(), x,
      [](double v, const Piece& p) { return v < p.x_lo; });
  // Right side: last piece with x_lo <= x.
  if (side == Side::Right) {
    if (it == pieces_.begin()) return nullptr;
    const Piece& p = *(it - 1);
    return x < p.x_hi ? &p : nullptr;
  }
  // Left side: piece with x_lo < x <= x_hi.
  while (it != pieces_.begin()) {
    const Piece& p = *(it - 1);
    if (p.x_lo < x) return x <= p.x_hi ? &p : nullptr;
    --it;
  }
  return nullptr;
}

Matrix PotentialSpec::eval_wrapped(double x, Side side) const {
  const Piece* p = find_piece(x, side);
  if (p == nullptr) {
    if (outside_ == OutsidePolicy::Error) {
      throw Error(ErrorKind::OutOfDomain,
                  "x = " + std::to_string(x) + " outside the declared pieces",
                  x);
    }
    return Matrix::Zero(dim(), dim());
  }
  if (p->kind == PieceKind::Constant) return p->value;
  return interpolate(*p, x);
}

Matrix PotentialSpec::eval(double x) const {
  return eval_one_sided(x, Side::Right);
}

Matrix PotentialSpec::eval_one_sided(double x, Side side) const {
  if (!std::isfinite(x)) {
    throw Error(ErrorKind::InvalidArgument, "evaluation point is not finite");
  }
  Matrix out;
  if (period_) {
    double shift = 0.0;
    double y = wrap(x, &shift);
    if (side == Side::Left && y == period_origin()) y += *period_;
    out = eval_wrapped(y, side);
  } else {
    out = eval_wrapped(x, side);
  }
  if (!out.allFinite()) {
    throw Error(ErrorKind::NonFiniteValue,
                "B(" + std::to_string(x) + ") has non-finite entries", x);
  }
  return out;
}

std::vector<double> PotentialSpec::breakpoints(double a, double b) const {
  const double lo = std::min(a, b), hi = std::max(a, b);
  std::vector<double> base;
  for (const Piece& p : pieces_) {
    base.push_back(p.x_lo);
    base.push_back(p.x_hi);
    if (p.kind == PieceKind::Grid) {
      for (double t : p.grid_x) {
        const double x = t + p.shift;
        if (x > p.x_lo && x < p.x_hi) base.push_back(x);
      }
    }
  }
  std::vector<double> out;
  if (!period_) {
    for (double x : base) {
      if (x > lo && x < hi) out.push_back(x);
    }
  } else {
    const double w = *period_;
    const double p0 = period_origin();
    const double k_lo = std::floor((lo - p0) / w) - 1.0;
    const double k_hi = std::ceil((hi - p0) / w) + 1.0;
    for (double k = k_lo; k <= k_hi; k += 1.0) {
      for (double x : base) {
        const double y = x + k * w;
        if (y > lo && y < hi) out.push_back(y);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

LocalForm PotentialSpec::local_form(double a, double b) const {
  const double lo = std::min(a, b), hi = std::max(a, b);
  double mid = 0.5 * (lo + hi);
  if (!std::isfinite(mid)) mid = std::isfinite(lo) ? lo + 1.0 : hi - 1.0;
  double shift = 0.0;
  double y = mid;
  if (period_) y = wrap(mid, &shift);
  const Piece* p = find_piece(y, Side::Right);
  LocalForm f;
  if (p == nullptr) {
    if (outside_ == OutsidePolicy::Error) {
      throw Error(ErrorKind::OutOfDomain,
                  "interval outside the declared pieces", mid);
    }
    f.constant = true;
    f.b_l = Matrix::Zero(dim(), dim());
    return f;
  }
  if (p->kind == PieceKind::Constant) {
    f.constant = true;
    f.b_l = p->value;
  } else {
    const double t = y - p->shift;
    const auto& g = p->grid_x;
    auto it = std::upper_bound(g.begin(), g.end(), t);
    std::size_t i =
        it == g.begin() ? 0 : static_cast<std::size_t>(it - g.begin()) - 1;
    if (i + 1 >= g.size()) i = g.size() - 2;
    f.constant = false;
    f.x_l = g[i] + p->shift + shift;
    f.x_r = g[i + 1] + p->shift + shift;
    f.b_l = p->grid_values[i];
    f.b_r = p->grid_values[i + 1];
  }
  if (!f.b_l.allFinite() || (!f.constant && !f.b_r.allFinite())) {
    throw Error(ErrorKind::NonFiniteValue, "B has non-finite entries", mid);
  }
  return f;
}

Matrix LocalForm::at(double x) const {
  if (constant) return b_l;
  const double w = (x - x_l) / (x_r - x_l);
  return (1.0 - w) * b_l + w * b_r;
}

std::vector<std::pair<double, double>> PotentialSpec::segments(double a,
                                                               double b) const {
  std::vector<std::pair<double, double>> out;
  if (a == b) return out;
  std::vector<double> pts = breakpoints(a, b);
  if (b < a) std::reverse(pts.begin(), pts.end());
  pts.push_back(b);
  double from = a;
  for (double to : pts) {
    const bool last = to == b;
    if (std::abs(to - from) <= 1e-13 * std::max(1.0, std::abs(from))) {
      if (last && !out.empty()) out.back().second = b;
      if (last && out.empty()) out.emplace_back(a, b);
      continue;
    }
    out.emplace_back(from, to);
    from = to;
  }
  return out;
}

double PotentialSpec::sup_norm() const {
  double s = 0.0;
  for (const Piece& p : pieces_) {
    if (p.kind == PieceKind::Constant) {
      s = std::max(s, norm(p.value));
    } else {
      for (const Matrix& v : p.grid_values) s = std::max(s, norm(v));
    }
  }
  return s;
}

PotentialSpec truncate_potential(const PotentialSpec& spec, double x0,
                                 double y0) {
  if (!(y0 > x0)) {
    throw Error(ErrorKind::EmptyWindow, "truncation window needs y0 > x0");
  }
  std::vector<Piece> out;
  auto clip = [&](Piece p) {
    p.x_lo = std::max(p.x_lo, x0);
    p.x_hi = std::min(p.x_hi, y0);
    if (p.x_hi > p.x_lo) out.push_back(std::move(p));
  };
  if (!spec.periodic()) {
    for (const Piece& p : spec.pieces()) clip(p);
  } else {
    const double w = *spec.period();
    const double p0 = spec.period_origin();
    const double k_lo = std::floor((x0 - p0) / w) - 1.0;
    const double k_hi = std::ceil((y0 - p0) / w) + 1.0;
    for (double k = k_lo; k <= k_hi; k += 1.0) {
      for (Piece p : spec.pieces()) {
        const double s = k * w;
        p.x_lo += s;
        p.x_hi += s;
        p.shift += s;
        clip(std::move(p));
      }
    }
  }
  std::string name = spec.name().empty() ? "truncated" : spec.name() + "|truncated";
  return PotentialSpec(spec.m(), std::move(out), std::nullopt, std::move(name),
                       OutsidePolicy::Zero, std::numeric_limits<double>::infinity());
}

bool check_normal_form(const PotentialSpec& spec, double a, double b,
                       double tol) {
  const int m = spec.m();
  const double lo = std::min(a, b), hi = std::max(a, b);
  auto ok = [&](const Matrix& bx) {
    const Matrix b11 = bx.block(0, 0, m, m), b12 = bx.block(0, m, m, m);
    const Matrix b21 = bx.block(m, 0, m, m), b22 = bx.block(m, m, m, m);
    return norm(b22 + b11) <= tol && norm(b21 - b12) <= tol &&
           hermiticity_defect(b11) <= tol && hermiticity_defect(b12) <= tol;
  };
  std::vector<double> pts = spec.breakpoints(lo, hi);
  std::vector<double> samples{lo, hi};
  double prev = lo;
  for (double x : pts) {
    samples.push_back(x);
    samples.push_back(0.5 * (prev + x));
    prev = x;
  }
  samples.push_back(0.5 * (prev + hi));
  constexpr int kUniform = 64;
  for (int k = 1; k < kUniform; ++k) {
    samples.push_back(lo + (hi - lo) * k / kUniform);
  }
  for (double x : samples) {
    if (!ok(spec.eval_one_sided(x, Side::Right))) return false;
    if (!ok(spec.eval_one_sided(x, Side::Left))) return false;
  }
  return true;
}

namespace {

using nlohmann::json;

double parse_bound(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "Infinity") return kInf;
    if (s == "-inf" || s == "-Infinity") return -kInf;
  }
  throw Error(ErrorKind::InvalidPotential, "bad interval bound " + j.dump());
}

json dump_bound(double x) {
  if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
  return json(x);
}

cplx parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw Error(ErrorKind::InvalidPotential, "bad complex entry " + j.dump());
}

Matrix parse_matrix(const json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw Error(ErrorKind::InvalidPotential,
                "expected a matrix with " + std::to_string(n) + " rows");
  }
  Matrix out(n, n);
  for (int r = 0; r < n; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != n) {
      throw Error(ErrorKind::InvalidPotential,
                  "expected " + std::to_string(n) + " columns");
    }
    for (int c = 0; c < n; ++c) out(r, c) = parse_complex(j[r][c]);
  }
  return out;
}

json dump_matrix(const Matrix& x) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      row.push_back(json::array({x(r, c).real(), x(r, c).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Matrix matrix_from_json(const std::string& text, int n) {
  try {
    return parse_matrix(json::parse(text), n);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad matrix JSON: ") + e.what());
  }
}

std::string matrix_to_json(const Matrix& x) { return dump_matrix(x).dump(); }

PotentialSpec potential_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidPotential, e.what());
  }
  try {
    const int m = doc.at("m").get<int>();
    std::optional<double> period;
    if (doc.contains("period") && !doc["period"].is_null()) {
      period = doc["period"].get<double>();
    }
    const std::string name = doc.value("name", std::string{});
    OutsidePolicy outside = OutsidePolicy::Zero;
    const std::string pol = doc.value("outside", std::string{"zero"});
    if (pol == "error") {
      outside = OutsidePolicy::Error;
    } else if (pol != "zero") {
      throw Error(ErrorKind::InvalidPotential, "outside must be zero|error");
    }
    std::vector<Piece> pieces;
    for (const json& pj : doc.at("pieces")) {
      const double lo = parse_bound(pj.at("x_lo"));
      const double hi = parse_bound(pj.at("x_hi"));
      const std::string kind = pj.at("kind").get<std::string>();
      if (kind == "constant") {
        pieces.push_back(Piece::constant(lo, hi, parse_matrix(pj.at("data"), 2 * m)));
      } else if (kind == "grid") {
        const json& d = pj.at("data");
        std::vector<double> xs = d.at("x").get<std::vector<double>>();
        std::vector<Matrix> vs;
        for (const json& v : d.at("values")) vs.push_back(parse_matrix(v, 2 * m));
        pieces.push_back(Piece::grid(lo, hi, std::move(xs), std::move(vs)));
      } else {
        throw Error(ErrorKind::InvalidPotential, "unknown piece kind " + kind);
      }
    }
    return PotentialSpec(m, std::move(pieces), period, name, outside);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidPotential, e.what());
  }
}

std::string potential_to_json(const PotentialSpec& spec) {
  json doc;
  doc["m"] = spec.m();
  if (!spec.name().empty()) doc["name"] = spec.name();
  if (spec.period()) doc["period"] = *spec.period();
  doc["outside"] = spec.outside() == OutsidePolicy::Error ? "error" : "zero";
  json pieces = json::array();
  for (const Piece& p : spec.pieces()) {
    json pj;
    pj["x_lo"] = dump_bound(p.x_lo);
    pj["x_hi"] = dump_bound(p.x_hi);
    if (p.kind == PieceKind::Constant) {
      pj["kind"] = "constant";
      pj["data"] = dump_matrix(p.value);
    } else {
      pj["kind"] = "grid";
      json xs = json::array();
      json vs = json::array();
      for (std::size_t i = 0; i < p.grid_x.size(); ++i) {
        xs.push_back(p.grid_x[i] + p.shift);
        vs.push_back(dump_matrix(p.grid_values[i]));
      }
      pj["data"] = {{"x", xs}, {"values", vs}};
    }
    pieces.push_back(std::move(pj));
  }
  doc["pieces"] = std::move(pieces);
  return doc.dump(2);
}

PotentialSpec load_potential(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return potential_from_json(ss.str());
}

void save_potential(const PotentialSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << potential_to_json(spec) << '\n';
}

}  // namespace weyldirac
