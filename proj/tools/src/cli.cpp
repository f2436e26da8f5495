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

#include "weyldirac_cli/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "weyldirac/asymptotics.hpp"
#include "weyldirac/csv.hpp"
#include "weyldirac/full_line.hpp"
#include "weyldirac/gauge.hpp"
#include "weyldirac/spectral.hpp"
#include "weyldirac/weyl_disk.hpp"

#ifndef WEYLDIRAC_VERSION
#define WEYLDIRAC_VERSION "unknown"
#endif

namespace weyldirac::cli {

namespace {

using json = nlohmann::json;

std::string trim(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  return s;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) {
    throw Error(ErrorKind::InvalidArgument, "not a number: '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

cplx parse_complex(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw Error(ErrorKind::InvalidArgument, "empty complex number");
  if (s.back() != 'i') return {parse_double(s), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  // Split at the last sign that is not the leading one or an exponent sign.
  std::size_t cut = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      cut = k;
      break;
    }
  }
  auto imag_of = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_double(t);
  };
  if (cut == std::string::npos) return {0.0, imag_of(body)};
  return {parse_double(body.substr(0, cut)), imag_of(body.substr(cut))};
}

std::vector<double> parse_real_list(const std::string& text) {
  const std::string s = trim(text);
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3 && !(parts.size() == 4 && parts[3] == "log")) {
      throw Error(ErrorKind::InvalidArgument, "grid must be a:b:n or a:b:n:log");
    }
    const double a = parse_double(parts[0]), b = parse_double(parts[1]);
    const double nd = parse_double(parts[2]);
    if (!(nd >= 1) || nd != std::floor(nd)) {
      throw Error(ErrorKind::InvalidArgument, "grid count must be a positive integer");
    }
    const int n = static_cast<int>(nd);
    const bool geometric = parts.size() == 4;
    if (geometric && !(a > 0 && b > 0)) {
      throw Error(ErrorKind::InvalidArgument, "log grid needs positive ends");
    }
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : double(i) / (n - 1);
      out.push_back(geometric ? a * std::pow(b / a, t) : a + (b - a) * t);
    }
    return out;
  }
  std::vector<double> out;
  for (const auto& p : split(s, ',')) out.push_back(parse_double(p));
  return out;
}

std::vector<cplx> parse_complex_list(const std::string& text) {
  std::vector<cplx> out;
  for (const auto& p : split(trim(text), ',')) out.push_back(parse_complex(p));
  return out;
}

namespace {

struct Failure {
  std::size_t index = 0;
  std::string label;
  std::string category;
  std::string message;
};

template <class T>
struct Outcome {
  std::optional<T> value;
  std::optional<Failure> failure;
};

int thread_count(const RunConfig& c) {
  if (c.threads > 0) return c.threads;
  if (const char* env = std::getenv("WEYLDIRAC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Work queue over [0, n); results stay in index order.
template <class T, class F>
std::vector<Outcome<T>> parallel_map(std::size_t n, int threads, F&& f) {
  std::vector<Outcome<T>> out(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[i].value = f(i);
      } catch (const Error& e) {
        out[i].failure = Failure{i, {}, to_string(e.kind()), e.what()};
      } catch (const std::exception& e) {
        out[i].failure = Failure{i, {}, "InternalError", e.what()};
      }
    }
  };
  const int t = static_cast<int>(std::min<std::size_t>(std::max(1, threads), std::max<std::size_t>(n, 1)));
  if (t <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

struct Report {
  std::string csv;
  json results = json::object();
  std::vector<Failure> failures;
  // (file suffix, content)
  std::vector<std::pair<std::string, std::string>> extra_files;
  std::size_t points = 0;
};

template <class T>
void collect_failures(Report& r, const std::vector<Outcome<T>>& v,
                      const std::function<std::string(std::size_t)>& label) {
  for (const auto& o : v) {
    if (o.failure) {
      Failure f = *o.failure;
      f.label = label(f.index);
      r.failures.push_back(f);
    }
  }
  r.points = v.size();
}

std::string complex_label(cplx z) {
  return csv::num(z.real()) + (z.imag() < 0 ? "" : "+") + csv::num(z.imag()) + "i";
}

json matrix_json(const Matrix& m) { return json::parse(matrix_to_json(m)); }

struct Context {
  const RunConfig& cfg;
  PotentialSpec spec;
  BoundaryData alpha;
  HalfLineOptions halfline;
  int threads;
};

BoundaryData load_alpha(const RunConfig& c, int m) {
  if (!c.alpha_file.empty()) {
    std::ifstream in(c.alpha_file);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + c.alpha_file);
    std::stringstream ss;
    ss << in.rdbuf();
    json doc;
    try {
      doc = json::parse(ss.str());
      return validate_boundary_data(matrix_from_json(doc.at("alpha1").dump(), m),
                                    matrix_from_json(doc.at("alpha2").dump(), m));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::InvalidBoundaryCondition,
                  std::string("bad boundary data file: ") + e.what());
    }
  }
  if (c.alpha_angle) {
    const Matrix id = Matrix::Identity(m, m);
    return validate_boundary_data(std::cos(*c.alpha_angle) * id, std::sin(*c.alpha_angle) * id);
  }
  return alpha0(m);
}

std::vector<cplx> z_points(const RunConfig& c) {
  std::vector<cplx> zs = c.zs;
  for (double r : c.zmags) zs.push_back(std::polar(r, c.ray));
  if (zs.empty()) throw Error(ErrorKind::InvalidArgument, "no z values (use --z or --zmag)");
  return zs;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, what);
}

// ---- subcommands ----------------------------------------------------------

Report cmd_mfunc(const Context& ctx) {
  const auto zs = z_points(ctx.cfg);
  const HalfLineSide side = ctx.cfg.side == "minus" ? HalfLineSide::Minus : HalfLineSide::Plus;
  auto res = parallel_map<HalfLineM>(zs.size(), ctx.threads, [&](std::size_t i) {
    return halfline_m(zs[i], ctx.cfg.x0, ctx.alpha, ctx.spec, side, ctx.halfline);
  });
  Report r;
  collect_failures(r, res, [&](std::size_t i) { return "z=" + complex_label(zs[i]); });
  const int m = ctx.spec.m();
  std::ostringstream os;
  os << "z_re,z_im,x0,side," << csv::matrix_header("M", m, m) << ",tail_bound,doublings\n";
  for (const auto& o : res) {
    if (!o.value) continue;
    const auto& h = *o.value;
    os << csv::num(h.z.real()) << ',' << csv::num(h.z.imag()) << ',' << csv::num(h.x0) << ','
       << (h.side == HalfLineSide::Plus ? "plus" : "minus") << csv::matrix_fields(h.m_value)
       << ',' << csv::num(h.tail_bound) << ',' << h.doublings << '\n';
  }
  r.csv = os.str();
  return r;
}

Report cmd_disk(const Context& ctx) {
  const auto zs = z_points(ctx.cfg);
  const auto& cs = ctx.cfg.cs;
  require(!cs.empty(), "disk needs --c");
  struct Row {
    cplx z;
    double c;
    Matrix regular;
    WeylPoint regular_point;
    WeylPoint limit_point;
  };
  const std::size_t n = zs.size() * cs.size();
  const PropagationOptions& prop = ctx.halfline.propagation;
  auto res = parallel_map<Row>(n, ctx.threads, [&](std::size_t k) {
    const cplx z = zs[k / cs.size()];
    const double c = cs[k % cs.size()];
    const Matrix reg = regular_m(z, c, ctx.cfg.x0, ctx.alpha, dirichlet_condition(ctx.spec.m()),
                                 ctx.spec, prop);
    const Matrix lim = halfline_m(z, ctx.cfg.x0, ctx.alpha, ctx.spec,
                                  c > ctx.cfg.x0 ? HalfLineSide::Plus : HalfLineSide::Minus,
                                  ctx.halfline)
                           .m_value;
    return Row{z, c, reg,
               disk_membership(reg, z, c, ctx.cfg.x0, ctx.alpha, ctx.spec, ctx.cfg.disk_tol, prop),
               disk_membership(lim, z, c, ctx.cfg.x0, ctx.alpha, ctx.spec, ctx.cfg.disk_tol, prop)};
  });
  Report r;
  collect_failures(r, res, [&](std::size_t k) {
    return "z=" + complex_label(zs[k / cs.size()]) + " c=" + csv::num(cs[k % cs.size()]);
  });
  const int m = ctx.spec.m();
  std::ostringstream os;
  os << "z_re,z_im,c," << csv::matrix_header("Mc", m, m)
     << ",regular_class,regular_lambda_max,limit_class,limit_lambda_max,tolerance\n";
  for (const auto& o : res) {
    if (!o.value) continue;
    const Row& w = *o.value;
    os << csv::num(w.z.real()) << ',' << csv::num(w.z.imag()) << ',' << csv::num(w.c)
       << csv::matrix_fields(w.regular) << ',' << to_string(w.regular_point.classification)
       << ',' << csv::num(w.regular_point.lambda_max) << ','
       << to_string(w.limit_point.classification) << ',' << csv::num(w.limit_point.lambda_max)
       << ',' << csv::num(w.limit_point.tolerance) << '\n';
  }
  r.csv = os.str();
  return r;
}

Report cmd_expand(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<double> xs = cfg.xs.empty() ? std::vector<double>{cfg.x0} : cfg.xs;
  require(cfg.order >= 0, "--order must be >= 0");
  const ExpansionSign sign = cfg.sign == "minus" ? ExpansionSign::Minus : ExpansionSign::Plus;
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it - 10 * cfg.step, hi = *hi_it + 10 * cfg.step;
  const int points = std::max(3, static_cast<int>(std::ceil((hi - lo) / cfg.step)) + 1);
  const DerivativeSamples derivs =
      sample_derivatives(ctx.spec, lo, hi, points, std::max(0, cfg.order - 1));

  struct Row {
    ExpansionCoefficients rec;
    std::optional<ExpansionFit> fit;
  };
  auto res = parallel_map<Row>(xs.size(), ctx.threads, [&](std::size_t i) {
    Row row{expansion_coefficients(derivs, xs[i], cfg.order, sign), std::nullopt};
    if (!cfg.fit_zmags.empty()) {
      std::vector<FitSample> samples;
      const HalfLineSide side = sign == ExpansionSign::Plus ? HalfLineSide::Plus : HalfLineSide::Minus;
      for (double rr : cfg.fit_zmags) {
        const cplx z = std::polar(rr, cfg.ray);
        samples.push_back({z, halfline_m(z, xs[i], alpha0(ctx.spec.m()), ctx.spec, side,
                                         ctx.halfline).m_value});
      }
      FitOptions fo;
      fo.sign = sign;
      row.fit = fit_expansion(samples, std::max(1, cfg.order), fo);
    }
    return row;
  });
  Report r;
  collect_failures(r, res, [&](std::size_t i) { return "x=" + csv::num(xs[i]); });
  std::ostringstream os;
  os << "source,x,k,row,col,re,im\n";
  auto emit = [&](const char* src, double x, const ExpansionCoefficients& c) {
    for (std::size_t k = 0; k < c.coeffs.size(); ++k) {
      for (Eigen::Index i = 0; i < c.coeffs[k].rows(); ++i) {
        for (Eigen::Index j = 0; j < c.coeffs[k].cols(); ++j) {
          os << src << ',' << csv::num(x) << ',' << k << ',' << i << ',' << j << ','
             << csv::num(c.coeffs[k](i, j).real()) << ',' << csv::num(c.coeffs[k](i, j).imag())
             << '\n';
        }
      }
    }
  };
  json fits = json::array();
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (!res[i].value) continue;
    emit("recursion", xs[i], res[i].value->rec);
    if (res[i].value->fit) {
      emit("fit", xs[i], res[i].value->fit->coefficients);
      fits.push_back({{"x", xs[i]},
                      {"residuals", res[i].value->fit->residuals},
                      {"condition", res[i].value->fit->condition}});
    }
  }
  r.results["derivative_grid"] = {{"lo", lo}, {"hi", hi}, {"points", points}};
  if (!fits.empty()) r.results["fits"] = fits;
  r.csv = os.str();
  return r;
}

Report cmd_fullline(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  FullLineOptions fo;
  fo.halfline = ctx.halfline;
  Report r;
  if (!cfg.lambdas.empty()) {
    UpsilonOptions uo;
    uo.fullline = fo;
    auto res = parallel_map<UpsilonSample>(cfg.lambdas.size(), ctx.threads, [&](std::size_t i) {
      return upsilon(cfg.lambdas[i], cfg.x0, ctx.alpha, ctx.spec, cfg.epsilon, uo);
    });
    collect_failures(r, res, [&](std::size_t i) { return "lambda=" + csv::num(cfg.lambdas[i]); });
    std::vector<UpsilonSample> ok;
    double lo = INFINITY, hi = -INFINITY;
    for (auto& o : res) {
      if (!o.value) continue;
      lo = std::min(lo, o.value->min_eigenvalue);
      hi = std::max(hi, o.value->max_eigenvalue);
      ok.push_back(*o.value);
    }
    std::ostringstream os;
    write_upsilon_csv(os, ok);
    r.csv = os.str();
    r.results["mode"] = "upsilon";
    if (!ok.empty()) r.results["eigenvalue_range"] = {lo, hi};
    return r;
  }
  const auto zs = z_points(cfg);
  auto res = parallel_map<FullLineM>(zs.size(), ctx.threads, [&](std::size_t i) {
    return fullline_m(zs[i], cfg.x0, ctx.alpha, ctx.spec, fo);
  });
  collect_failures(r, res, [&](std::size_t i) { return "z=" + complex_label(zs[i]); });
  std::vector<FullLineM> ok;
  for (auto& o : res) {
    if (o.value) ok.push_back(*o.value);
  }
  std::ostringstream os;
  write_fullline_csv(os, ok);
  r.csv = os.str();
  r.results["mode"] = "m";
  return r;
}

Report cmd_greens(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto zs = z_points(cfg);
  require(!cfg.xs.empty() && !cfg.xps.empty(), "greens needs --x and --xp");
  FullLineOptions fo;
  fo.halfline = ctx.halfline;
  Report r;
  std::ostringstream os;
  const int n = 2 * ctx.spec.m();
  os << "z_re,z_im,x,xp," << csv::matrix_header("G", n, n) << '\n';
  for (const cplx z : zs) {
    const GreensFunction g(z, cfg.x0, ctx.spec, fo);
    const std::size_t cnt = cfg.xs.size() * cfg.xps.size();
    auto res = parallel_map<Matrix>(cnt, ctx.threads, [&](std::size_t k) {
      const double x = cfg.xs[k / cfg.xps.size()], xp = cfg.xps[k % cfg.xps.size()];
      return x == xp ? g.diagonal(x) : g(x, xp).value;
    });
    Report part;
    collect_failures(part, res, [&](std::size_t k) {
      return "z=" + complex_label(z) + " x=" + csv::num(cfg.xs[k / cfg.xps.size()]) +
             " xp=" + csv::num(cfg.xps[k % cfg.xps.size()]);
    });
    r.failures.insert(r.failures.end(), part.failures.begin(), part.failures.end());
    r.points += part.points;
    for (std::size_t k = 0; k < res.size(); ++k) {
      if (!res[k].value) continue;
      os << csv::num(z.real()) << ',' << csv::num(z.imag()) << ','
         << csv::num(cfg.xs[k / cfg.xps.size()]) << ',' << csv::num(cfg.xps[k % cfg.xps.size()])
         << csv::matrix_fields(*res[k].value) << '\n';
    }
  }
  r.csv = os.str();
  return r;
}

Report cmd_trace(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  require(!cfg.zmags.empty(), "trace needs --zmag");
  const std::vector<double> xs = cfg.xs.empty() ? std::vector<double>{cfg.x0} : cfg.xs;
  TraceOptions to;
  to.fullline.halfline = ctx.halfline;
  const std::size_t cnt = xs.size() * cfg.zmags.size();
  auto res = parallel_map<TraceCheck>(cnt, ctx.threads, [&](std::size_t k) {
    return trace_check(xs[k / cfg.zmags.size()], ctx.spec, cfg.ray, {cfg.zmags[k % cfg.zmags.size()]},
                       to);
  });
  Report r;
  collect_failures(r, res, [&](std::size_t k) {
    return "x=" + csv::num(xs[k / cfg.zmags.size()]) +
           " |z|=" + csv::num(cfg.zmags[k % cfg.zmags.size()]);
  });
  const int n = 2 * ctx.spec.m();
  std::ostringstream os;
  os << "x,z_re,z_im," << csv::matrix_header("lhs", n, n) << ',' << csv::matrix_header("limit", n, n)
     << ",residual,step_sensitivity\n";
  json per_x = json::array();
  for (std::size_t k = 0; k < res.size(); ++k) {
    if (!res[k].value) continue;
    const TraceCheck& t = *res[k].value;
    const TraceSample& s = t.samples.front();
    os << csv::num(t.x) << ',' << csv::num(s.z.real()) << ',' << csv::num(s.z.imag())
       << csv::matrix_fields(s.lhs) << csv::matrix_fields(t.limit) << ',' << csv::num(s.residual)
       << ',' << csv::num(s.step_sensitivity) << '\n';
    per_x.push_back({{"x", t.x}, {"abs_z", std::abs(s.z)}, {"residual", s.residual}});
  }
  r.results["samples"] = per_x;
  r.csv = os.str();
  return r;
}

json intervals_json(const std::vector<Interval>& v) {
  json out = json::array();
  for (const auto& i : v) {
    out.push_back({{"lo", i.lo}, {"hi", i.hi}, {"open_below", i.open_below},
                   {"open_above", i.open_above}});
  }
  return out;
}

Report cmd_bands(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  require(!cfg.lambdas.empty(), "bands needs --lambda");
  if (!ctx.spec.periodic()) throw Error(ErrorKind::NotPeriodic, "bands needs a periodic potential");
  auto res = parallel_map<BandStructure>(cfg.lambdas.size(), ctx.threads, [&](std::size_t i) {
    return band_spectrum(ctx.spec, {cfg.lambdas[i]}, cfg.band_tol, ctx.spec.period_origin());
  });
  Report r;
  collect_failures(r, res, [&](std::size_t i) { return "lambda=" + csv::num(cfg.lambdas[i]); });
  BandStructure all;
  for (auto& o : res) {
    if (!o.value) continue;
    all.lambdas.push_back(o.value->lambdas.front());
    all.in_band.push_back(o.value->in_band.front());
    all.multipliers.push_back(o.value->multipliers.front());
    all.tolerance = o.value->tolerance;
  }
  assign_intervals(all);
  std::ostringstream os;
  write_band_csv(os, all);
  r.csv = os.str();
  r.results["bands"] = intervals_json(all.bands);
  r.results["gaps"] = intervals_json(all.gaps);
  r.results["in_band_tolerance"] = all.tolerance;
  return r;
}

Report cmd_reflectionless(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  require(!cfg.lambdas.empty(), "reflectionless needs --lambda");
  const std::vector<double> xs = cfg.xs.empty() ? std::vector<double>{cfg.x0} : cfg.xs;
  UpsilonOptions uo;
  uo.fullline.halfline = ctx.halfline;
  const std::size_t cnt = xs.size() * cfg.lambdas.size();
  auto res = parallel_map<ReflectionlessResult>(cnt, ctx.threads, [&](std::size_t k) {
    return reflectionless_check(ctx.spec, {xs[k / cfg.lambdas.size()]},
                                {cfg.lambdas[k % cfg.lambdas.size()]}, cfg.epsilon,
                                cfg.reflect_tol, uo);
  });
  Report r;
  collect_failures(r, res, [&](std::size_t k) {
    return "x=" + csv::num(xs[k / cfg.lambdas.size()]) +
           " lambda=" + csv::num(cfg.lambdas[k % cfg.lambdas.size()]);
  });
  const int n = 2 * ctx.spec.m();
  std::ostringstream os;
  os << "x,lambda,epsilon,deviation," << csv::matrix_header("upsilon", n, n) << '\n';
  double worst = 0.0;
  json worst_at = nullptr;
  for (std::size_t k = 0; k < res.size(); ++k) {
    if (!res[k].value) continue;
    const auto& v = *res[k].value;
    const UpsilonSample& s = v.samples.front();
    os << csv::num(v.worst_x) << ',' << csv::num(s.lambda) << ',' << csv::num(s.epsilon) << ','
       << csv::num(v.worst_deviation) << csv::matrix_fields(s.value) << '\n';
    if (worst_at.is_null() || v.worst_deviation > worst) {
      worst = v.worst_deviation;
      worst_at = {{"x", v.worst_x}, {"lambda", v.worst_lambda}};
    }
  }
  r.results["reflectionless"] = r.failures.empty() && worst <= cfg.reflect_tol;
  r.results["worst_deviation"] = worst;
  r.results["worst_at"] = worst_at;
  r.csv = os.str();
  return r;
}

Report cmd_borg(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  BorgOptions bo;
  if (cfg.lambda_max) bo.lambda_max = *cfg.lambda_max;
  bo.step = cfg.step;
  bo.band_tol = cfg.band_tol;
  const BorgReport b = borg_diagnostic(ctx.spec, bo);
  Report r;
  std::ostringstream os;
  write_band_csv(os, b.bands);
  r.csv = os.str();
  r.points = 1;
  r.results["lambda_max"] = b.lambda_max;
  r.results["full_spectrum"] = b.full_spectrum;
  r.results["gaps"] = intervals_json(b.bands.gaps);
  r.results["max_combination"] = b.max_combination;
  r.results["consistent"] = b.consistent;
  return r;
}

Report cmd_uniqueness(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  require(!cfg.potential2.empty(), "uniqueness needs --potential2");
  require(!cfg.zmags.empty(), "uniqueness needs --zmag");
  const PotentialSpec spec2 = load_potential(cfg.potential2);
  DecayOptions dopt;
  dopt.halfline = ctx.halfline;
  dopt.ode.rtol = cfg.ode_rtol;
  const DecayFit d = uniqueness_decay(ctx.spec, spec2, cfg.x0, cfg.a, cfg.ray, cfg.zmags, dopt);
  Report r;
  std::ostringstream os;
  write_decay_csv(os, d);
  r.csv = os.str();
  r.points = 1;
  r.results["slope"] = d.slope;
  r.results["intercept"] = d.intercept;
  r.results["r2"] = d.r2;
  r.results["window_estimate"] = d.window_estimate;
  r.results["discarded"] = d.discarded;
  return r;
}

Report cmd_gauge(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const int m = ctx.spec.m();
  Matrix omega = Matrix::Zero(m, m);
  if (!cfg.omega_file.empty()) {
    std::ifstream in(cfg.omega_file);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + cfg.omega_file);
    std::stringstream ss;
    ss << in.rdbuf();
    omega = matrix_from_json(ss.str(), m);
  } else if (cfg.omega_scalar) {
    omega = *cfg.omega_scalar * Matrix::Identity(m, m);
  }
  GaugeOptions go;
  go.ode.rtol = cfg.ode_rtol;
  const GaugeFactors g = gauge_factors(ctx.spec, cfg.x0, cfg.x1, go);
  const PotentialSpec nf = gauge_with_omega(ctx.spec, omega, cfg.x0, cfg.x1, go);
  Report r;
  std::ostringstream os;
  os << "piece,x," << csv::matrix_header("Bt", 2 * m, 2 * m) << '\n';
  double defect = 0.0;
  auto row = [&](std::size_t p, double x, const Matrix& b) {
    os << p << ',' << csv::num(x) << csv::matrix_fields(b) << '\n';
    const auto b11 = b.topLeftCorner(m, m), b12 = b.topRightCorner(m, m);
    const auto b21 = b.bottomLeftCorner(m, m), b22 = b.bottomRightCorner(m, m);
    defect = std::max(defect, norm(b11 + b22) + norm(b12 - b21));
  };
  for (std::size_t p = 0; p < nf.pieces().size(); ++p) {
    const Piece& pc = nf.pieces()[p];
    if (pc.kind == PieceKind::Constant) {
      row(p, pc.x_lo, pc.value);
      continue;
    }
    for (std::size_t i = 0; i < pc.grid_x.size(); ++i) {
      row(p, pc.grid_x[i] + pc.shift, pc.grid_values[i]);
    }
  }
  r.csv = os.str();
  r.points = 1;
  r.results["max_drift"] = g.max_drift;
  r.results["final_drift"] = g.final_drift;
  r.results["reunitarizations"] = g.reunitarizations;
  r.results["normal_form_defect"] = defect;
  r.results["omega"] = matrix_json(omega);
  r.extra_files.push_back({".potential.json", potential_to_json(nf) + "\n"});
  return r;
}

const std::map<std::string, std::function<Report(const Context&)>>& commands() {
  static const std::map<std::string, std::function<Report(const Context&)>> table = {
      {"mfunc", cmd_mfunc},       {"disk", cmd_disk},
      {"expand", cmd_expand},     {"fullline", cmd_fullline},
      {"greens", cmd_greens},     {"trace", cmd_trace},
      {"bands", cmd_bands},       {"reflectionless", cmd_reflectionless},
      {"borg", cmd_borg},         {"uniqueness", cmd_uniqueness},
      {"gauge", cmd_gauge}};
  return table;
}

json tolerances(const RunConfig& c) {
  return {{"halfline_tol", c.halfline_tol}, {"ode_rtol", c.ode_rtol},
          {"band_tol", c.band_tol},         {"reflect_tol", c.reflect_tol},
          {"disk_tol", c.disk_tol},         {"epsilon", c.epsilon}};
}

json inputs(const RunConfig& c) {
  json zs = json::array();
  for (cplx z : c.zs) zs.push_back({z.real(), z.imag()});
  json j = {{"potential", c.potential}, {"x0", c.x0}, {"ray", c.ray}, {"z", zs}};
  auto put = [&](const char* k, const std::vector<double>& v) {
    if (!v.empty()) j[k] = v;
  };
  put("x", c.xs);
  put("xp", c.xps);
  put("zmag", c.zmags);
  put("lambda", c.lambdas);
  put("c", c.cs);
  put("fit_zmag", c.fit_zmags);
  if (!c.potential2.empty()) j["potential2"] = c.potential2;
  if (!c.alpha_file.empty()) j["alpha_file"] = c.alpha_file;
  if (c.alpha_angle) j["alpha_angle"] = *c.alpha_angle;
  if (c.subcommand == "gauge") {
    j["x1"] = c.x1;
    if (c.omega_scalar) j["omega"] = *c.omega_scalar;
    if (!c.omega_file.empty()) j["omega_file"] = c.omega_file;
  }
  if (c.subcommand == "uniqueness") j["a"] = c.a;
  if (c.subcommand == "expand") {
    j["order"] = c.order;
    j["sign"] = c.sign;
  }
  if (c.subcommand == "mfunc") j["side"] = c.side;
  if (c.subcommand == "borg" || c.subcommand == "expand") j["step"] = c.step;
  if (c.lambda_max) j["lambda_max"] = *c.lambda_max;
  return j;
}

void error_line(std::ostream& err, const std::string& category, const std::string& message,
                bool partial = false) {
  json e = {{"error", category}, {"message", message}};
  if (partial) e["partial"] = true;
  err << e.dump() << '\n';
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot write " + path);
  f << content;
  if (!f) throw Error(ErrorKind::IoError, "write failed for " + path);
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto it = commands().find(config.subcommand);
  if (it == commands().end()) {
    error_line(err, "InvalidArgument", "unknown subcommand '" + config.subcommand + "'");
    return kExitUsage;
  }
  Report rep;
  std::string prefix = config.output.empty() ? config.subcommand : config.output;
  try {
    if (!(config.halfline_tol > 0 && config.ode_rtol > 0 && config.band_tol > 0 &&
          config.reflect_tol > 0 && config.disk_tol > 0 && config.epsilon > 0)) {
      throw Error(ErrorKind::InvalidArgument, "tolerances must be positive");
    }
    if (config.potential.empty()) throw Error(ErrorKind::InvalidArgument, "--potential is required");
    Context ctx{config, load_potential(config.potential), alpha0(1), {}, thread_count(config)};
    ctx.alpha = load_alpha(config, ctx.spec.m());
    ctx.halfline.tol = config.halfline_tol;
    ctx.halfline.propagation.ode.rtol = config.ode_rtol;
    rep = it->second(ctx);
  } catch (const Error& e) {
    error_line(err, to_string(e.kind()), e.what());
    return kExitModuleError;
  } catch (const std::exception& e) {
    error_line(err, "InternalError", e.what());
    return kExitModuleError;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const bool partial = !rep.failures.empty();
  std::ostringstream csv_text;
  csv_text << "# weyldirac " << WEYLDIRAC_VERSION << ' ' << config.subcommand << '\n';
  csv_text << "# tolerances " << tolerances(config).dump() << '\n';
  if (partial) {
    csv_text << "# partial: " << rep.failures.size() << " of " << rep.points
             << " points failed\n";
  }
  csv_text << rep.csv;

  json summary = {{"subcommand", config.subcommand},
                  {"version", WEYLDIRAC_VERSION},
                  {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION)},
                  {"inputs", inputs(config)},
                  {"tolerances", tolerances(config)},
                  {"wall_time_s", wall},
                  {"partial", partial},
                  {"results", rep.results}};
  json outputs = json::array();
  if (partial) {
    json f = json::array();
    for (const auto& x : rep.failures) {
      f.push_back({{"index", x.index}, {"at", x.label}, {"error", x.category},
                   {"message", x.message}});
    }
    summary["failures"] = f;
  }
  try {
    if (config.to_stdout) {
      out << csv_text.str();
    } else {
      write_file(prefix + ".csv", csv_text.str());
      outputs.push_back(prefix + ".csv");
    }
    for (const auto& [suffix, content] : rep.extra_files) {
      write_file(prefix + suffix, content);
      outputs.push_back(prefix + suffix);
    }
    outputs.push_back(prefix + ".json");
    summary["outputs"] = outputs;
    write_file(prefix + ".json", summary.dump(2) + "\n");
  } catch (const Error& e) {
    error_line(err, to_string(e.kind()), e.what());
    return kExitModuleError;
  }
  if (partial) {
    error_line(err, rep.failures.front().category, rep.failures.front().message, true);
    return kExitModuleError;
  }
  return kExitOk;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weyl-Titchmarsh tools for Dirac-type systems J d/dx - B"};
  app.set_version_flag("--version", WEYLDIRAC_VERSION);
  app.require_subcommand(1);

  RunConfig cfg;
  // Raw list-valued options, parsed after CLI11.
  std::vector<std::string> z_raw;
  std::string x_raw, xp_raw, zmag_raw, lambda_raw, c_raw, fit_raw;
  std::optional<double> alpha_angle, lambda_max, omega_scalar;

  struct Spec {
    const char* name;
    const char* help;
    std::vector<const char*> opts;
  };
  const std::vector<Spec> subs = {
      {"mfunc", "half-line Weyl-Titchmarsh M", {"alpha", "x0", "z", "zmag", "ray", "side"}},
      {"disk", "regular M and Weyl disk classification", {"alpha", "x0", "z", "zmag", "ray", "c", "disk-tol"}},
      {"expand", "high-energy expansion coefficients", {"x0", "x", "order", "sign", "step", "fit-zmag", "ray"}},
      {"fullline", "full-line M, or Upsilon on a lambda grid", {"alpha", "x0", "z", "zmag", "ray", "lambda", "epsilon"}},
      {"greens", "Green's matrix", {"x0", "z", "zmag", "ray", "x", "xp"}},
      {"trace", "trace formula residuals", {"x0", "x", "zmag", "ray"}},
      {"bands", "Floquet band structure", {"lambda", "band-tol"}},
      {"reflectionless", "reflectionless test via Upsilon", {"x0", "x", "lambda", "epsilon", "reflect-tol"}},
      {"borg", "Borg-type consistency diagnostic", {"lambda-max", "step", "band-tol"}},
      {"uniqueness", "exponential closeness of M-functions", {"potential2", "x0", "a", "ray", "zmag"}},
      {"gauge", "gauge reduction to normal form", {"x0", "x1", "omega", "omega-file"}},
  };

  auto add = [&](CLI::App* s, const std::string& key) {
    if (key == "alpha") {
      s->add_option("--alpha", cfg.alpha_file, "boundary data JSON with alpha1, alpha2");
      s->add_option("--alpha-angle", alpha_angle, "alpha = (cos t I, sin t I)");
    } else if (key == "x0") {
      s->add_option("--x0", cfg.x0, "reference point");
    } else if (key == "x1") {
      s->add_option("--x1", cfg.x1, "right end of the gauge interval");
    } else if (key == "a") {
      s->add_option("--a", cfg.a, "length of the agreement window");
    } else if (key == "z") {
      s->add_option("--z", z_raw, "spectral parameter(s), e.g. 0+1e3i; repeatable or comma list");
    } else if (key == "zmag") {
      s->add_option("--zmag", zmag_raw, "|z| values: list or a:b:n[:log]");
    } else if (key == "ray") {
      s->add_option("--ray", cfg.ray, "arg z for --zmag (default pi/2)");
    } else if (key == "x") {
      s->add_option("--x", x_raw, "x values: list or a:b:n");
    } else if (key == "xp") {
      s->add_option("--xp", xp_raw, "x' values: list or a:b:n");
    } else if (key == "c") {
      s->add_option("--c", c_raw, "truncation points: list or a:b:n");
    } else if (key == "lambda") {
      s->add_option("--lambda", lambda_raw, "real spectral grid: list or a:b:n");
    } else if (key == "epsilon") {
      s->add_option("--epsilon", cfg.epsilon, "offset above the real axis");
    } else if (key == "order") {
      s->add_option("--order", cfg.order, "expansion order N");
    } else if (key == "sign") {
      s->add_option("--sign", cfg.sign, "plus or minus")->check(CLI::IsMember({"plus", "minus"}));
    } else if (key == "side") {
      s->add_option("--side", cfg.side, "plus or minus")->check(CLI::IsMember({"plus", "minus"}));
    } else if (key == "step") {
      s->add_option("--step", cfg.step, "grid step");
    } else if (key == "fit-zmag") {
      s->add_option("--fit-zmag", fit_raw, "|z| samples for a least-squares fit");
    } else if (key == "lambda-max") {
      s->add_option("--lambda-max", lambda_max, "spectral window half-width");
    } else if (key == "band-tol") {
      s->add_option("--band-tol", cfg.band_tol, "multiplier unimodularity tolerance per unit period");
    } else if (key == "reflect-tol") {
      s->add_option("--reflect-tol", cfg.reflect_tol, "tolerance on ||Upsilon - I/2||");
    } else if (key == "disk-tol") {
      s->add_option("--disk-tol", cfg.disk_tol, "relative classification tolerance");
    } else if (key == "potential2") {
      s->add_option("--potential2", cfg.potential2, "second potential file")->required();
    } else if (key == "omega") {
      s->add_option("--omega", omega_scalar, "scalar w for omega = w I");
    } else if (key == "omega-file") {
      s->add_option("--omega-file", cfg.omega_file, "Hermitian omega as JSON matrix");
    }
  };

  for (const auto& sp : subs) {
    CLI::App* s = app.add_subcommand(sp.name, sp.help);
    s->add_option("--potential", cfg.potential, "potential JSON file")->required();
    for (const char* o : sp.opts) add(s, o);
    s->add_option("--tol", cfg.halfline_tol, "half-line Cauchy tolerance");
    s->add_option("--rtol", cfg.ode_rtol, "ODE relative tolerance");
    s->add_option("--output,-o", cfg.output, "output file prefix (default: subcommand name)");
    s->add_flag("--stdout", cfg.to_stdout, "write the CSV to stdout");
    s->add_option("--threads", cfg.threads, "worker threads (default WEYLDIRAC_THREADS)");
    s->callback([&cfg, name = std::string(sp.name)] { cfg.subcommand = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    error_line(err, "InvalidArgument", e.what());
    return kExitUsage;
  }

  try {
    for (const auto& z : z_raw) {
      const auto v = parse_complex_list(z);
      cfg.zs.insert(cfg.zs.end(), v.begin(), v.end());
    }
    if (!x_raw.empty()) cfg.xs = parse_real_list(x_raw);
    if (!xp_raw.empty()) cfg.xps = parse_real_list(xp_raw);
    if (!zmag_raw.empty()) cfg.zmags = parse_real_list(zmag_raw);
    if (!lambda_raw.empty()) cfg.lambdas = parse_real_list(lambda_raw);
    if (!c_raw.empty()) cfg.cs = parse_real_list(c_raw);
    if (!fit_raw.empty()) cfg.fit_zmags = parse_real_list(fit_raw);
  } catch (const Error& e) {
    error_line(err, to_string(e.kind()), e.what());
    return kExitUsage;
  }
  cfg.alpha_angle = alpha_angle;
  cfg.lambda_max = lambda_max;
  cfg.omega_scalar = omega_scalar;
  return run(cfg, out, err);
}

}  // namespace weyldirac::cli
