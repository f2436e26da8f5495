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
#include <vector>

#include <benchmark/benchmark.h>

#include "weyldirac/asymptotics.hpp"
#include "weyldirac/full_line.hpp"
#include "weyldirac/gauge.hpp"
#include "weyldirac/propagator.hpp"
#include "weyldirac/spectral.hpp"
#include "weyldirac/weyl_disk.hpp"

namespace {

using namespace weyldirac;

Matrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = cplx(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

PotentialSpec random_steps(int m, int pieces, std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  std::vector<Piece> ps;
  for (int i = 0; i < pieces; ++i) {
    ps.push_back(Piece::constant(0.25 * i, 0.25 * (i + 1), random_hermitian(2 * m, rng)));
  }
  return PotentialSpec(m, ps);
}

PotentialSpec smooth_bump(int nodes) {
  std::vector<double> xs;
  std::vector<Matrix> vs;
  for (int i = 0; i <= nodes; ++i) {
    const double x = double(i) / nodes;
    const double f = std::pow(std::sin(std::numbers::pi * x), 4);
    Matrix b(2, 2);
    b << 0.5 * f, 0.7 * f, 0.7 * f, -0.5 * f;
    xs.push_back(x);
    vs.push_back(b);
  }
  return PotentialSpec(1, {Piece::grid(0.0, 1.0, xs, vs)});
}

Matrix const_q(double q) {
  Matrix b(2, 2);
  b << 0, q, q, 0;
  return b;
}

void BM_FundamentalSystemSteps(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const PotentialSpec spec = random_steps(m, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fundamental_system(cplx(0.3, 1.0), 2.0, 0.0, alpha0(m), spec));
  }
}
BENCHMARK(BM_FundamentalSystemSteps)->Arg(1)->Arg(2)->Arg(4);

void BM_FundamentalSystemGrid(benchmark::State& state) {
  const PotentialSpec spec = smooth_bump(static_cast<int>(state.range(0)));
  PropagationOptions opt;
  opt.monitor_symplectic = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fundamental_system(cplx(0.0, 10.0), 1.0, 0.0, alpha0(1), spec, opt));
  }
}
BENCHMARK(BM_FundamentalSystemGrid)->Arg(100)->Arg(1000);

void BM_HalfLineCompact(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const PotentialSpec spec = random_steps(m, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(halfline_m(cplx(0.5, 1.0), 0.3, alpha0(m), spec));
  }
}
BENCHMARK(BM_HalfLineCompact)->Arg(1)->Arg(2)->Arg(4);

void BM_HalfLinePeriodic(benchmark::State& state) {
  const PotentialSpec spec = PotentialSpec::periodic_constant(const_q(1.0), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(halfline_m(cplx(0.5, 0.2), 0.0, alpha0(1), spec));
  }
}
BENCHMARK(BM_HalfLinePeriodic);

void BM_FullLine(benchmark::State& state) {
  const PotentialSpec spec = random_steps(2, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fullline_m(cplx(0.5, 1.0), 1.0, alpha0(2), spec));
  }
}
BENCHMARK(BM_FullLine);

void BM_Upsilon(benchmark::State& state) {
  const PotentialSpec spec = random_steps(1, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(upsilon(0.7, 1.0, alpha0(1), spec, 1e-4));
  }
}
BENCHMARK(BM_Upsilon);

void BM_PrincipalLog(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const int n = static_cast<int>(state.range(0));
  const Matrix a = random_hermitian(n, rng) + cplx(0.0, 1.0) * Matrix::Identity(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(principal_log(a));
}
BENCHMARK(BM_PrincipalLog)->Arg(2)->Arg(4)->Arg(8);

void BM_ExpansionRecursion(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const DerivativeSamples d = sample_derivatives(smooth_bump(400), 0.0, 1.0, 401, order);
  for (auto _ : state) {
    benchmark::DoNotOptimize(expansion_coefficients(d, 0.4, order, ExpansionSign::Plus));
  }
}
BENCHMARK(BM_ExpansionRecursion)->Arg(2)->Arg(4)->Arg(8);

void BM_BandScan(benchmark::State& state) {
  const PotentialSpec spec = PotentialSpec::periodic_constant(const_q(1.0), 1.0);
  std::vector<double> grid;
  for (int i = 0; i < state.range(0); ++i) grid.push_back(-3.0 + 6.0 * i / (state.range(0) - 1));
  for (auto _ : state) benchmark::DoNotOptimize(band_spectrum(spec, grid));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BandScan)->Arg(101)->Arg(601);

void BM_NormalForm(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const PotentialSpec spec = random_steps(m, 8);
  for (auto _ : state) benchmark::DoNotOptimize(normal_form(spec, 0.0, 2.0));
}
BENCHMARK(BM_NormalForm)->Arg(1)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
