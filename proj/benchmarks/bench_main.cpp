#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "handle_forge/constructors.hpp"
#include "handle_forge/levi.hpp"
#include "handle_forge/profile.hpp"
#include "handle_forge/pseudoconvexity.hpp"

namespace hf = handle_forge;

static void BM_ProfileJet(benchmark::State& state) {
  const hf::RadialProfile g = hf::sqrt_quadratic(2.0, 1.0);
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.jet(t));
    t = t < 10.0 ? t + 1e-3 : 0.1;
  }
}
BENCHMARK(BM_ProfileJet);

static void BM_OuterInverseJet(benchmark::State& state) {
  hf::HandleOptions o;
  o.relax = true;
  const hf::HandleConstruction h = hf::build_outer_handle(2.0, 1.0, 0.5, o);
  double u = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(h.inverse.jet(u));
    u = u < 3.0 ? u + 1e-3 : 1e-3;
  }
}
BENCHMARK(BM_OuterInverseJet);

static void BM_LeviSpectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const hf::RadialProfile theta = hf::theta_of_f(hf::sqrt_quadratic(0.5, 1.0));
  std::mt19937_64 rng(42);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = normal(rng);
    y[i] = normal(rng);
  }
  y *= std::sqrt(theta.value(x.squaredNorm())) / y.norm();
  const hf::BoundaryPoint p{x, y};
  for (auto _ : state) benchmark::DoNotOptimize(hf::rotational_levi_spectrum(theta, p));
}
BENCHMARK(BM_LeviSpectrum)->Arg(2)->Arg(4)->Arg(8);

static void BM_Classify(benchmark::State& state) {
  const hf::RadialProfile g = hf::sqrt_quadratic(2.0, 1.0);
  hf::GridOptions grid;
  grid.n_grid = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hf::classify(g, hf::Condition::FForm, 0.1, 10.0, grid));
}
BENCHMARK(BM_Classify)->Arg(1000)->Arg(10000);

static void BM_BuildOuter(benchmark::State& state) {
  hf::HandleOptions o;
  o.relax = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(hf::build_outer_handle(2.0, 1.0, 0.5, o));
}
BENCHMARK(BM_BuildOuter)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_BuildInner(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(hf::build_inner_handle(0.0, 0.5));
}
BENCHMARK(BM_BuildInner)->Unit(benchmark::kMillisecond);

static void BM_BuildQuadratic(benchmark::State& state) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Constant(1, 1, 2.0);
  const Eigen::MatrixXd b = Eigen::MatrixXd::Constant(1, 1, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(hf::build_quadratic_handle(a, b, 1.0, 0.5));
}
BENCHMARK(BM_BuildQuadratic)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
