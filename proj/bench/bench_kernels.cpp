// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "alphamod/evolve.hpp"
#include "alphamod/kernels.hpp"

namespace k = alphamod::kernels;
using k::cplx;

namespace {

std::vector<cplx> random_values(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  for (auto& z : v) z = cplx(nd(rng), nd(rng));
  return v;
}

std::vector<double> symbol(std::size_t n) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = double(i % 997) * 0.01;
  return s;
}

template <auto Kernel>
void dispersion(benchmark::State& state) {
  auto data = random_values(state.range(0));
  const auto sym = symbol(state.range(0));
  for (auto _ : state) {
    Kernel(data, sym, 1e-3);
    benchmark::DoNotOptimize(data.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void nonlinear(benchmark::State& state) {
  auto data = random_values(state.range(0));
  for (auto _ : state) {
    Kernel(data, 1e-3, 3);
    benchmark::DoNotOptimize(data.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void power(benchmark::State& state) {
  const auto data = random_values(state.range(0));
  std::vector<cplx> out(data.size());
  for (auto _ : state) {
    Kernel(data, 3, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void reduce(benchmark::State& state) {
  const auto data = random_values(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(data));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void strang_step(benchmark::State& state) {
  const auto g = alphamod::make_grid(1, state.range(0), 40.0);
  alphamod::Field u = alphamod::sample(g, alphamod::Gaussian{});
  alphamod::EvolutionConfig cfg;
  cfg.lambda = 1.0;
  cfg.kappa = 1;
  cfg.dt = 1e-4;
  for (auto _ : state) u = alphamod::strang_step(u, cfg);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

#define SIZES RangeMultiplier(8)->Range(1 << 12, 1 << 21)

BENCHMARK(dispersion<k::serial::dispersion_phase>)->Name("dispersion_phase/serial")->SIZES;
BENCHMARK(dispersion<k::dispersion_phase>)->Name("dispersion_phase/parallel")->SIZES;
BENCHMARK(nonlinear<k::serial::nonlinear_phase>)->Name("nonlinear_phase/serial")->SIZES;
BENCHMARK(nonlinear<k::nonlinear_phase>)->Name("nonlinear_phase/parallel")->SIZES;
BENCHMARK(power<k::serial::power_nonlinearity>)->Name("power_nonlinearity/serial")->SIZES;
BENCHMARK(power<k::power_nonlinearity>)->Name("power_nonlinearity/parallel")->SIZES;
BENCHMARK(reduce<k::serial::sum_abs2>)->Name("sum_abs2/serial")->SIZES;
BENCHMARK(reduce<k::sum_abs2>)->Name("sum_abs2/parallel")->SIZES;
BENCHMARK(reduce<k::serial::max_abs>)->Name("max_abs/serial")->SIZES;
BENCHMARK(reduce<k::max_abs>)->Name("max_abs/parallel")->SIZES;
BENCHMARK(strang_step)->RangeMultiplier(8)->Range(1 << 12, 1 << 18);

BENCHMARK_MAIN();
