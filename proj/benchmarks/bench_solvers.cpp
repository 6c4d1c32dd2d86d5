#include <benchmark/benchmark.h>

#include "pnp/solver.hpp"
#include "pnp/tuning.hpp"

namespace {

struct Fixture {
  pnp::ForwardModel model;
  pnp::MeasurementVector y;
  pnp::DenoiserPtr denoiser;
};

Fixture fourier_fixture(int n) {
  auto model = pnp::ForwardModel::masked_fourier(pnp::make_radial_mask(n, n, 1.0 / 3.0));
  pnp::Image truth = pnp::Image::zeros(n, n, 1);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      truth.at(0, y, x) = 30.0 + (((x / 10) + (y / 10)) % 2) * 160.0;
  auto problem = pnp::simulate_problem(truth, model, 30.0, 5);
  return {std::move(model), std::move(problem.y),
          pnp::make_tv_prox_denoiser({1.5, 60, 1e-8})};
}

void BM_FourierApplyAdjoint(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto fx = fourier_fixture(n);
  pnp::Image x = fx.model.adjoint(fx.y);
  for (auto _ : state) {
    pnp::Image out = fx.model.adjoint(fx.model.apply(x));
    benchmark::DoNotOptimize(out.data.data());
  }
}
BENCHMARK(BM_FourierApplyAdjoint)->Arg(64)->Arg(256);

void BM_FourierProx(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto fx = fourier_fixture(n);
  pnp::Image z = fx.model.adjoint(fx.y);
  for (auto _ : state) {
    pnp::Image out = fx.model.prox_g(z, 1.0, fx.y);
    benchmark::DoNotOptimize(out.data.data());
  }
}
BENCHMARK(BM_FourierProx)->Arg(64)->Arg(256);

void BM_BlurProxCg(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto model = pnp::ForwardModel::blur_downsample(n, n, pnp::gaussian_blur_kernel(), 2);
  pnp::Image truth = pnp::Image::constant(n, n, 1, 100.0);
  auto problem = pnp::simulate_problem(truth, model, 35.0, 6);
  pnp::Image z = model.adjoint(problem.y);
  for (auto _ : state) {
    pnp::Image out = model.prox_g(z, 1.0, problem.y);
    benchmark::DoNotOptimize(out.data.data());
  }
}
BENCHMARK(BM_BlurProxCg)->Arg(64)->Arg(128);

void BM_FistaIterations(benchmark::State& state) {
  auto fx = fourier_fixture(64);
  pnp::SolverConfig config;
  config.max_iters = static_cast<int>(state.range(0));
  config.fp_tol = 0.0;  // run the full budget
  for (auto _ : state) {
    auto result = pnp::pnp_ista(fx.model, fx.y, fx.denoiser, config);
    benchmark::DoNotOptimize(result.x_final.data.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FistaIterations)->Arg(10)->Arg(50);

void BM_AdmmIterations(benchmark::State& state) {
  auto fx = fourier_fixture(64);
  pnp::SolverConfig config;
  config.max_iters = static_cast<int>(state.range(0));
  config.fp_tol = 0.0;
  for (auto _ : state) {
    auto result = pnp::pnp_admm(fx.model, fx.y, fx.denoiser, config);
    benchmark::DoNotOptimize(result.x_final.data.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AdmmIterations)->Arg(10)->Arg(50);

}  // namespace
