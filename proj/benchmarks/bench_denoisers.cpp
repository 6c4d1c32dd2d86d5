#include <benchmark/benchmark.h>

#include "pnp/denoiser.hpp"
#include "pnp/image.hpp"

namespace {

pnp::Image noisy_fixture(int n) {
  pnp::Image img = pnp::Image::zeros(n, n, 1);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      img.at(0, y, x) = 40.0 + (((x / 8) + (y / 8)) % 2) * 150.0;
  return pnp::add_awgn(img, pnp::NoiseSpec{10.0, 7});
}

void BM_TvProx(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  pnp::Image z = noisy_fixture(n);
  for (auto _ : state) {
    auto result = pnp::tv_prox_denoise(z, 8.0, 100, 1e-9);
    benchmark::DoNotOptimize(result.image.data.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_TvProx)->Arg(64)->Arg(128);

void BM_GmmMmse(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  pnp::Image z = noisy_fixture(n);
  pnp::GmmPrior prior{{0.5, 0.3, 0.2}, {40.0, 120.0, 190.0}, {100.0, 400.0, 225.0}};
  for (auto _ : state) {
    pnp::Image out = pnp::gmm_mmse_denoise(z, prior, 100.0);
    benchmark::DoNotOptimize(out.data.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_GmmMmse)->Arg(64)->Arg(256);

void BM_ScaleWrapperOverhead(benchmark::State& state) {
  pnp::Image z = noisy_fixture(64);
  auto scaled = pnp::scale_denoiser(
      pnp::make_gmm_mmse_denoiser({{1.0}, {128.0}, {900.0}}, 100.0), 0.5);
  for (auto _ : state) {
    pnp::Image out = scaled->denoise(z);
    benchmark::DoNotOptimize(out.data.data());
  }
}
BENCHMARK(BM_ScaleWrapperOverhead);

}  // namespace
