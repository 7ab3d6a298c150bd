// Serial reference kernels vs the OpenMP batch kernels on the sample-mean
// workloads: GAN loss/gradients, the sgp penalty, and the Gauss-Newton
// Gramian. Run with --benchmark_time_unit=ms; OMP_NUM_THREADS controls the
// parallel side.

#include <benchmark/benchmark.h>

#include <random>

#include "visaddle/parallel.hpp"
#include "visaddle/reference_kernels.hpp"
#include "visaddle/regularization.hpp"

using namespace visaddle;

namespace {

struct Workload {
  Discriminator disc;
  Generator gen;
  SampleSet samples;
  ParameterPoint w;
  SaddleOperator op;

  Workload(Index d_x, Index d_phi, Index n)
      : disc(FeatureMap::tanh_features(d_x, d_phi, 7)),
        gen(d_x, d_x / 2 + 1),
        samples(SampleSet::gaussian(d_x, d_x / 2 + 1, n, n, 11)),
        op(SaddleOperator::gan(disc, gen, samples, Link::softplus_log)) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    Vector theta(gen.d_theta()), phi(d_phi);
    for (Index i = 0; i < theta.size(); ++i) theta(i) = normal(rng);
    for (Index i = 0; i < phi.size(); ++i) phi(i) = normal(rng);
    w = {std::move(theta), std::move(phi)};
  }
};

Workload& workload(const benchmark::State& state) {
  static Workload small(8, 16, 2048);
  static Workload large(32, 48, 8192);
  return state.range(0) == 0 ? small : large;
}

void BM_GanLoss_Reference(benchmark::State& state) {
  Workload& wl = workload(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::gan_loss_and_grads(
        wl.disc, wl.gen, wl.w, wl.samples, Link::softplus_log));
  }
}

void BM_GanLoss_OpenMP(benchmark::State& state) {
  Workload& wl = workload(state);
  par::set_enabled(true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        gan_loss_and_grads(wl.disc, wl.gen, wl.w, wl.samples, Link::softplus_log));
  }
}

void BM_Sgp_Reference(benchmark::State& state) {
  Workload& wl = workload(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reference::sgp_penalty(1.5, wl.disc, wl.gen, wl.w, wl.samples));
  }
}

void BM_Sgp_OpenMP(benchmark::State& state) {
  Workload& wl = workload(state);
  par::set_enabled(true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        penalty_value_and_grads({PenaltyKind::sgp, 1.5, {}}, wl.op, wl.w));
  }
}

void BM_Gramian_Reference(benchmark::State& state) {
  Workload& wl = workload(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reference::gramian(wl.disc, wl.gen, wl.w, wl.samples));
  }
}

void BM_Gramian_OpenMP(benchmark::State& state) {
  Workload& wl = workload(state);
  par::set_enabled(true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gramian(wl.disc, wl.gen, wl.w, wl.samples));
  }
}

}  // namespace

BENCHMARK(BM_GanLoss_Reference)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GanLoss_OpenMP)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sgp_Reference)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sgp_OpenMP)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gramian_Reference)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gramian_OpenMP)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
