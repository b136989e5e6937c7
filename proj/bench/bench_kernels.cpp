#include "rownav/perception.hpp"
#include "rownav/render.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

using namespace rownav;

namespace {

struct Setup {
  Field field = generate_field(FieldSpec{});
  CameraRig rig;
  Pose2 pose{3.0, -1.5, 0.05};
  RenderOptions opts;
  Setup() {
    opts.noise_std = 4.0;
    opts.noise_seed = 11;
  }
};

const Setup& setup() {
  static const Setup s;
  return s;
}

void BM_RenderSerial(benchmark::State& st) {
  const Setup& s = setup();
  for (auto _ : st) benchmark::DoNotOptimize(render_view_serial(s.rig, s.pose, s.field, s.opts));
}

void BM_RenderParallel(benchmark::State& st) {
  const Setup& s = setup();
  omp_set_num_threads(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(render_view(s.rig, s.pose, s.field, s.opts));
}

void BM_ExgSerial(benchmark::State& st) {
  const RgbImage img = render_view(setup().rig, setup().pose, setup().field, setup().opts);
  for (auto _ : st) benchmark::DoNotOptimize(exg_mask_serial(img, 40));
}

void BM_ExgParallel(benchmark::State& st) {
  const RgbImage img = render_view(setup().rig, setup().pose, setup().field, setup().opts);
  omp_set_num_threads(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(exg_mask(img, 40));
}

}  // namespace

BENCHMARK(BM_RenderSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RenderParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ExgSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ExgParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
