#include <benchmark/benchmark.h>

#include <random>

#include "motionrig/alignment.hpp"
#include "motionrig/metrics.hpp"
#include "motionrig/projection.hpp"
#include "motionrig/render.hpp"
#include "motionrig/retarget.hpp"
#include "motionrig/synthetic.hpp"

using namespace motionrig;

namespace {

KeypointFrame random_frame(const SkeletonTopology& t, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  auto f = KeypointFrame::absent(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    f.positions[k] = {u(rng), u(rng)};
    f.confidence[k] = 1.0;
  }
  return f;
}

Image noise_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Image img(w, h);
  for (auto& b : img.bytes()) b = static_cast<std::uint8_t>(rng());
  return img;
}

void BM_RetargetFrame(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto& t = *topologies::full();
  const auto profile = measure_profile(random_frame(t, rng), t);
  const auto frame = random_frame(t, rng);
  for (auto _ : state) benchmark::DoNotOptimize(retarget_frame(frame, profile, t));
}
BENCHMARK(BM_RetargetFrame);

void BM_FitY(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> yd(18), yr(18);
  for (std::size_t i = 0; i < 18; ++i) {
    yd[i] = u(rng);
    yr[i] = 1.5 * yd[i] + 0.1 * u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_y(yd, yr));
}
BENCHMARK(BM_FitY);

void BM_Project(benchmark::State& state) {
  const auto clip = synthetic::generate_motion("walk", 0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(project(clip, {}, topologies::body18()));
}
BENCHMARK(BM_Project)->Arg(40)->Arg(400);

void BM_RenderFrame(benchmark::State& state) {
  const auto ref = synthetic::reference_pose();
  for (auto _ : state) benchmark::DoNotOptimize(render_frame(ref.frame, *ref.topology, {}, ref.image_size));
}
BENCHMARK(BM_RenderFrame)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const Image a = noise_image(side, side, 3), b = noise_image(side, side, 4);
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
}
BENCHMARK(BM_Ssim)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
