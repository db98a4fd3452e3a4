#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "bonefrag/mesh_geometry.hpp"

using namespace bonefrag;

namespace {

// Closed UV sphere with roughly 2 * rings * segments faces.
TriangleMesh sphere(int rings, int segments) {
  std::vector<Vec3> v{{0, 0, 1}};
  for (int r = 1; r < rings; ++r) {
    const double th = std::numbers::pi * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double ph = 2 * std::numbers::pi * s / segments;
      v.emplace_back(3.0 * std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
    }
  }
  v.emplace_back(0, 0, -1);
  const auto at = [&](int r, int s) { return static_cast<std::uint32_t>(1 + (r - 1) * segments + (s % segments)); };
  std::vector<Face> f;
  for (int s = 0; s < segments; ++s) f.push_back({0, at(1, s), at(1, s + 1)});
  for (int r = 1; r + 1 < rings; ++r)
    for (int s = 0; s < segments; ++s) {
      f.push_back({at(r, s), at(r + 1, s), at(r + 1, s + 1)});
      f.push_back({at(r, s), at(r + 1, s + 1), at(r, s + 1)});
    }
  const auto south = static_cast<std::uint32_t>(v.size() - 1);
  for (int s = 0; s < segments; ++s) f.push_back({south, at(rings - 1, s + 1), at(rings - 1, s)});
  return TriangleMesh(std::move(v), std::move(f));
}

void BM_EnclosedVolume(benchmark::State& state) {
  const TriangleMesh m = sphere(static_cast<int>(state.range(0)), 2 * static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(enclosed_volume(m));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(m.faces().size()));
}
BENCHMARK(BM_EnclosedVolume)->Arg(32)->Arg(128)->Arg(512);

void BM_SurfaceArea(benchmark::State& state) {
  const TriangleMesh m = sphere(static_cast<int>(state.range(0)), 2 * static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(surface_area(m));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(m.faces().size()));
}
BENCHMARK(BM_SurfaceArea)->Arg(128)->Arg(512);

void BM_FrameAndBox(benchmark::State& state) {
  const TriangleMesh m = sphere(static_cast<int>(state.range(0)), 2 * static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const PrincipalFrame f = principal_frame(m);
    benchmark::DoNotOptimize(bounding_box_dims(m, f));
  }
}
BENCHMARK(BM_FrameAndBox)->Arg(128)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
