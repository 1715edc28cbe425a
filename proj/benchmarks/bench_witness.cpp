// Copyright 2026 The cvwitness Authors
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
#include <benchmark/benchmark.h>

#include "cvwitness/measurement.hpp"
#include "cvwitness/scan.hpp"
#include "cvwitness/states.hpp"

namespace {

using namespace cvw;

void BM_SecondOrderMinorNoon(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    const auto s = noon_state({N}, FockCutoff(N + 1, N + 1));
    const PhasePoint p{Complex(-0.9, 0.1), Complex(0.9, -0.1)};
    const auto w = WidthAssignment::uniform(0.7, 2);
    for (auto _ : st) benchmark::DoNotOptimize(second_order_minor(s, p, w).value);
}
BENCHMARK(BM_SecondOrderMinorNoon)->Arg(1)->Arg(3)->Arg(5);

void BM_SecondOrderMinorCat(benchmark::State& st) {
    const double g = static_cast<double>(st.range(0));
    const int d = default_coherent_cutoff(g);
    const auto s = cat_state({Complex(g, 0), Complex(g, 0), 0.0}, FockCutoff(d, d));
    for (auto _ : st) benchmark::DoNotOptimize(husimi_criterion(s, {Complex(0, g), Complex(0, g)}).value);
}
BENCHMARK(BM_SecondOrderMinorCat)->Arg(1)->Arg(2)->Arg(3);

void BM_MomentMatrixOrderTwo(benchmark::State& st) {
    const auto s = random_haar_state(4, 1, 0, FockCutoff(4, 4));
    for (auto _ : st) benchmark::DoNotOptimize(detect(s, PhasePoint::real(0.5, -0.5), 2, WidthAssignment::uniform(1.0, 6)));
}
BENCHMARK(BM_MomentMatrixOrderTwo);

void BM_GridScan(benchmark::State& st) {
    const auto s = noon_state({3}, FockCutoff(4, 4));
    const auto region = ScanRegion::real_plane({-3, 3, 41}, {-3, 3, 41});
    for (auto _ : st) benchmark::DoNotOptimize(grid_scan(s, region, WidthParam(1), {CriterionKind::Husimi}).rows.size());
}
BENCHMARK(BM_GridScan)->Unit(benchmark::kMillisecond);

void BM_MeasurementDistribution(benchmark::State& st) {
    const auto s = noon_state({3}, FockCutoff(4, 4));
    MeasurementConfig cfg;
    cfg.point = PhasePoint::real(1.0, -1.0);
    cfg.mix = MixSetting::Balanced;
    for (auto _ : st) benchmark::DoNotOptimize(measurement_distribution(s, cfg).data.size());
}
BENCHMARK(BM_MeasurementDistribution);

}  // namespace

BENCHMARK_MAIN();
