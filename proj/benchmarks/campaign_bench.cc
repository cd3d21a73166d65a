// Copyright 2026 The FMECA Workbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "fmeca/agreement_report.h"
#include "fmeca/persistence.h"
#include "fmeca/risk.h"
#include "test_util.h"

namespace fmeca {
namespace {

Campaign round_of(int summaries) {
  return testing::synthetic_campaign({.summaries = summaries, .reviewers = 3, .flag_prob = 0.15, .seed = 9});
}

void BM_Stage2Matrix(benchmark::State& state) {
  Campaign c = round_of(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(c.stage2_matrix("round-1"));
}
BENCHMARK(BM_Stage2Matrix)->Arg(36)->Arg(360);

void BM_AgreementReport(benchmark::State& state) {
  Campaign c = round_of(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(agreement_report(c, "round-1"));
}
BENCHMARK(BM_AgreementReport)->Arg(36)->Arg(360)->Unit(benchmark::kMillisecond);

void BM_RiskRegister(benchmark::State& state) {
  Campaign c = round_of(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(risk_register(c, "round-1"));
}
BENCHMARK(BM_RiskRegister)->Arg(36)->Arg(360);

void BM_SaveLoadBundle(benchmark::State& state) {
  Campaign c = round_of(static_cast<int>(state.range(0)));
  testing::TempDir tmp;
  int i = 0;
  for (auto _ : state) {
    auto dir = tmp / ("b" + std::to_string(i++));
    save_campaign(c, dir);
    benchmark::DoNotOptimize(load_campaign(dir));
  }
}
BENCHMARK(BM_SaveLoadBundle)->Arg(36)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace fmeca

BENCHMARK_MAIN();
