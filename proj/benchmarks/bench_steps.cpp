// Per-step cost of the base/auxiliary pairs and the detector. Each iteration
// runs a full clean trajectory; items/s is steps per second.

#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <vector>

#include "abcheck/detector.hpp"
#include "abcheck/harness.hpp"
#include "abcheck/ode_pairs.hpp"
#include "abcheck/pde_heat.hpp"
#include "abcheck/pde_ns.hpp"

using namespace abcheck;

namespace {

template <class Make>
void run_trajectory(benchmark::State& state, Make make) {
  std::size_t steps = 0;
  for (auto _ : state) {
    auto stepper = make();
    while (stepper->steps_taken() < stepper->step_count()) {
      auto out = stepper->step(nullptr);
      benchmark::DoNotOptimize(out.base);
      ++steps;
    }
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(steps));
}

void BM_Rk45Vdp(benchmark::State& state) {
  run_trajectory(state, [] {
    return ode::make_ode_stepper("rk45", ode::problems::van_der_pol(2.0, 1.0 / 10));
  });
}
BENCHMARK(BM_Rk45Vdp);

void BM_Ab45Vdp(benchmark::State& state) {
  run_trajectory(state, [] {
    return ode::make_ode_stepper("ab45", ode::problems::van_der_pol(2.0, 1.0 / 20));
  });
}
BENCHMARK(BM_Ab45Vdp);

void BM_HeatFeBe(benchmark::State& state) {
  run_trajectory(state, [] {
    return std::make_unique<heat::HeatPairStepper>(heat::table_config(2, 1.0 / 200),
                                                   heat::HeatScheme::kForwardBackwardEuler);
  });
}
BENCHMARK(BM_HeatFeBe);

void BM_HeatRichardsonCn(benchmark::State& state) {
  run_trajectory(state, [] {
    return std::make_unique<heat::HeatPairStepper>(heat::table_config(2, 1.0 / 200),
                                                   heat::HeatScheme::kRichardsonCrankNicolson);
  });
}
BENCHMARK(BM_HeatRichardsonCn);

void BM_NsCavity(benchmark::State& state) {
  auto p = ns::driven_cavity(2000);
  p.t_end = 0.2;
  run_trajectory(state, [&p] { return std::make_unique<ns::NsPairStepper>(p); });
}
BENCHMARK(BM_NsCavity)->Unit(benchmark::kMillisecond);

void BM_DetectorStep(benchmark::State& state) {
  std::vector<double> d(4096);
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = 1e-4 * (1.0 + 0.3 * std::sin(0.05 * static_cast<double>(i)));
  }
  Detector det;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(det.detect_step(d[i]));
    if (++i == d.size()) {
      i = 0;
      det.reset();
    }
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DetectorStep);

}  // namespace

BENCHMARK_MAIN();
