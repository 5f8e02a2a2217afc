#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "abcheck/detector.hpp"
#include "abcheck/ode_pairs.hpp"
#include "abcheck/pde_ns.hpp"

using namespace abcheck;
using namespace abcheck::ns;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(NsProblem, Validation) {
  auto p = driven_cavity(2000);
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.grid().n_steps, 200u);
  p.dt = 0.1;  // lid CFL 4
  EXPECT_THROW(p.validate(), ConfigError);
  p = driven_cavity(2000);
  p.re = 0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Projection, RestStateStaysAtRest) {
  auto p = driven_cavity(100);
  p.lid_velocity = 0.0;
  p.t_end = 0.2;
  NsPairStepper s(p);
  while (s.steps_taken() < s.step_count()) (void)s.step(nullptr);
  EXPECT_EQ(max_abs(s.fields().u), 0.0);
  EXPECT_EQ(max_abs(s.fields().v), 0.0);
}

TEST(Projection, DivergenceFreeAndBoundedEveryStep) {
  for (double re : {20.0, 2000.0}) {
    const auto p = driven_cavity(re);
    NsPairStepper s(p);
    while (s.steps_taken() < s.step_count()) {
      (void)s.step(nullptr);
      ASSERT_LE(divergence_norm(p, s.fields()), 1e-8) << "Re " << re << " step " << s.steps_taken();
      ASSERT_LE(max_abs(s.fields().u), 1.2 * p.lid_velocity);
      ASSERT_LE(max_abs(s.fields().v), 1.2 * p.lid_velocity);
    }
  }
}

TEST(Projection, LowReynoldsApproachesSteadyState) {
  const auto p = driven_cavity(20);
  NsPairStepper s(p);
  std::vector<double> change;
  while (s.steps_taken() < s.step_count()) {
    const State before = s.current();
    (void)s.step(nullptr);
    change.push_back(difference_norm(s.current(), before));
  }
  for (std::size_t i = change.size() - 20; i < change.size(); ++i) {
    EXPECT_LT(change[i], change[i - 1]) << i;
  }
}

TEST(NsPair, FirstCheckAtStepTwo) {
  NsPairStepper s(driven_cavity(2000));
  EXPECT_FALSE(s.step(nullptr).checked());
  const auto out = s.step(nullptr);
  ASSERT_TRUE(out.checked());
  EXPECT_EQ(out.base.field_count(), 2u);
}

TEST(NsPair, SteadyHistoryExtrapolatesToPreviousState) {
  const ProjectionSolver solver(driven_cavity(20));
  NsFields f = NsFields::zeros(40, 40);
  for (int i = 0; i < 5; ++i) f = projection_step(solver, f);
  const auto r = ns_pair_step(solver, f, &f, 6);
  EXPECT_EQ(r.output.auxiliary, f.velocity_state());
}

TEST(NsPair, OpenLoopPurity) {
  auto p = driven_cavity(2000);
  p.t_end = 0.3;
  NsPairStepper on(p);
  NsPairStepper off(p);
  off.set_auxiliary_enabled(false);
  while (on.steps_taken() < on.step_count()) {
    ASSERT_EQ(on.step(nullptr).base, off.step(nullptr).base);
  }
}

TEST(NsPair, CleanHighReynoldsRunStaysWithinFalsePositiveBudget) {
  NsPairStepper s(driven_cavity(2000));
  Detector det;
  std::size_t flags = 0;
  std::size_t checked = 0;
  while (s.steps_taken() < s.step_count()) {
    const auto out = s.step(nullptr);
    if (!out.checked()) continue;
    const auto v = det.detect_step(difference_norm(out.base, out.auxiliary));
    if (v.warmup) continue;
    ++checked;
    flags += v.flagged ? 1 : 0;
  }
  ASSERT_GT(checked, 0u);
  EXPECT_LE(static_cast<double>(flags) / static_cast<double>(checked), 0.10);
}

TEST(NsPair, FaultTargets) {
  NsPairStepper s(driven_cavity(20));
  EXPECT_FALSE(s.fault_targets(FaultMode::kDerivativeEval).has_value());
  EXPECT_EQ(s.fault_targets(FaultMode::kPreviousSolution)->components, 39u * 40u);
  EXPECT_EQ(s.fault_targets(FaultMode::kLinearRhs)->components, 40u * 40u - 1u);
}
