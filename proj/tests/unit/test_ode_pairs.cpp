#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "abcheck/ode_pairs.hpp"

using namespace abcheck;
using namespace abcheck::ode;

namespace {

OdeProblem scalar(Rhs f, double u0, double dt, double t_end, double t0 = 0.0) {
  OdeProblem p;
  p.f = std::move(f);
  p.u0 = State({u0});
  p.grid = TimeGrid::covering(t0, t_end, dt);
  return p;
}

Rhs growth() {
  return [](double, std::span<const double> u, std::span<double> out) { out[0] = u[0]; };
}

// Least-squares slope of log(err) against log(h).
double fitted_slope(const std::vector<double>& h, const std::vector<double>& err) {
  const std::size_t n = h.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(h[i]);
    my += std::log(err[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (std::log(h[i]) - mx) * (std::log(err[i]) - my);
    sxx += (std::log(h[i]) - mx) * (std::log(h[i]) - mx);
  }
  return sxy / sxx;
}

// History of exact exp values ending at t = 0 for an order-p multistep step.
LmmHistory exact_history(const OdeProblem& problem, std::size_t p) {
  LmmHistory h;
  h.order = p;
  for (std::size_t i = 0; i < p; ++i) {
    const double t = problem.grid.t(i);
    h.states.push_back(State({std::exp(t)}));
    if (i + 1 < p) h.derivatives.push_back(State({std::exp(t)}));
  }
  h.newest_index = p - 1;
  return h;
}

}  // namespace

TEST(RkTableau, BuiltinsAreValid) {
  for (const auto& t : {RkTableau::fehlberg45(), RkTableau::bogacki_shampine23(),
                        RkTableau::midpoint_euler(), RkTableau::classical_rk4()}) {
    EXPECT_NO_THROW(t.validate()) << t.name;
    EXPECT_NEAR(std::accumulate(t.b.begin(), t.b.end(), 0.0), 1.0, 1e-14);
  }
}

TEST(RkPairStep, ZeroDerivative) {
  auto p = scalar([](double, std::span<const double>, std::span<double> o) { o[0] = 0; }, 3.0,
                  0.1, 1.0);
  const auto out = rk_pair_step(p, RkTableau::fehlberg45(), p.u0, 1);
  EXPECT_EQ(out.base[0], 3.0);
  EXPECT_EQ(out.auxiliary[0], 3.0);
}

TEST(RkPairStep, MidpointEulerHandCase) {
  auto p = scalar(growth(), 1.0, 0.1, 1.0);
  const auto out = rk_pair_step(p, RkTableau::midpoint_euler(), p.u0, 1);
  EXPECT_NEAR(out.auxiliary[0], 1.1, 1e-15);
  EXPECT_NEAR(out.base[0], 1.105, 1e-15);
  EXPECT_NEAR(difference_norm(out.base, out.auxiliary), 0.005, 1e-15);
}

TEST(RkPairStep, Fehlberg45ReachesE) {
  auto stepper = make_ode_stepper("rk45", scalar(growth(), 1.0, 0.1, 1.0));
  while (stepper->steps_taken() < stepper->step_count()) (void)stepper->step(nullptr);
  EXPECT_NEAR(stepper->current()[0], std::exp(1.0), 1e-6);
}

TEST(RkPairStep, EachStageEvaluatedOnce) {
  for (const auto& t : {RkTableau::fehlberg45(), RkTableau::bogacki_shampine23()}) {
    int calls = 0;
    auto p = scalar(
        [&calls](double, std::span<const double> u, std::span<double> o) {
          ++calls;
          o[0] = -u[0];
        },
        1.0, 0.1, 1.0);
    (void)rk_pair_step(p, t, p.u0, 1);
    EXPECT_EQ(calls, static_cast<int>(t.stages())) << t.name;
  }
}

TEST(RkPairStep, OneStepOrders) {
  for (const auto& t : {RkTableau::fehlberg45(), RkTableau::bogacki_shampine23(),
                        RkTableau::midpoint_euler()}) {
    std::vector<double> hs, err_b, diff;
    for (double h : {0.1, 0.05, 0.025, 0.0125}) {
      auto p = scalar(growth(), 1.0, h, 1.0);
      const auto out = rk_pair_step(p, t, p.u0, 1);
      hs.push_back(h);
      err_b.push_back(std::abs(out.base[0] - std::exp(h)));
      diff.push_back(difference_norm(out.base, out.auxiliary));
    }
    EXPECT_NEAR(fitted_slope(hs, err_b), t.order_base + 1, 0.4) << t.name;
    EXPECT_NEAR(fitted_slope(hs, diff), std::min(t.order_base, t.order_aux) + 1, 0.4) << t.name;
  }
}

TEST(AdamsWeights, SumToOne) {
  for (int p = 1; p <= 5; ++p) {
    const auto ab = adams_bashforth_weights(p);
    const auto am = adams_moulton_weights(p);
    EXPECT_NEAR(std::accumulate(ab.begin(), ab.end(), 0.0), 1.0, 1e-14) << p;
    EXPECT_NEAR(std::accumulate(am.begin(), am.end(), 0.0), 1.0, 1e-14) << p;
  }
}

TEST(AbPairStep, ConstantDerivative) {
  auto p = scalar([](double, std::span<const double>, std::span<double> o) { o[0] = 2.0; }, 1.0,
                  0.1, 1.0);
  auto hist = bootstrap_history(p, 5);
  const State before = hist.states.back();
  const auto out = ab_pair_step(p, hist, 4, 5);
  EXPECT_NEAR(out.base[0], before[0] + 0.2, 1e-14);
  EXPECT_NEAR(out.auxiliary[0], out.base[0], 1e-14);
}

TEST(AbPairStep, Ab12HandCase) {
  auto p = scalar([](double t, std::span<const double>, std::span<double> o) { o[0] = t; }, 0.0,
                  1.0, 5.0, -1.0);
  LmmHistory h;
  h.order = 2;
  h.states = {State({-0.5}), State({0.0})};
  h.derivatives = {State({-1.0})};
  h.newest_index = 1;
  const auto out = ab_pair_step(p, h, 1, 2);
  EXPECT_DOUBLE_EQ(out.base[0], 0.5);
  EXPECT_DOUBLE_EQ(out.auxiliary[0], 0.0);
  EXPECT_DOUBLE_EQ(difference_norm(out.base, out.auxiliary), 0.5);
  EXPECT_EQ(h.states.size(), 2u);
  EXPECT_EQ(h.newest_index, 2u);
}

TEST(AbPairStep, OneStepOrders) {
  struct Pair {
    int aux, base;
  };
  for (const auto [pa, pb] : {Pair{1, 2}, Pair{2, 3}, Pair{4, 5}}) {
    std::vector<double> hs, err_b, diff;
    for (double h : {0.1, 0.05, 0.025, 0.0125}) {
      auto p = scalar(growth(), 1.0, h, 1.0);
      auto hist = exact_history(p, static_cast<std::size_t>(pb));
      const double t_new = p.grid.t(static_cast<std::size_t>(pb));
      const auto out = ab_pair_step(p, hist, pa, pb);
      hs.push_back(h);
      err_b.push_back(std::abs(out.base[0] - std::exp(t_new)));
      diff.push_back(difference_norm(out.base, out.auxiliary));
    }
    EXPECT_NEAR(fitted_slope(hs, err_b), pb + 1, 0.4) << pb;
    EXPECT_NEAR(fitted_slope(hs, diff), pa + 1, 0.4) << pa;
  }
}

TEST(AmBase, LinearClosedForm) {
  const double lambda = -3.0;
  const double h = 0.1;
  auto p = scalar([=](double, std::span<const double> u, std::span<double> o) { o[0] = lambda * u[0]; },
                  1.0, h, 1.0);
  auto hist = bootstrap_history(p, 2);
  const double u1 = hist.states.back()[0];
  const auto out = am_base_ab_aux_step(p, hist, 2);
  EXPECT_NEAR(out.base[0], u1 * (1 + h * lambda / 2) / (1 - h * lambda / 2), 1e-13);
}

TEST(AmBase, ZeroDerivative) {
  auto p = scalar([](double, std::span<const double>, std::span<double> o) { o[0] = 0; }, 2.0,
                  0.1, 1.0);
  auto hist = bootstrap_history(p, 3);
  const auto out = am_base_ab_aux_step(p, hist, 3);
  EXPECT_EQ(out.base[0], 2.0);
  EXPECT_EQ(out.auxiliary[0], 2.0);
}

TEST(AmBase, StiffStaysBoundedWhileForwardEulerDiverges) {
  auto p = problems::stiff_cosine(0.01, 1.0);
  auto stepper = make_ode_stepper("am-ab:2", p);
  double fe = p.u0[0];
  // The explicit RK4 start-up step amplifies by |R(-10)| ~ 291; the trapezoid
  // steps after it contract by 2/3, so look past the transient.
  double max_am = 0.0;
  for (std::size_t k = 1; k <= 100; ++k) {
    const auto out = stepper->step(nullptr);
    if (k >= 30) max_am = std::max(max_am, std::abs(out.base[0]));
    fe += 0.01 * (-1000.0 * (fe - std::cos(p.grid.t(k - 1))));
  }
  EXPECT_LT(max_am, 1.5);
  EXPECT_GT(std::abs(fe), 1e10);
}

TEST(Extrapolation, Cases) {
  const State s({1.5, -2.0});
  EXPECT_EQ(extrapolation_aux(s, s), s);
  EXPECT_EQ(extrapolation_aux(State({2.0}), State({1.0}))[0], 3.0);
  for (int i = 2; i < 10; ++i) {
    const State a = extrapolation_aux(State({0.3 * (i - 1)}), State({0.3 * (i - 2)}));
    EXPECT_NEAR(a[0], 0.3 * i, 1e-14);
  }
}

TEST(Bootstrap, Cases) {
  auto zero = scalar([](double, std::span<const double>, std::span<double> o) { o[0] = 0; }, 4.0,
                     0.1, 1.0);
  const auto h1 = bootstrap_history(zero, 1);
  EXPECT_EQ(h1.states.size(), 1u);
  EXPECT_TRUE(h1.derivatives.empty());
  const auto h2 = bootstrap_history(zero, 2);
  ASSERT_EQ(h2.states.size(), 2u);
  EXPECT_EQ(h2.states[0], h2.states[1]);

  auto p = scalar(growth(), 1.0, 0.02, 1.0);
  const auto h5 = bootstrap_history(p, 5);
  ASSERT_EQ(h5.states.size(), 5u);
  ASSERT_EQ(h5.derivatives.size(), 4u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(h5.states[i][0], std::exp(0.02 * i), 1e-9);
  }
}

TEST(OdeSteppers, OpenLoopPurity) {
  for (const char* scheme : {"rk45", "rk23", "rk-midpoint-euler", "ab23", "ab45", "am-ab:3",
                             "extrapolation1"}) {
    auto on = make_ode_stepper(scheme, problems::van_der_pol(2.0, 0.05, 5.0));
    auto off = make_ode_stepper(scheme, problems::van_der_pol(2.0, 0.05, 5.0));
    off->set_auxiliary_enabled(false);
    while (on->steps_taken() < on->step_count()) {
      const auto a = on->step(nullptr);
      const auto b = off->step(nullptr);
      ASSERT_EQ(a.base, b.base) << scheme;
      EXPECT_FALSE(b.checked());
    }
  }
}

TEST(OdeSteppers, AdamsStartupIsUnchecked) {
  auto s = make_ode_stepper("ab45", problems::van_der_pol(2.0, 0.05));
  EXPECT_EQ(s->first_checked_step(), 5u);
  for (std::size_t k = 1; k < 5; ++k) EXPECT_FALSE(s->step(nullptr).checked());
  EXPECT_TRUE(s->step(nullptr).checked());
}

TEST(OdeSteppers, UnknownSchemeRejected) {
  EXPECT_THROW((void)make_ode_stepper("rk99", problems::exponential(0.1, 1.0)), ConfigError);
  EXPECT_THROW((void)make_ode_stepper("am-ab:7", problems::exponential(0.1, 1.0)), ConfigError);
}
