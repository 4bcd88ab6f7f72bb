#include "crossq/baseline.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace crossq;

namespace {

SimConfig sim() { return SimConfig{}; }

IntersectionConfig geom(double L = 32.0) {
  IntersectionConfig ic;
  ic.control_zone_length = L;
  ic.merging_zone_length = 18.0;
  return ic;
}

// -- exact polynomial arithmetic for the energy integral ---------------------

using Poly = std::vector<double>;  // coefficients, lowest power first

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly poly_deriv(const Poly& a) {
  if (a.size() <= 1) return {0.0};
  Poly out(a.size() - 1, 0.0);
  for (std::size_t i = 1; i < a.size(); ++i) out[i - 1] = a[i] * i;
  return out;
}

double poly_integral(const Poly& a, double lo, double hi) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    sum += a[i] * (std::pow(hi, i + 1) - std::pow(lo, i + 1)) / (i + 1);
  return sum;
}

double poly_eval(const Poly& a, double t) {
  double v = 0.0;
  for (std::size_t i = a.size(); i-- > 0;) v = v * t + a[i];
  return v;
}

TEST(Solve, CruiseCaseHasZeroControl) {
  auto sc = sim();
  // t* - t0 = L / v0: the constant-speed solution meets all four conditions
  auto tr = solve_trajectory(1.0, 10.0, 1.0 + 3.2, 32.0, sc);
  EXPECT_NEAR(tr.a, 0.0, 1e-10);
  EXPECT_NEAR(tr.b, 0.0, 1e-10);
  EXPECT_NEAR(tr.c, 10.0, 1e-9);
  for (double t = 1.0; t <= 4.2; t += 0.3) {
    EXPECT_NEAR(tr.control(t), 0.0, 1e-9);
    EXPECT_NEAR(tr.speed(t), 10.0, 1e-9);
  }
}

TEST(Solve, FourByFourSystemSatisfiesBoundaries) {
  auto sc = sim();
  auto tr = solve_trajectory(0.0, 10.0, 12.0, 100.0, sc);
  // substitution check of all four boundary conditions
  EXPECT_NEAR(tr.position(0.0), 0.0, 1e-9);
  EXPECT_NEAR(tr.speed(0.0), 10.0, 1e-9);
  EXPECT_NEAR(tr.position(12.0), 100.0, 1e-9 * 100.0);
  EXPECT_NEAR(tr.control(12.0), 0.0, 1e-9);
  // independent closed form: a = 3 (v0 T - L) / T^3, b = 3 (L - v0 T) / T^2
  const double T = 12.0;
  EXPECT_NEAR(tr.a, 3.0 * (10.0 * T - 100.0) / (T * T * T), 1e-9);
  EXPECT_NEAR(tr.b, 3.0 * (100.0 - 10.0 * T) / (T * T), 1e-9);
}

TEST(Solve, TerminalControlAlwaysZero) {
  auto sc = sim();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> v0d(5.0, 15.0);
  std::uniform_real_distribution<double> t0d(0.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double t0 = t0d(rng);
    const double v0 = v0d(rng);
    const double t_min = earliest_feasible_time(t0, v0, 100.0, sc);
    const double t_star = t_min + std::uniform_real_distribution<double>(0.1, 8.0)(rng);
    auto tr = solve_trajectory(t0, v0, t_star, 100.0, sc);
    EXPECT_NEAR(tr.control(t_star), 0.0, 1e-8);
    EXPECT_NEAR(tr.position(t0), 0.0, 1e-7);
    EXPECT_NEAR(tr.speed(t0), v0, 1e-8);
    EXPECT_NEAR(tr.position(t_star), 100.0, 1e-6);
  }
}

TEST(Solve, InfeasibleTimeRejected) {
  auto sc = sim();
  const double t_min = earliest_feasible_time(0.0, 5.0, 100.0, sc);
  EXPECT_THROW(solve_trajectory(0.0, 5.0, t_min - 0.5, 100.0, sc),
               InfeasibleTimeError);
  EXPECT_THROW(solve_trajectory(3.0, 10.0, 3.0, 100.0, sc), InfeasibleTimeError);
}

TEST(Solve, TightScheduleWarnsOnBounds) {
  auto sc = sim();
  auto tr = solve_trajectory(0.0, 5.0, 3.3, 32.0, sc);
  check_bounds(tr, sc);
  EXPECT_FALSE(tr.bounds_ok);
  EXPECT_FALSE(tr.warnings.empty());

  auto ok = solve_trajectory(0.0, 10.0, 4.0, 32.0, sc);
  check_bounds(ok, sc);
  EXPECT_TRUE(ok.bounds_ok);
}

TEST(Solve, EnergyMinimalAmongPerturbations) {
  auto sc = sim();
  struct Case {
    double t0, v0, t_star, L;
  } cases[] = {{0.0, 10.0, 12.0, 100.0}, {2.0, 8.0, 14.0, 100.0},
               {0.0, 12.0, 3.4, 32.0},   {1.0, 6.0, 9.0, 50.0}};
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coef(-0.05, 0.05);

  for (const auto& c : cases) {
    auto tr = solve_trajectory(c.t0, c.v0, c.t_star, c.L, sc);
    const Poly u{tr.b, tr.a};
    const double base_energy = poly_integral(poly_mul(u, u), c.t0, c.t_star);

    for (int k = 0; k < 100; ++k) {
      // eta = (t - t0)^2 (t - t*) (c0 + c1 t) keeps p(t0), v(t0), p(t*)
      // fixed while the terminal speed stays free
      const Poly root0{-c.t0, 1.0};
      const Poly roots = poly_mul(poly_mul(root0, root0), Poly{-c.t_star, 1.0});
      const Poly eta = poly_mul(roots, Poly{coef(rng), coef(rng)});
      const Poly eta_dd = poly_deriv(poly_deriv(eta));
      Poly u_pert = u;
      u_pert.resize(std::max(u.size(), eta_dd.size()), 0.0);
      for (std::size_t i = 0; i < eta_dd.size(); ++i) u_pert[i] += eta_dd[i];

      // boundary conditions still hold for the perturbed trajectory
      EXPECT_NEAR(poly_eval(eta, c.t0), 0.0, 1e-12);
      EXPECT_NEAR(poly_eval(poly_deriv(eta), c.t0), 0.0, 1e-10);
      EXPECT_NEAR(poly_eval(eta, c.t_star), 0.0, 1e-9);

      const double pert_energy =
          poly_integral(poly_mul(u_pert, u_pert), c.t0, c.t_star);
      EXPECT_GE(pert_energy, base_energy - 1e-9 * std::max(1.0, base_energy));
    }
  }
}

TEST(Baseline, SingleVehicleCruisesAndExits) {
  auto sc = sim();
  auto ic = geom(32.0);
  auto res = run_baseline({{1, 0.0, 10.0, Approach::SB}}, ic, sc, 4.0);
  ASSERT_EQ(res.trajectories.size(), 1u);
  const auto& tr = res.trajectories[0];
  EXPECT_NEAR(tr.t_star, 3.2, 1e-9);
  EXPECT_NEAR(tr.v_merge, 10.0, 1e-9);
  EXPECT_NEAR(tr.t_exit, 5.0, 1e-9);  // (32 + 18) / 10
  // never crosses the merging boundary before t*
  for (const auto& s : tr.samples)
    if (s.t < tr.t_star - 1e-9) EXPECT_LT(s.p, 32.0);
}

TEST(Baseline, PositionStrictlyIncreasing) {
  auto sc = sim();
  auto res = run_baseline({{1, 0.0, 10.0, Approach::SB}, {2, 4.0, 5.0, Approach::EB},
                           {3, 9.0, 15.0, Approach::NB}},
                          geom(32.0), sc, 4.0);
  for (const auto& tr : res.trajectories) {
    for (std::size_t k = 1; k < tr.samples.size(); ++k)
      EXPECT_GT(tr.samples[k].p, tr.samples[k - 1].p - 1e-12);
  }
}

TEST(Baseline, ConflictingOccupanciesDisjoint) {
  auto sc = sim();
  auto ic = geom(32.0);
  const double th = 4.0;  // >= D / v_min
  auto res = run_baseline({{1, 0.0, 10.0, Approach::SB}, {2, 0.5, 10.0, Approach::EB},
                           {3, 1.5, 15.0, Approach::WB}, {4, 3.0, 5.0, Approach::NB}},
                          ic, sc, th);
  for (std::size_t i = 0; i < res.trajectories.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const auto& a = res.trajectories[i];
      const auto& b = res.trajectories[j];
      if (!conflicts(a.approach, b.approach)) continue;
      const bool disjoint = a.t_star >= b.t_exit - 1e-9 || b.t_star >= a.t_exit - 1e-9;
      EXPECT_TRUE(disjoint) << "vehicles " << a.id << " and " << b.id;
    }
  }
}

TEST(Baseline, EnvDetectorsSeeNoViolations) {
  auto sc = sim();
  auto ic = geom(32.0);
  auto res = run_baseline({{1, 0.0, 10.0, Approach::SB}, {2, 3.0, 10.0, Approach::EB},
                           {3, 7.0, 10.0, Approach::SB}, {4, 12.0, 10.0, Approach::WB}},
                          ic, sc, 4.0);
  auto frames = baseline_grid_states(res, ic, sc);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    for (bool f : detect_rear_end(frames[k], sc)) EXPECT_FALSE(f);
    if (k > 0) {
      auto lat = detect_lateral(frames[k - 1], frames[k], ic);
      for (int c : lat.case1_count) EXPECT_EQ(c, 0);
    }
  }
}

TEST(Baseline, FuelProxyZeroForCruise) {
  auto sc = sim();
  auto res = run_baseline({{1, 0.0, 10.0, Approach::SB}}, geom(32.0), sc, 4.0);
  EXPECT_NEAR(baseline_fuel_proxy(res.trajectories[0], sc), 0.0, 1e-12);
}

}  // namespace
