#include <cstdio>
#include <numbers>

#include "doctest.h"
#include "support.hpp"

using namespace oddlimit;
using namespace oddlimit::testing;

TEST_CASE("closed-form anti-phase orbit") {
  auto p = landau(0.5, {1, 0}, {0, 0});
  auto o = landau_antiphase_orbit(p);
  CHECK(o.period() == doctest::Approx(2.0 * std::numbers::pi));
  Vec x0(4);
  x0 << std::sqrt(0.5), 0, -std::sqrt(0.5), 0;
  CHECK((o.state(0.0) - x0).norm() < 1e-15);
  for (double t : {0.3, 2.0, 5.9}) {
    const Vec x = o.state(t);
    CHECK(std::abs(x[0] + x[2]) < 1e-15);
    CHECK(std::abs(x[1] + x[3]) < 1e-15);
  }
  auto m = landau_system(p);
  CHECK(o.ode_residual() < 1e-6);
  CHECK((m.swap.matrix * o.state(1.0) - o.state(1.0 + m.swap.shift)).norm() < 1e-14);
  CHECK_THROWS_AS(landau_antiphase_orbit(landau(1.0, {1, 0}, {0, 0})), PreconditionError);
  CHECK_THROWS_AS(landau_synchronized_orbit(landau(0.1, {1, 0}, {0, 0})), PreconditionError);
}

TEST_CASE("shooting from the exact orbit converges in one step") {
  auto p = landau(0.25, {1, 1}, {0, 0});
  auto m = landau_system(p);
  auto exact = landau_antiphase_orbit(p);
  ShootingProblem sp;
  sp.sys = m.system;
  sp.guess = exact.state(0.0);
  sp.period_guess = exact.period();
  auto r = solve_shooting(sp);
  CHECK(r.iterations <= 2);
  CHECK(r.corrections.front() < 1e-9);
  CHECK(std::abs(r.period - exact.period()) < 1e-9);
  CHECK((r.x0 - exact.state(0.0)).norm() < 1e-9);
}

TEST_CASE("reduced and full shooting agree") {
  auto p = landau(0.25, {1, 1}, {0, 0});
  auto m = landau_system(p);
  auto exact = landau_antiphase_orbit(p);
  Vec guess = exact.state(0.0);
  guess[1] += 2e-6;
  guess[2] -= 3e-6;

  ShootingProblem full;
  full.sys = m.system;
  full.guess = guess;
  full.period_guess = exact.period() * (1.0 + 1e-6);
  auto a = solve_shooting(full);

  ShootingProblem reduced = full;
  reduced.symmetry = m.swap;
  reduced.period_guess = 0.5 * exact.period() * (1.0 + 1e-6);
  auto b = solve_shooting(reduced);

  CHECK(std::abs(a.period - exact.period()) < 1e-7);
  CHECK(std::abs(b.period - exact.period()) < 1e-7);
  CHECK(b.shift == doctest::Approx(0.5 * b.period).epsilon(1e-12));
  CHECK(b.orbit.closure_defect() < 1e-7);
  // Both converge onto the orbit; compare up to the phase along it.
  for (const auto* r : {&a, &b}) {
    CHECK(r->orbit.ode_residual() < 1e-5);
    CHECK(std::abs(r->x0.head(2).norm() - p.antiphase_radius()) < 1e-7);
  }
}

TEST_CASE("shooting is idempotent and respects time shifts") {
  const auto& ref = laser_orbit();
  ShootingProblem sp;
  sp.sys = ref.system;
  sp.guess = ref.x0;
  sp.period_guess = ref.period;
  sp.rotation = laser_system_rotating(LaserParams{}).rotation;
  sp.omega_guess = *ref.omega;
  auto again = solve_shooting(sp);
  CHECK(again.corrections.front() < 1e-9);
  CHECK(std::abs(again.period - ref.period) < 1e-9);
  CHECK(std::abs(*again.omega - *ref.omega) < 1e-9);

  sp.guess = ref.orbit.state(0.37 * ref.period);
  auto shifted = solve_shooting(sp);
  CHECK(std::abs(shifted.period - ref.period) < 1e-8);
  CHECK(std::abs(*shifted.omega - *ref.omega) < 1e-8);
}

TEST_CASE("laser reference orbit") {
  const auto& ref = laser_orbit();
  CHECK(ref.period == doctest::Approx(13.3288105758).epsilon(1e-8));
  CHECK(*ref.omega == doctest::Approx(0.315072).epsilon(1e-5));
  CHECK(ref.orbit.closure_defect() < 1e-8);
  CHECK(ref.orbit.ode_residual() < 1e-5);
  CHECK(ref.residual < 1e-9);
  for (double t = 0.0; t < ref.period; t += 0.5) CHECK(ref.orbit.state(t).allFinite());
  LaserParams far;
  far.phi = -0.5;
  CHECK_THROWS_AS(laser_reference_orbit(far), PreconditionError);
}

TEST_CASE("group-orbit check separates relative equilibria") {
  auto p = landau(0.25, {1, 1}, {0, 0});
  auto m = landau_system(p);
  auto lo = landau_antiphase_orbit(p);
  auto g = orbit_group_orbit_check(lo, m.rotation);
  CHECK(g.relative_equilibrium);
  CHECK(g.max_residual < 1e-6);

  const auto& ref = laser_orbit();
  auto h = orbit_group_orbit_check(ref.orbit, laser_system_rotating(LaserParams{}).rotation);
  CHECK_FALSE(h.relative_equilibrium);
  CHECK(h.max_residual < 1e-5);
}

TEST_CASE("relative equilibria make the frequency unknown singular") {
  auto p = landau(0.25, {1, 1}, {0, 0});
  auto m = landau_system(p);
  auto lo = landau_antiphase_orbit(p);
  ShootingProblem sp;
  sp.sys = m.system;
  sp.guess = lo.state(0.0);
  sp.period_guess = lo.period();
  sp.rotation = m.rotation;
  sp.omega_guess = 0.0;
  CHECK_THROWS_AS(solve_shooting(sp), SingularSystemError);
}

TEST_CASE("iteration cap produces a convergence error") {
  auto p = landau(0.25, {1, 1}, {0, 0});
  auto m = landau_system(p);
  auto lo = landau_antiphase_orbit(p);
  ShootingProblem sp;
  sp.sys = m.system;
  sp.guess = lo.state(0.0) * 1.3;
  sp.period_guess = lo.period() * 1.1;
  sp.max_iterations = 1;
  CHECK_THROWS_AS(solve_shooting(sp), ConvergenceError);
}

TEST_CASE("orbit text round trip is bit-exact") {
  const auto& ref = laser_orbit();
  const std::string text = orbit_to_text(ref.orbit);
  CHECK(text.rfind("oddlimit-orbit 1\n", 0) == 0);
  const Orbit back = orbit_from_text(text, ref.system.rhs);
  CHECK(orbit_to_text(back) == text);
  CHECK(back.period() == ref.orbit.period());
  CHECK(*back.omega() == *ref.orbit.omega());
  for (double t : {0.0, 0.1234, 5.0, 13.0, ref.period}) {
    CHECK((back.state(t) - ref.orbit.state(t)).norm() == 0.0);
  }

  const std::string path = "orbit_roundtrip_test.txt";
  save_orbit(path, ref.orbit);
  const Orbit loaded = load_orbit(path, ref.system.rhs);
  CHECK(orbit_to_text(loaded) == text);
  std::remove(path.c_str());
}

TEST_CASE("malformed orbit text is rejected") {
  const auto rhs = laser_orbit().system.rhs;
  CHECK_THROWS_AS(orbit_from_text("oddlimit-orbit 2\n", rhs), ConfigError);
  CHECK_THROWS_AS(orbit_from_text("garbage", rhs), ConfigError);
  std::string text = orbit_to_text(laser_orbit().orbit);
  text.resize(text.size() / 2);
  CHECK_THROWS_AS(orbit_from_text(text, rhs), ConfigError);
  CHECK_THROWS_AS(load_orbit("/nonexistent/orbit.txt", rhs), ConfigError);
}
