#include <cmath>
#include <random>

#include "doctest.h"
#include "oddlimit/ddesim.hpp"
#include "support.hpp"

using namespace oddlimit;
using namespace oddlimit::testing;

namespace {

double max_drift(const DdeResult& r, const Orbit& o, double t_end) {
  double worst = 0.0;
  for (int k = 0; k <= 400; ++k) {
    const double t = t_end * k / 400.0;
    worst = std::max(worst, (r.eval(t) - o.state(t)).norm());
  }
  return worst;
}

}  // namespace

TEST_CASE("control vanishes on the exact orbit") {
  auto p = mild_landau({0.2, -0.3});
  auto m = landau_system(p);
  auto orbit = landau_antiphase_orbit(p);
  const double t_end = 5.0 * orbit.period();
  auto eq = equivariant_control(m.gain, m.swap);
  CHECK(max_drift(dde_integrate(m.system, eq, orbit_history(orbit, eq.delay), t_end), orbit, t_end) <
        1e-6);
  auto st = standard_control(m.gain, orbit.period());
  CHECK(max_drift(dde_integrate(m.system, st, orbit_history(orbit, st.delay), t_end), orbit, t_end) <
        1e-6);
}

TEST_CASE("zero gain reproduces the uncontrolled flow") {
  auto p = mild_landau({0, 0});
  auto m = landau_system(p);
  auto orbit = landau_antiphase_orbit(p);
  Vec pert(4);
  pert << 1e-3, -2e-3, 0.5e-3, 1e-3;
  auto law = equivariant_control(GainMatrix::zero(4), m.swap);
  auto r = dde_integrate(m.system, law, orbit_history(orbit, law.delay, pert), 8.0);
  auto ode = integrate(m.system, orbit.state(0.0) + pert, 0.0, 8.0);
  for (double t : {0.5, 1.7, 3.0, 8.0}) CHECK((r.eval(t) - ode.eval(t)).norm() < 1e-8);
}

TEST_CASE("history segment is honoured before the first delay") {
  // x' = -x(t - 1) with zero own dynamics: x = 1 - t on [0, 1] for unit history.
  SystemDef sys;
  sys.dim = 1;
  sys.rhs = [](const Vec& x) { return Vec(x * 0.0); };
  sys.jacobian = [](const Vec&) { return Mat(Mat::Zero(1, 1)); };
  ControlLaw law{GainMatrix{Mat::Identity(1, 1)}, -Mat::Identity(1, 1), 1.0};
  HistorySegment h{0.0, 1.0, [](double) { return Vec(Vec::Ones(1)); }};
  // x' = K(A x(t-1) - x(t)) = -1 - x: x(t) = 2 e^{-t} - 1.
  auto r = dde_integrate(sys, law, h, 1.0);
  CHECK(r.eval(1.0)[0] == doctest::Approx(2.0 * std::exp(-1.0) - 1.0).epsilon(1e-9));
}

TEST_CASE("escape is reported instead of thrown") {
  auto p = landau(0.25, {1, 0}, {0, 0});
  auto m = landau_system(p);
  auto orbit = landau_antiphase_orbit(p);
  Vec pert(4);
  pert << 0.5, 0.0, 0.5, 0.0;
  auto law = equivariant_control(GainMatrix::zero(4), m.swap);
  auto r = dde_integrate(m.system, law, orbit_history(orbit, law.delay, pert), 50.0);
  CHECK(r.escaped);
  CHECK(r.escape_time > 0.0);
  CHECK(r.escape_time < 50.0);
}

TEST_CASE("distance to orbit is zero on the orbit and phase-invariant") {
  const auto& ref = laser_orbit();
  auto rot = laser_system_rotating(LaserParams{}).rotation;
  CHECK(distance_to_orbit(ref.orbit.state(3.3), ref.orbit, &rot) < 1e-9);
  CHECK(distance_to_orbit(rot.exp(1.1) * ref.orbit.state(7.0), ref.orbit, &rot) < 1e-9);
  CHECK(distance_to_orbit(rot.exp(1.1) * ref.orbit.state(7.0), ref.orbit, nullptr) > 1e-3);
}

TEST_CASE("laser target is stabilized at the reference gain and not without control") {
  const auto& ref = laser_orbit();
  auto rot = laser_system_rotating(LaserParams{}).rotation;
  auto ctl = laser_model_at(0.3036, 6.0);
  auto law = standard_control(ctl.gain, ref.period);
  auto on = classify_stability(ctl.system, law, ref.orbit, &rot);
  CHECK(on.verdict == Stability::stable);
  CHECK(on.transversal_rate < 0.98);

  auto free = laser_model_at(0.0, 0.0);
  auto off = classify_stability(free.system, standard_control(free.gain, ref.period), ref.orbit,
                                &rot);
  CHECK(off.verdict == Stability::unstable);
  CHECK(off.transversal_rate == doctest::Approx(1.1505).epsilon(0.05));
}

TEST_CASE("dominant multipliers with zero gain equal the twisted monodromy spectrum") {
  auto p = landau(0.25, {1, 0}, {0, 0});
  auto m = landau_system(p);
  auto orbit = landau_antiphase_orbit(p);
  auto law = equivariant_control(GainMatrix::zero(4), m.swap);
  auto res = dominant_multipliers(m.system, law, orbit, 3);
  REQUIRE(res.multipliers.size() == 3);
  const double r2 = 0.75, tg = std::numbers::pi;
  CHECK(rel_err(res.multipliers[0].real(), -std::exp((1.0 + 2.0 * r2) * tg)) < 1e-4);
  CHECK(rel_err(res.multipliers[1].real(), std::exp(2.0 * r2 * tg)) < 1e-4);
  CHECK(rel_err(res.multipliers[2].real(), -std::exp(tg)) < 1e-4);
}

TEST_CASE("laser multipliers with and without control") {
  const auto& ref = laser_orbit();
  auto free = laser_model_at(0.0, 0.0);
  auto a = dominant_multipliers(free.system, standard_control(free.gain, ref.period), ref.orbit, 3);
  CHECK(a.converged);
  CHECK(std::abs(a.multipliers[0] - 1.1505) < 2e-3);
  CHECK(std::abs(a.multipliers[1] - 1.0) < 1e-3);
  CHECK(std::abs(a.multipliers[2] - 1.0) < 1e-3);

  auto ctl = laser_model_at(0.3036, 6.0);
  auto b = dominant_multipliers(ctl.system, standard_control(ctl.gain, ref.period), ref.orbit, 4);
  int near_one = 0;
  for (Complex mu : b.multipliers) {
    if (std::abs(mu - 1.0) < 1e-3) {
      ++near_one;
    } else {
      CHECK(std::abs(mu) < 1.0);
    }
  }
  CHECK(near_one == 2);
  CHECK_THROWS_AS(dominant_multipliers(ctl.system, standard_control(ctl.gain, ref.period),
                                       ref.orbit, 9),
                  PreconditionError);
}

TEST_CASE("certificate growth shows up in simulation") {
  auto p = landau(-1.0, {1, 1}, {3.5, 0});
  auto m = landau_system(p);
  auto orbit = landau_antiphase_orbit(p);
  auto ctx = prepare_finite(m.system, orbit, m.swap);
  auto v = evaluate(ctx, m.gain);
  REQUIRE(v.excluded);
  auto mu = find_unstable_root(ctx, m.gain, v);
  REQUIRE(mu);
  StabilityOptions so;
  so.perturb_size = 1e-10;
  so.escape_distance = 1e-3;
  auto cls = classify_stability(m.system, equivariant_control(m.gain, m.swap), orbit, &m.rotation,
                                so);
  CHECK(cls.verdict == Stability::unstable);
  const double expect = std::pow(*mu, orbit.period() / m.swap.shift);
  CHECK(std::abs(cls.transversal_rate / expect - 1.0) < 0.1);
}
