#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "oddlimit/variational.hpp"
#include "support.hpp"

using namespace oddlimit;
using namespace oddlimit::testing;

namespace {

// Closed-form normalized adjoint mode of the anti-phase orbit at t = 0.
Vec landau_adjoint0(const LandauParams& p) {
  const double r = p.antiphase_radius();
  const double w = p.antiphase_omega();
  Vec y(4);
  y << -p.gamma.imag(), p.gamma.real(), p.gamma.imag(), -p.gamma.real();
  return y / (2.0 * p.gamma.real() * w * r);
}

Mat rotation4(double th) {
  Mat r = Mat::Zero(4, 4);
  r.block(0, 0, 2, 2) = complex_block(std::polar(1.0, th));
  r.block(2, 2, 2, 2) = complex_block(std::polar(1.0, th));
  return r;
}

}  // namespace

TEST_CASE("twisted monodromy fixes the orbit tangent") {
  for (Complex gamma : {Complex(1, 0), Complex(1, 1)}) {
    auto p = landau(0.25, gamma, {0, 0});
    auto m = landau_system(p);
    auto orbit = landau_antiphase_orbit(p);
    const double tg = m.swap.shift;
    auto phi = fundamental_matrix(m.system, orbit, tg, orbit_options(orbit));
    const Vec psi0 = orbit.deriv(0.0);
    const Vec back = m.swap.inverse() * phi.final_value() * psi0;
    CHECK((back - psi0).norm() < 1e-8 * psi0.norm());
  }
}

TEST_CASE("Liouville: det of the fundamental matrix equals exp of the trace integral") {
  const auto& lo = laser_orbit();
  const SystemDef& sys = lo.system;
  const double T = lo.period;
  auto phi = fundamental_matrix(sys, lo.orbit, T, orbit_options(lo.orbit));
  const double tr = composite_gauss(lo.orbit.mesh(), 2, 0.0, [&](double t) {
    return sys.jacobian(lo.orbit.state(t)).trace();
  });
  CHECK(rel_err(phi.final_value().determinant(), std::exp(tr)) < 1e-7);
}

TEST_CASE("cocycle property") {
  auto p = landau(0.1, {1, 1}, {0, 0});
  auto m = landau_system(p);
  auto orbit = landau_antiphase_orbit(p);
  const auto o = orbit_options(orbit);
  const double t1 = 1.3, t2 = 4.1;
  const Mat a = fundamental_matrix(m.system, orbit, 0.0, t1, std::nullopt, nullptr, o).final_value();
  const Mat b = fundamental_matrix(m.system, orbit, t1, t2, std::nullopt, nullptr, o).final_value();
  const Mat c = fundamental_matrix(m.system, orbit, 0.0, t2, std::nullopt, nullptr, o).final_value();
  CHECK((b * a - c).norm() < 1e-8 * c.norm());
}

TEST_CASE("mu = 1 leaves the variational equation unchanged") {
  auto p = landau(0.1, {1, 0}, {-0.7, 0.2});
  auto m = landau_system(p);
  auto orbit = landau_antiphase_orbit(p);
  const auto o = orbit_options(orbit);
  const Mat plain = fundamental_matrix(m.system, orbit, 2.0, o).final_value();
  const Mat one = fundamental_matrix(m.system, orbit, 0.0, 2.0, 1.0, &m.gain, o).final_value();
  CHECK((plain - one).norm() == 0.0);
  CHECK_THROWS_AS(fundamental_matrix(m.system, orbit, 0.0, 1.0, 2.0, nullptr, o), PreconditionError);
}

TEST_CASE("adjoint of a constant skew system is a rotation") {
  SystemDef sys;
  sys.dim = 2;
  sys.rhs = [](const Vec& x) {
    Vec d(2);
    d << x[1], -x[0];
    return d;
  };
  sys.jacobian = [](const Vec&) {
    Mat b(2, 2);
    b << 0, 1, -1, 0;
    return b;
  };
  Orbit orbit(2.0 * std::numbers::pi, [](double t) {
    Vec x(2);
    x << std::cos(t), -std::sin(t);
    return x;
  }, sys.rhs);
  Vec y0(2);
  y0 << 0.4, 1.0;
  auto y = adjoint_trajectory(sys, orbit, y0, 0.0, 5.0, orbit_options(orbit));
  Mat b(2, 2);
  b << 0, 1, -1, 0;
  const Vec expect = (-b.transpose() * 5.0).exp() * y0;
  CHECK((y.final_state() - expect).norm() < 1e-9);
}

TEST_CASE("adjoint solution equals the inverse-transpose fundamental matrix") {
  auto p = landau(0.3, {1, 1}, {0, 0});
  auto m = landau_system(p);
  auto orbit = landau_antiphase_orbit(p);
  const auto o = orbit_options(orbit);
  Vec y0(4);
  y0 << 0.3, -1.0, 0.2, 0.5;
  const double t = 2.7;
  auto y = adjoint_trajectory(m.system, orbit, y0, 0.0, t, o);
  const Mat phi = fundamental_matrix(m.system, orbit, t, o).final_value();
  const Vec expect = phi.transpose().partialPivLu().solve(y0);
  CHECK((y.final_state() - expect).norm() < 1e-8 * expect.norm());
}

TEST_CASE("landau adjoint mode matches its closed form") {
  for (Complex gamma : {Complex(1, 0), Complex(1, 1), Complex(2, -0.5)}) {
    auto p = landau(0.2, gamma, {0, 0});
    auto m = landau_system(p);
    auto orbit = landau_antiphase_orbit(p);
    const Vec y0 = landau_adjoint0(p);
    CHECK(y0.dot(orbit.deriv(0.0)) == doctest::Approx(1.0).epsilon(1e-12));
    const double tg = m.swap.shift;
    auto y = adjoint_trajectory(m.system, orbit, y0, 0.0, tg, orbit_options(orbit));
    const double w = p.antiphase_omega();
    for (double t : {0.5, 1.4, tg}) {
      const Vec expect = rotation4(w * t) * y0;
      CHECK((y.eval(t) - expect).norm() < 1e-8 * expect.norm());
    }
  }
}
