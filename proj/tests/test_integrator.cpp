#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oddlimit/integrator.hpp"
#include "support.hpp"

using namespace oddlimit;

namespace {

const TimeField oscillator = [](double, const Vec& y, Vec& dy) {
  dy.resize(2);
  dy << y[1], -y[0];
};

}  // namespace

TEST_CASE("harmonic oscillator after one period") {
  Vec y0(2);
  y0 << 1.0, 0.0;
  auto tr = integrate(oscillator, y0, 0.0, 2.0 * std::numbers::pi);
  CHECK((tr.final_state() - y0).norm() < 1e-8);
  CHECK(tr.t1() == 2.0 * std::numbers::pi);
}

TEST_CASE("dense output is exact at step endpoints and continuous at joins") {
  Vec y0(2);
  y0 << 0.3, -1.1;
  auto tr = integrate(oscillator, y0, 0.0, 20.0);
  const auto& segs = tr.segments();
  REQUIRE(segs.size() > 10);
  CHECK((tr.eval(0.0) - y0).norm() == 0.0);
  for (std::size_t k = 0; k + 1 < segs.size(); ++k) {
    CHECK((tr.eval(segs[k + 1].t0) - segs[k + 1].start()).norm() == 0.0);
    CHECK((segs[k].eval(segs[k].t1()) - segs[k + 1].start()).norm() < 1e-12);
  }
  CHECK((tr.eval(20.0) - tr.final_state()).norm() == 0.0);
}

TEST_CASE("interpolant error stays near the tolerance") {
  Vec y0(2);
  y0 << 1.0, 0.0;
  IntegratorOptions o;
  o.rtol = o.atol = 1e-10;
  auto tr = integrate(oscillator, y0, 0.0, 10.0, o);
  double worst = 0.0;
  for (int k = 0; k <= 997; ++k) {
    const double t = 10.0 * k / 997.0;
    Vec exact(2);
    exact << std::cos(t), -std::sin(t);
    worst = std::max(worst, (tr.eval(t) - exact).norm());
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("tightening the tolerance reduces the endpoint error") {
  Vec y0(2);
  y0 << 1.0, 0.0;
  double prev = 1.0;
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    IntegratorOptions o;
    o.rtol = o.atol = tol;
    auto tr = integrate(oscillator, y0, 0.0, 2.0 * std::numbers::pi, o);
    const double err = (tr.final_state() - y0).norm();
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("landau anti-phase state returns after one period") {
  auto p = testing::landau(0.25, {1, 1}, {0, 0});
  auto m = landau_system(p);
  const double r = p.antiphase_radius();
  Vec x0(4);
  x0 << r, 0, -r, 0;
  const double T = 2.0 * std::numbers::pi / p.antiphase_omega();
  auto tr = integrate(m.system, x0, 0.0, T);
  CHECK((tr.final_state() - x0).norm() < 1e-8);
}

TEST_CASE("finite-time blow-up reports its time") {
  TimeField blow = [](double, const Vec& y, Vec& dy) {
    dy.resize(1);
    dy[0] = y[0] * y[0];
  };
  Vec y0(1);
  y0 << 1.0;
  try {
    integrate(blow, y0, 0.0, 2.0);
    FAIL("expected an integration error");
  } catch (const IntegrationError& e) {
    CHECK(e.time() == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("evaluation outside the span is a precondition error") {
  Vec y0(2);
  y0 << 1.0, 0.0;
  auto tr = integrate(oscillator, y0, 0.0, 1.0);
  CHECK_THROWS_AS(tr.eval(1.5), PreconditionError);
  CHECK_THROWS_AS(integrate(oscillator, y0, 1.0, 1.0), PreconditionError);
}

TEST_CASE("mapped trajectory is the linear image with shifted times") {
  Vec y0(2);
  y0 << 1.0, 0.0;
  auto tr = integrate(oscillator, y0, 0.0, 3.0);
  Mat a(2, 2);
  a << 0, 2, -1, 0;
  auto m = tr.mapped(a, 5.0);
  CHECK(m.t0() == 5.0);
  CHECK(m.t1() == 8.0);
  for (double t : {0.0, 0.37, 1.9, 3.0}) CHECK((m.eval(t + 5.0) - a * tr.eval(t)).norm() < 1e-14);
}

TEST_CASE("composite Gauss is exact for degree nine") {
  std::vector<double> mesh{0.0, 0.3, 1.1, 2.0};
  auto poly = [](double t) { return std::pow(t, 9) - 3.0 * std::pow(t, 4) + t; };
  const double exact = std::pow(2.0, 10) / 10.0 - 3.0 * std::pow(2.0, 5) / 5.0 + 2.0;
  CHECK(composite_gauss(mesh, 1, 0.0, poly) == doctest::Approx(exact).epsilon(1e-13));
  CHECK(composite_gauss(mesh, 3, 0.0, poly) == doctest::Approx(exact).epsilon(1e-13));
}
