#pragma once

// Shared fixtures for the test suites.

#include <cmath>
#include <numbers>

#include "oddlimit/app.hpp"
#include "oddlimit/orbit.hpp"

namespace oddlimit::testing {

inline LandauParams landau(double alpha, Complex gamma, Complex b, double a = 0.5) {
  return LandauParams{alpha, a, gamma, b};
}

// Anti-phase orbit close to its Hopf point with weak coupling: the
// multipliers stay small enough that integration error does not swamp
// multi-period delay runs.
inline LandauParams mild_landau(Complex b) { return LandauParams{0.09, 0.05, {1.0, 1.0}, b}; }

// Landau anti-phase expression written out by hand:
// 1 + pi (Re g Re b + Im g Im b) / (w Re g), w = 1 + r^2 Im g, r^2 = (2a - alpha)/Re g.
inline double landau_closed_form(const LandauParams& p, double factor = 1.0) {
  const double r2 = (2.0 * p.a - p.alpha) / p.gamma.real();
  const double w = 1.0 + r2 * p.gamma.imag();
  return 1.0 + factor * std::numbers::pi *
                   (p.gamma.real() * p.b.real() + p.gamma.imag() * p.b.imag()) /
                   (w * p.gamma.real());
}

// The laser reference orbit is expensive enough to share within a process.
inline const ShootingResult& laser_orbit() {
  static const ShootingResult r = laser_reference_orbit(LaserParams{});
  return r;
}

inline LaserModel laser_model_at(double b0, double beta) {
  LaserParams p;
  p.omega = *laser_orbit().omega;
  p.b0 = b0;
  p.beta = beta;
  return laser_system_rotating(p);
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1e-300, std::abs(b));
}

}  // namespace oddlimit::testing
