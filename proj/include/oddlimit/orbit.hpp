#pragma once

// Periodic orbits: dense representation, the Landau closed forms and Newton
// shooting (plain, symmetry-reduced over [0, T_g], and with a rotation
// frequency as an extra unknown for relative periodic orbits).

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oddlimit/dynsys.hpp"
#include "oddlimit/integrator.hpp"

namespace oddlimit {

class Orbit {
 public:
  using StateFn = std::function<Vec(double)>;

  Orbit() = default;
  // Orbit backed by a dense trajectory covering [0, period].
  Orbit(double period, DenseTrajectory traj, VectorField rhs, std::optional<double> omega = {});
  // Orbit given in closed form; `mesh_intervals` uniform intervals are used for quadrature.
  Orbit(double period, StateFn exact, VectorField rhs, int mesh_intervals = 400,
        std::optional<double> omega = {});

  int dim() const { return dim_; }
  double period() const { return period_; }
  std::optional<double> omega() const { return omega_; }
  bool closed_form() const { return static_cast<bool>(exact_); }

  // x*(t); t is reduced modulo the period except that t = period itself is
  // evaluated at the end of the stored data (so closure defects stay visible).
  Vec state(double t) const;
  Vec deriv(double t) const { return rhs_(state(t)); }

  // Break points of the interpolant inside [0, period], including both ends.
  std::vector<double> mesh() const;

  // x(t) -> x*(t + tau).
  Orbit shifted(double tau) const;
  // x(t) -> G x*(t).
  Orbit transformed(const Mat& g) const;

  double closure_defect() const;
  // Largest |d/dt x*(t) - f(x*(t))| over `samples` interior times (central differences).
  double ode_residual(int samples = 50) const;

  const DenseTrajectory* trajectory() const { return traj_.get(); }
  const VectorField& rhs() const { return rhs_; }

 private:
  Vec base(double t) const;

  int dim_ = 0;
  double period_ = 0.0;
  std::shared_ptr<const DenseTrajectory> traj_;
  StateFn exact_;
  int mesh_intervals_ = 400;
  VectorField rhs_;
  std::optional<double> omega_;
  double offset_ = 0.0;
  Mat transform_;  // empty means identity
};

// Anti-phase branch z1 = -z2 = r exp(i w t). Requires alpha < 2a.
Orbit landau_antiphase_orbit(const LandauParams& p);
// Synchronized branch z1 = z2 = r exp(i w t). Requires alpha < 0.
Orbit landau_synchronized_orbit(const LandauParams& p);

struct ShootingProblem {
  SystemDef sys;
  Vec guess;
  double period_guess = 0.0;
  // Reduced shooting A^{-1} x(T_g) = x(0); period_guess is then the guess for T_g.
  std::optional<SymmetryAction> symmetry;
  // Fixed phase directions. Empty: use f(x0) (and J x0) at the current iterate.
  std::vector<Vec> phase_anchors;
  // Relative periodic orbit: frequency of the co-rotating frame is an unknown.
  // sys must be the system written in the frame rotating with omega_guess.
  std::optional<S1Generator> rotation;
  double omega_guess = 0.0;
  int max_iterations = 25;
};

struct ShootingResult {
  Orbit orbit;
  Vec x0;
  double period = 0.0;  // full period
  double shift = 0.0;   // T_g for reduced shooting, otherwise the period
  std::optional<double> omega;
  SystemDef system;     // system in the converged frame
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> corrections;  // |delta| per Newton step
};

ShootingResult solve_shooting(const ShootingProblem& p, double tol = 1e-10,
                              const IntegratorOptions& integ = {});

// Same system written in a frame rotating faster by d_omega: f(x) - d_omega J x.
SystemDef reframe(const SystemDef& sys, const S1Generator& rotation, double d_omega);

struct GroupOrbitCheck {
  double max_residual = 0.0;  // ODE residual of exp(theta J) x* over the sampled theta
  double angle = 0.0;         // angle between x*'(0) and J x*(0), radians
  bool relative_equilibrium = false;
};

GroupOrbitCheck orbit_group_orbit_check(const Orbit& o, const S1Generator& g,
                                        const std::vector<double>& thetas = {0.0, 0.7, 2.1, 4.0},
                                        double angle_tol = 1e-4);

// Reference relative periodic orbit of the laser model at the default LaserParams.
ShootingResult laser_reference_orbit(const LaserParams& p, double tol = 1e-10);

// Versioned text form of an orbit (period, omega, mesh states and interpolation
// coefficients, all as hexadecimal floating point so the round trip is exact).
std::string orbit_to_text(const Orbit& o);
Orbit orbit_from_text(const std::string& text, VectorField rhs);
void save_orbit(const std::string& path, const Orbit& o);
Orbit load_orbit(const std::string& path, VectorField rhs);

}  // namespace oddlimit
