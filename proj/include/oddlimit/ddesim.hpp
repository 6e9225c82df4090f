#pragma once

// Controlled delay system x' = f(x) + K (A x(t - d) - x(t)) by the method of
// steps, stability classification of the target orbit by direct simulation,
// and dominant multipliers of the linearized period map.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "oddlimit/dynsys.hpp"
#include "oddlimit/integrator.hpp"
#include "oddlimit/orbit.hpp"

namespace oddlimit {

// Initial function on [t_start - delay, t_start].
struct HistorySegment {
  double t_start = 0.0;
  double delay = 0.0;
  std::function<Vec(double)> eval;
};

struct ControlLaw {
  GainMatrix gain;
  Mat twist;      // A_g; identity for the standard form
  double delay = 0.0;
};

ControlLaw equivariant_control(const GainMatrix& k, const SymmetryAction& g);
ControlLaw standard_control(const GainMatrix& k, double period);

struct DdeResult {
  DenseTrajectory traj;  // starts at history.t_start
  bool escaped = false;
  double escape_time = 0.0;
  Vec eval(double t) const { return traj.eval(t); }
};

DdeResult dde_integrate(const SystemDef& sys, const ControlLaw& law, const HistorySegment& history,
                        double t_end, const IntegratorOptions& opts = {});

HistorySegment orbit_history(const Orbit& orbit, double delay, const Vec& perturbation = {});

enum class Stability { stable, unstable, inconclusive };
std::string to_string(Stability s);

struct StabilityOptions {
  double perturb_size = 1e-3;  // relative to the orbit amplitude
  int horizon = 60;            // periods
  int samples_per_period = 1;
  double stable_below = 0.98;
  double unstable_above = 1.02;
  double escape_distance = 1e-2;  // relative to amplitude: stop, nonlinear regime
  double noise_floor = 1e-9;      // relative to amplitude (capped at 1e-3 perturb_size)
  double tol = 1e-10;
  std::uint64_t seed = 1;
};

struct StabilityClassification {
  Stability verdict = Stability::inconclusive;
  double transversal_rate = 0.0;  // fitted growth factor per period
  int horizon = 0;                // periods actually simulated
  bool escaped = false;
  std::vector<double> times;
  std::vector<double> distances;
};

// Distance from x to {exp(theta J) x*(tau)} minimized over tau (and theta when
// a rotation is given).
double distance_to_orbit(const Vec& x, const Orbit& orbit, const S1Generator* rotation);

StabilityClassification classify_stability(const SystemDef& sys, const ControlLaw& law,
                                           const Orbit& orbit, const S1Generator* rotation,
                                           const StabilityOptions& opts = {});

struct MultiplierOptions {
  int nodes = 128;
  int extra = 4;
  int max_sweeps = 300;
  double drift_tol = 1e-6;
  double tol = 1e-10;
  std::uint64_t seed = 7;
};

struct MultiplierResult {
  std::vector<Complex> multipliers;  // decreasing modulus
  int sweeps = 0;
  bool converged = false;
};

// Dominant multipliers of the linearized map over one delay: history segment
// -> A^{-1} times the solution segment one delay later.
MultiplierResult dominant_multipliers(const SystemDef& sys, const ControlLaw& law,
                                      const Orbit& orbit, int count,
                                      const MultiplierOptions& opts = {});

}  // namespace oddlimit
