#pragma once

// Variational equation along a stored orbit, its mu-deformed version
// Y' = (B(t) + (1/mu - 1) K) Y, and the adjoint equation y' = -B(t)^T y.

#include <optional>

#include "oddlimit/dynsys.hpp"
#include "oddlimit/integrator.hpp"
#include "oddlimit/orbit.hpp"

namespace oddlimit {

// Matrix-valued dense solution; stored column-major in a flat trajectory.
class MatrixTrajectory {
 public:
  MatrixTrajectory() = default;
  MatrixTrajectory(int n, DenseTrajectory flat) : n_(n), flat_(std::move(flat)) {}

  int n() const { return n_; }
  double t0() const { return flat_.t0(); }
  double t1() const { return flat_.t1(); }
  Mat eval(double t) const;
  Mat final_value() const;
  std::vector<double> mesh() const { return flat_.mesh(); }
  const DenseTrajectory& flat() const { return flat_; }

 private:
  int n_ = 0;
  DenseTrajectory flat_;
};

// Max step T/200 along an orbit of period T at the given tolerance, no blow-up bound.
IntegratorOptions orbit_options(const Orbit& orbit, double tol = 1e-10);

// Solves Y' = (B(t) + (1/mu - 1) K) Y on [t0, t1] with Y(t0) = Id and
// B(t) = Df(x*(t)). Without mu (or with K absent) this is the fundamental matrix.
MatrixTrajectory fundamental_matrix(const SystemDef& sys, const Orbit& orbit, double t0, double t1,
                                    std::optional<double> mu, const GainMatrix* gain,
                                    const IntegratorOptions& opts);

inline MatrixTrajectory fundamental_matrix(const SystemDef& sys, const Orbit& orbit, double t_end,
                                           const IntegratorOptions& opts) {
  return fundamental_matrix(sys, orbit, 0.0, t_end, std::nullopt, nullptr, opts);
}

// y' = -B(t)^T y, y(t0) = y0 on [t0, t1].
DenseTrajectory adjoint_trajectory(const SystemDef& sys, const Orbit& orbit, const Vec& y0,
                                   double t0, double t1, const IntegratorOptions& opts);

}  // namespace oddlimit
