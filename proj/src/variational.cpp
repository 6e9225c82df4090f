#include "oddlimit/variational.hpp"

#include <algorithm>
#include <limits>

namespace oddlimit {

Mat MatrixTrajectory::eval(double t) const {
  const Vec v = flat_.eval(t);
  return Eigen::Map<const Mat>(v.data(), n_, n_);
}

Mat MatrixTrajectory::final_value() const {
  const Vec v = flat_.final_state();
  return Eigen::Map<const Mat>(v.data(), n_, n_);
}

IntegratorOptions orbit_options(const Orbit& orbit, double tol) {
  IntegratorOptions o;
  o.rtol = tol;
  o.atol = tol;
  o.max_step = orbit.period() / 200.0;
  // Linear equations: large solutions are legitimate growth, not blow-up.
  o.blowup = std::numeric_limits<double>::infinity();
  return o;
}

MatrixTrajectory fundamental_matrix(const SystemDef& sys, const Orbit& orbit, double t0, double t1,
                                    std::optional<double> mu, const GainMatrix* gain,
                                    const IntegratorOptions& opts) {
  const int n = sys.dim;
  Mat shift = Mat::Zero(n, n);
  if (mu) {
    if (*mu == 0.0) throw PreconditionError("mu must be nonzero");
    if (!gain) throw PreconditionError("mu given without a gain matrix");
    shift = (1.0 / *mu - 1.0) * gain->matrix;
  }
  const JacobianField& jac = sys.jacobian;
  auto field = [&](double t, const Vec& y, Vec& dy) {
    const Mat b = jac(orbit.state(t)) + shift;
    Eigen::Map<const Mat> ym(y.data(), n, n);
    dy.resize(n * n);
    Eigen::Map<Mat>(dy.data(), n, n).noalias() = b * ym;
  };
  const Mat id = Mat::Identity(n, n);
  const Vec y0 = Eigen::Map<const Vec>(id.data(), n * n);
  return MatrixTrajectory(n, integrate(field, y0, t0, t1, opts));
}

DenseTrajectory adjoint_trajectory(const SystemDef& sys, const Orbit& orbit, const Vec& y0,
                                   double t0, double t1, const IntegratorOptions& opts) {
  const JacobianField& jac = sys.jacobian;
  auto field = [&](double t, const Vec& y, Vec& dy) {
    dy.noalias() = -(jac(orbit.state(t)).transpose() * y);
  };
  return integrate(field, y0, t0, t1, opts);
}

}  // namespace oddlimit
