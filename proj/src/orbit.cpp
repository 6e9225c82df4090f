#include "oddlimit/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "oddlimit/variational.hpp"

namespace oddlimit {

Orbit::Orbit(double period, DenseTrajectory traj, VectorField rhs, std::optional<double> omega)
    : dim_(traj.dim()),
      period_(period),
      traj_(std::make_shared<const DenseTrajectory>(std::move(traj))),
      rhs_(std::move(rhs)),
      omega_(omega) {
  if (!(period > 0.0)) throw PreconditionError("orbit period must be positive");
  if (traj_->empty()) throw PreconditionError("orbit trajectory is empty");
  if (traj_->t0() > 1e-12 * period || traj_->t1() < period * (1.0 - 1e-12)) {
    throw PreconditionError("orbit trajectory must cover [0, period]");
  }
}

Orbit::Orbit(double period, StateFn exact, VectorField rhs, int mesh_intervals,
             std::optional<double> omega)
    : period_(period),
      exact_(std::move(exact)),
      mesh_intervals_(mesh_intervals),
      rhs_(std::move(rhs)),
      omega_(omega) {
  if (!(period > 0.0)) throw PreconditionError("orbit period must be positive");
  dim_ = static_cast<int>(exact_(0.0).size());
}

Vec Orbit::base(double t) const { return exact_ ? exact_(t) : traj_->eval(t); }

Vec Orbit::state(double t) const {
  double u = t + offset_;
  if (!(offset_ == 0.0 && t >= 0.0 && t <= period_)) {
    u = std::fmod(u, period_);
    if (u < 0.0) u += period_;
  }
  Vec x = base(u);
  if (transform_.size() != 0) return transform_ * x;
  return x;
}

std::vector<double> Orbit::mesh() const {
  std::vector<double> m;
  if (exact_) {
    m.reserve(mesh_intervals_ + 1);
    for (int k = 0; k <= mesh_intervals_; ++k) m.push_back(period_ * k / mesh_intervals_);
    return m;
  }
  for (double t : traj_->mesh()) {
    if (t > period_) break;
    double u = std::fmod(t - offset_, period_);
    if (u < 0.0) u += period_;
    m.push_back(u);
  }
  m.push_back(0.0);
  m.push_back(period_);
  std::sort(m.begin(), m.end());
  std::vector<double> out;
  for (double t : m) {
    if (out.empty() || t - out.back() > 1e-12 * period_) out.push_back(t);
  }
  out.back() = period_;
  return out;
}

Orbit Orbit::shifted(double tau) const {
  Orbit o = *this;
  o.offset_ = std::fmod(offset_ + tau, period_);
  if (o.offset_ < 0.0) o.offset_ += period_;
  return o;
}

Orbit Orbit::transformed(const Mat& g) const {
  Orbit o = *this;
  o.transform_ = transform_.size() != 0 ? Mat(g * transform_) : g;
  return o;
}

double Orbit::closure_defect() const { return (state(period_) - state(0.0)).norm(); }

double Orbit::ode_residual(int samples) const {
  const double h = 1e-5 * period_;
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = period_ * (k + 0.5) / samples;
    const Vec d = (state(t + h) - state(t - h)) / (2.0 * h);
    worst = std::max(worst, (d - deriv(t)).norm());
  }
  return worst;
}

namespace {

Orbit landau_branch(const LandauParams& p, double r, double w, double sign) {
  const VectorField rhs = landau_system(p).system.rhs;
  auto exact = [r, w, sign](double t) {
    Vec x(4);
    const double c = r * std::cos(w * t), s = r * std::sin(w * t);
    x << c, s, sign * c, sign * s;
    return x;
  };
  return Orbit(2.0 * std::numbers::pi / w, exact, rhs);
}

}  // namespace

Orbit landau_antiphase_orbit(const LandauParams& p) {
  p.validate();
  if (!(p.alpha < 2.0 * p.a)) throw PreconditionError("anti-phase branch requires alpha < 2a");
  return landau_branch(p, p.antiphase_radius(), p.antiphase_omega(), -1.0);
}

Orbit landau_synchronized_orbit(const LandauParams& p) {
  p.validate();
  if (!(p.alpha < 0.0)) throw PreconditionError("synchronized branch requires alpha < 0");
  return landau_branch(p, p.synchronized_radius(), p.synchronized_omega(), 1.0);
}

SystemDef reframe(const SystemDef& sys, const S1Generator& rotation, double d_omega) {
  if (d_omega == 0.0) return sys;
  SystemDef out = sys;
  const Mat j = rotation.matrix;
  const VectorField rhs = sys.rhs;
  const JacobianField jac = sys.jacobian;
  out.rhs = [rhs, j, d_omega](const Vec& x) -> Vec { return rhs(x) - d_omega * (j * x); };
  out.jacobian = [jac, j, d_omega](const Vec& x) -> Mat { return jac(x) - d_omega * j; };
  return out;
}

ShootingResult solve_shooting(const ShootingProblem& p, double tol, const IntegratorOptions& integ) {
  const int n = p.sys.dim;
  if (!(tol > 0.0)) throw PreconditionError("shooting tolerance must be positive");
  if (p.guess.size() != n) throw PreconditionError("shooting guess has wrong dimension");
  if (!(p.period_guess > 0.0)) throw PreconditionError("period guess must be positive");

  const bool rel = p.rotation.has_value();
  const int conds = rel ? 2 : 1;
  if (!p.phase_anchors.empty() && static_cast<int>(p.phase_anchors.size()) != conds) {
    throw PreconditionError("number of phase anchors must match the continuous degeneracy");
  }
  Mat g = Mat::Identity(n, n);
  int order = 1;
  if (p.symmetry) {
    g = p.symmetry->inverse();
    order = p.symmetry->order();
    if (order == 0) throw PreconditionError("symmetry matrix has no finite order");
  }

  Vec x = p.guess;
  double tau = p.period_guess;
  double om = p.omega_guess;
  ShootingResult res;
  const int m = n + 1 + (rel ? 1 : 0);

  auto frame = [&](double omega) {
    return rel ? reframe(p.sys, *p.rotation, omega - p.omega_guess) : p.sys;
  };
  auto options = [&](double span) {
    IntegratorOptions o = integ;
    o.max_step = std::min(integ.max_step, span / 200.0);
    return o;
  };

  bool converged = false;
  for (int it = 1; it <= p.max_iterations; ++it) {
    const SystemDef s = frame(om);
    const IntegratorOptions o = options(tau);
    DenseTrajectory traj;
    try {
      traj = integrate(s, x, 0.0, tau, o);
    } catch (const IntegrationError& e) {
      std::ostringstream os;
      os << "shooting diverged at iteration " << it << ": " << e.what() << " at t = " << e.time();
      throw ConvergenceError(os.str());
    }
    const Vec xt = traj.final_state();
    const Orbit provisional(tau, std::move(traj), s.rhs);
    const Mat phi = fundamental_matrix(s, provisional, tau, o).final_value();

    const Vec r = g * xt - x;
    Mat jm = Mat::Zero(m, m);
    Vec rhs = Vec::Zero(m);
    jm.topLeftCorner(n, n) = g * phi - Mat::Identity(n, n);
    jm.block(0, n, n, 1) = g * s.rhs(xt);
    rhs.head(n) = -r;
    std::vector<Vec> anchors = p.phase_anchors;
    if (anchors.empty()) {
      anchors.push_back(s.rhs(x));
      if (rel) anchors.push_back(p.rotation->matrix * x);
    }
    for (int c = 0; c < conds; ++c) jm.block(n + c, 0, 1, n) = anchors[c].normalized().transpose();
    if (rel) jm.block(0, n + 1, n, 1) = -tau * (g * (p.rotation->matrix * xt));

    Eigen::PartialPivLU<Mat> lu(jm);
    if (!(lu.rcond() > 1e-13)) {
      std::ostringstream os;
      os << "singular Newton matrix at iteration " << it << " (rcond " << lu.rcond() << ")";
      throw SingularSystemError(os.str());
    }
    const Vec delta = lu.solve(rhs);
    x += delta.head(n);
    tau += delta[n];
    if (rel) om += delta[n + 1];
    res.corrections.push_back(delta.norm());
    res.iterations = it;
    res.residual = r.norm();
    if (!(tau > 0.0) || !x.allFinite()) throw ConvergenceError("shooting diverged");
    if (delta.norm() < tol && r.norm() < 10.0 * tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "shooting did not converge in " << p.max_iterations << " iterations (last correction "
       << (res.corrections.empty() ? 0.0 : res.corrections.back()) << ")";
    throw ConvergenceError(os.str());
  }

  const SystemDef s = frame(om);
  DenseTrajectory piece = integrate(s, x, 0.0, tau, options(tau * order));
  DenseTrajectory full = piece;
  Mat power = Mat::Identity(n, n);
  for (int k = 1; k < order; ++k) {
    power = p.symmetry->matrix * power;
    full.extend(piece.mapped(power, k * tau));
  }
  std::optional<double> omega;
  if (rel) omega = om;
  res.orbit = Orbit(tau * order, std::move(full), s.rhs, omega);
  res.x0 = x;
  res.period = tau * order;
  res.shift = tau;
  res.omega = omega;
  res.system = s;
  return res;
}

GroupOrbitCheck orbit_group_orbit_check(const Orbit& o, const S1Generator& g,
                                        const std::vector<double>& thetas, double angle_tol) {
  GroupOrbitCheck out;
  const double T = o.period();
  const double h = 1e-5 * T;
  for (double theta : thetas) {
    const Mat e = g.exp(theta);
    for (int k = 0; k < 20; ++k) {
      const double t = T * (k + 0.5) / 20;
      const Vec d = e * (o.state(t + h) - o.state(t - h)) / (2.0 * h);
      out.max_residual = std::max(out.max_residual, (d - o.rhs()(e * o.state(t))).norm());
    }
  }
  const Vec u = o.deriv(0.0);
  const Vec v = g.matrix * o.state(0.0);
  const double along = std::abs(u.dot(v)) / v.norm();
  const double across = (u - (u.dot(v) / v.squaredNorm()) * v).norm();
  out.angle = std::atan2(across, along);
  out.relative_equilibrium = out.angle <= angle_tol;
  return out;
}

namespace {

// Point on the branch of relative periodic orbits bifurcating from the
// subcritical Hopf point, taken from an amplitude-parameterized Newton
// continuation (see docs/laser_target.md). Frame frequency 0.29976704814821137.
constexpr double kSeedPhi = -1.2451833358743218;
constexpr double kSeedOmega = 0.29976704814821137;
constexpr double kSeedPeriod = 13.316845888182007;
constexpr double kSeedState[6] = {7.3087273515722706e-01,  7.7927626461651509e-02,
                                  -3.3452544753437660e-02, 1.3806335198513866e+00,
                                  -2.9470709359887770e-01, 8.2765769190969798e-03};

}  // namespace

ShootingResult laser_reference_orbit(const LaserParams& p, double tol) {
  LaserParams q = p;
  q.b0 = 0.0;
  const bool near_seed = std::abs(q.phi - kSeedPhi) < 0.02;
  if (!near_seed) {
    throw PreconditionError("no stored seed for the laser orbit near this coupling phase");
  }
  q.omega = std::abs(q.omega - kSeedOmega) < 0.05 ? q.omega : kSeedOmega;
  const LaserModel model = laser_system_rotating(q);
  ShootingProblem prob;
  prob.sys = model.system;
  prob.guess = Eigen::Map<const Vec>(kSeedState, 6);
  prob.period_guess = kSeedPeriod;
  prob.rotation = model.rotation;
  prob.omega_guess = q.omega;
  return solve_shooting(prob, tol);
}

}  // namespace oddlimit
