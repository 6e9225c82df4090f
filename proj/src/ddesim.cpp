#include "oddlimit/ddesim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace oddlimit {

ControlLaw equivariant_control(const GainMatrix& k, const SymmetryAction& g) {
  if (!(g.shift > 0.0)) throw PreconditionError("delay must be positive");
  return {k, g.matrix, g.shift};
}

ControlLaw standard_control(const GainMatrix& k, double period) {
  if (!(period > 0.0)) throw PreconditionError("delay must be positive");
  const auto n = k.matrix.rows();
  return {k, Mat::Identity(n, n), period};
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::stable:
      return "stable";
    case Stability::unstable:
      return "unstable";
    case Stability::inconclusive:
      return "inconclusive";
  }
  return "?";
}

namespace {

// Method of steps, one delay interval at a time.
class Stepper {
 public:
  Stepper(const SystemDef& sys, const ControlLaw& law, HistorySegment history,
          const IntegratorOptions& opts)
      : sys_(sys), law_(law), history_(std::move(history)), opts_(opts), traj_(sys.dim) {
    if (!(law.delay > 0.0)) throw PreconditionError("delay must be positive");
    t_ = history_.t_start;
    x_ = history_.eval(t_);
  }

  double time() const { return t_; }
  const DenseTrajectory& trajectory() const { return traj_; }

  Vec delayed(double s) const {
    const double u = s - law_.delay;
    if (traj_.empty() || u < history_.t_start) return history_.eval(u);
    return traj_.eval(u);
  }

  // Advances to min(t + delay, t_end). Returns false on escape.
  bool advance(double t_end) {
    const double t_next = std::min(t_ + law_.delay, t_end);
    const Mat& k = law_.gain.matrix;
    const Mat& a = law_.twist;
    const VectorField& f = sys_.rhs;
    auto field = [&](double s, const Vec& y, Vec& dy) { dy = f(y) + k * (a * delayed(s) - y); };
    try {
      DenseTrajectory piece = integrate(field, x_, t_, t_next, opts_);
      x_ = piece.final_state();
      traj_.extend(piece);
      t_ = t_next;
    } catch (const IntegrationError& e) {
      escape_time_ = e.time();
      return false;
    }
    return true;
  }

  double escape_time() const { return escape_time_; }

 private:
  const SystemDef& sys_;
  const ControlLaw& law_;
  HistorySegment history_;
  IntegratorOptions opts_;
  DenseTrajectory traj_;
  double t_ = 0.0;
  Vec x_;
  double escape_time_ = 0.0;
};

}  // namespace

DdeResult dde_integrate(const SystemDef& sys, const ControlLaw& law, const HistorySegment& history,
                        double t_end, const IntegratorOptions& opts) {
  if (!(law.delay > 0.0)) throw PreconditionError("delay must be positive");
  if (!history.eval) throw PreconditionError("history is not set");
  if (!(t_end > history.t_start)) throw PreconditionError("integration span must be nonempty");
  Stepper st(sys, law, history, opts);
  DdeResult out;
  while (st.time() < t_end) {
    if (!st.advance(t_end)) {
      out.escaped = true;
      out.escape_time = st.escape_time();
      break;
    }
  }
  out.traj = st.trajectory();
  return out;
}

HistorySegment orbit_history(const Orbit& orbit, double delay, const Vec& perturbation) {
  HistorySegment h;
  h.t_start = 0.0;
  h.delay = delay;
  if (perturbation.size() == 0) {
    h.eval = [orbit](double s) { return orbit.state(s); };
  } else {
    h.eval = [orbit, perturbation](double s) -> Vec { return orbit.state(s) + perturbation; };
  }
  return h;
}

namespace {

struct Alignment {
  double tau = 0.0;
  double theta = 0.0;
  double distance = 0.0;
};

Alignment align(const Vec& x, const Orbit& orbit, const S1Generator* rot,
                const std::vector<Vec>& grid) {
  const double T = orbit.period();
  const int m = static_cast<int>(grid.size());
  const Mat* j = rot ? &rot->matrix : nullptr;
  auto best_theta = [&](const Vec& p) {
    if (!j) return 0.0;
    const Vec jp = *j * p;
    const Vec jjp = *j * jp;
    return std::atan2(x.dot(jp), -x.dot(jjp));
  };
  auto rotate = [&](const Vec& p, double th) -> Vec {
    if (!j) return p;
    const Vec jp = *j * p;
    return p + std::sin(th) * jp + (1.0 - std::cos(th)) * (*j * jp);
  };

  Alignment best;
  best.distance = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const double th = best_theta(grid[i]);
    const double d = (x - rotate(grid[i], th)).norm();
    if (d < best.distance) best = {T * i / m, th, d};
  }
  // Gauss-Newton on r(tau, theta) = x - exp(theta J) x*(tau).
  for (int it = 0; it < 6; ++it) {
    const Vec p = orbit.state(best.tau);
    const Vec q = rotate(p, best.theta);
    const Vec r = x - q;
    Mat jac(x.size(), j ? 2 : 1);
    jac.col(0) = -rotate(orbit.rhs()(p), best.theta);
    if (j) jac.col(1) = -(*j * q);
    const Vec step = jac.colPivHouseholderQr().solve(-r);
    Alignment next = best;
    next.tau = best.tau + step[0];
    if (j) next.theta = best.theta + step[1];
    next.distance = (x - rotate(orbit.state(next.tau), next.theta)).norm();
    if (!(next.distance < best.distance)) break;
    best = next;
    if (step.norm() < 1e-14 * std::max(1.0, T)) break;
  }
  best.tau = std::fmod(best.tau, T);
  if (best.tau < 0.0) best.tau += T;
  return best;
}

std::vector<Vec> orbit_grid(const Orbit& orbit, int m) {
  std::vector<Vec> g;
  g.reserve(m);
  for (int i = 0; i < m; ++i) g.push_back(orbit.state(orbit.period() * i / m));
  return g;
}

}  // namespace

double distance_to_orbit(const Vec& x, const Orbit& orbit, const S1Generator* rotation) {
  return align(x, orbit, rotation, orbit_grid(orbit, 256)).distance;
}

StabilityClassification classify_stability(const SystemDef& sys, const ControlLaw& law,
                                           const Orbit& orbit, const S1Generator* rotation,
                                           const StabilityOptions& opts) {
  const int n = sys.dim;
  const double T = orbit.period();
  const std::vector<Vec> grid = orbit_grid(orbit, 256);
  double amp = 0.0;
  for (const Vec& p : grid) amp = std::max(amp, p.norm());

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  std::vector<Vec> modes{orbit.deriv(0.0)};
  if (rotation) modes.push_back(rotation->matrix * orbit.state(0.0));
  std::vector<Vec> basis;
  for (Vec m : modes) {
    for (const Vec& b : basis) m -= m.dot(b) * b;
    if (m.norm() > 1e-12) basis.push_back(m.normalized());
  }
  for (const Vec& b : basis) v -= v.dot(b) * b;
  v *= opts.perturb_size * amp / v.norm();

  IntegratorOptions io;
  io.rtol = io.atol = opts.tol;
  io.max_step = T / 200.0;
  Stepper st(sys, law, orbit_history(orbit, law.delay, v), io);

  StabilityClassification out;
  out.times.push_back(0.0);
  out.distances.push_back(align(orbit.state(0.0) + v, orbit, rotation, grid).distance);
  const double dt = T / opts.samples_per_period;
  const double t_end = opts.horizon * T;
  int next_sample = 1;
  bool stop = false;
  const double floor = std::min(opts.noise_floor, 1e-3 * opts.perturb_size) * amp;
  while (!stop && st.time() < t_end - 1e-12 * T) {
    if (!st.advance(t_end)) {
      out.escaped = true;
      break;
    }
    while (next_sample * dt <= st.time() + 1e-12 * T) {
      const double t = next_sample * dt;
      ++next_sample;
      const double d = align(st.trajectory().eval(std::min(t, st.time())), orbit, rotation, grid)
                           .distance;
      out.times.push_back(t);
      out.distances.push_back(d);
      if (d > opts.escape_distance * amp || d < floor) {
        stop = true;
        break;
      }
    }
  }
  out.horizon = static_cast<int>(std::ceil(st.time() / T - 1e-9));
  if (out.escaped) {
    out.verdict = Stability::unstable;
    out.transversal_rate = std::numeric_limits<double>::infinity();
    return out;
  }

  // Fit over the last half of the horizon; short series (fast escape) use all samples.
  const std::size_t count = out.distances.size();
  const std::size_t first = count >= 4 ? count / 2 : 0;
  if (count - first < 2) {
    out.verdict = Stability::inconclusive;
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(count - first);
  for (std::size_t i = first; i < count; ++i) {
    const double x = out.times[i] / T;
    const double y = std::log(std::max(out.distances[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  out.transversal_rate = std::exp(slope);
  if (out.transversal_rate < opts.stable_below) {
    out.verdict = Stability::stable;
  } else if (out.transversal_rate > opts.unstable_above) {
    out.verdict = Stability::unstable;
  } else {
    out.verdict = Stability::inconclusive;
  }
  return out;
}

MultiplierResult dominant_multipliers(const SystemDef& sys, const ControlLaw& law,
                                      const Orbit& orbit, int count,
                                      const MultiplierOptions& opts) {
  if (count < 1 || count > 8) throw PreconditionError("count must be in [1, 8]");
  const int n = sys.dim;
  const int m = opts.nodes;
  const int p = count + opts.extra;
  const int big = n * m;
  const double d = law.delay;
  const double h = d / (m - 1);
  const Mat& k = law.gain.matrix;
  const Mat& a = law.twist;
  const Mat a_inv = a.inverse();
  const JacobianField& jac = sys.jacobian;

  IntegratorOptions io;
  io.rtol = io.atol = opts.tol;
  io.max_step = std::min(orbit.period() / 200.0, h);

  // Node values of column c at node j live in rows j*n .. j*n+n-1.
  auto history_at = [&](const Mat& q, double s) -> Mat {
    // s in [-d, 0]; 4-point Lagrange interpolation on the node grid.
    const double u = (s + d) / h;
    int i0 = static_cast<int>(std::floor(u)) - 1;
    i0 = std::clamp(i0, 0, m - 4);
    Mat out = Mat::Zero(n, q.cols());
    for (int a4 = 0; a4 < 4; ++a4) {
      double w = 1.0;
      for (int b4 = 0; b4 < 4; ++b4) {
        if (b4 != a4) w *= (u - (i0 + b4)) / double(a4 - b4);
      }
      out += w * q.middleRows((i0 + a4) * n, n);
    }
    return out;
  };

  auto apply = [&](const Mat& q) -> Mat {
    const int cols = static_cast<int>(q.cols());
    auto field = [&](double t, const Vec& y, Vec& dy) {
      Eigen::Map<const Mat> ym(y.data(), n, cols);
      dy.resize(n * cols);
      Eigen::Map<Mat> dym(dy.data(), n, cols);
      dym.noalias() = (jac(orbit.state(t)) - k) * ym;
      dym.noalias() += k * (a * history_at(q, t - d));
    };
    const Mat y0 = q.bottomRows(n);
    const DenseTrajectory traj =
        integrate(field, Eigen::Map<const Vec>(y0.data(), n * cols), 0.0, d, io);
    Mat out(big, cols);
    for (int j = 0; j < m; ++j) {
      const Vec v = j == m - 1 ? traj.final_state() : traj.eval(j * h);
      out.middleRows(j * n, n) = a_inv * Eigen::Map<const Mat>(v.data(), n, cols);
    }
    return out;
  };

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  Mat q(big, p);
  for (int i = 0; i < big; ++i) {
    for (int j = 0; j < p; ++j) q(i, j) = normal(rng);
  }
  q = Eigen::HouseholderQR<Mat>(q).householderQ() * Mat::Identity(big, p);

  MultiplierResult res;
  std::vector<Complex> prev;
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    const Mat z = apply(q);
    const Mat hsmall = q.transpose() * z;
    Eigen::EigenSolver<Mat> es(hsmall);
    std::vector<Complex> ritz(es.eigenvalues().data(), es.eigenvalues().data() + p);
    std::stable_sort(ritz.begin(), ritz.end(), [](Complex x, Complex y) {
      if (std::abs(x) != std::abs(y)) return std::abs(x) > std::abs(y);
      return x.imag() > y.imag();
    });
    ritz.resize(count);
    res.sweeps = sweep;
    res.multipliers = ritz;
    if (!prev.empty()) {
      double drift = 0.0;
      for (int i = 0; i < count; ++i) drift = std::max(drift, std::abs(ritz[i] - prev[i]));
      if (drift < opts.drift_tol) {
        res.converged = true;
        break;
      }
    }
    prev = ritz;
    q = Eigen::HouseholderQR<Mat>(z).householderQ() * Mat::Identity(big, p);
  }
  return res;
}

}  // namespace oddlimit
