#include "oddlimit/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oddlimit/dynsys.hpp"

namespace oddlimit {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double scaled_norm(const Vec& v, const Vec& y0, const Vec& y1, double atol, double rtol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double sk = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    acc += (v[i] / sk) * (v[i] / sk);
  }
  return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(1, v.size())));
}

}  // namespace

Vec DenseSegment::eval(double t) const {
  const double s = (t - t0) / h;
  const double s1 = 1.0 - s;
  return coeffs.col(0) +
         s * (coeffs.col(1) + s1 * (coeffs.col(2) + s * (coeffs.col(3) + s1 * coeffs.col(4))));
}

std::size_t DenseTrajectory::locate(double t) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const DenseSegment& s) { return v < s.t0; });
  if (it == segments_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(segments_.begin(), it)) - 1;
}

Vec DenseTrajectory::eval(double t) const {
  if (segments_.empty()) throw PreconditionError("eval on empty trajectory");
  const double span = end_time_ - t0();
  const double slack = 1e-8 * (1.0 + std::abs(span));
  if (t < t0() - slack || t > end_time_ + slack) {
    std::ostringstream os;
    os << "trajectory evaluated at t=" << t << " outside [" << t0() << ", " << end_time_ << "]";
    throw PreconditionError(os.str());
  }
  if (t == end_time_) return end_state_;
  return segments_[locate(t)].eval(t);
}

std::vector<double> DenseTrajectory::mesh() const {
  std::vector<double> m;
  m.reserve(segments_.size() + 1);
  for (const auto& s : segments_) m.push_back(s.t0);
  m.push_back(end_time_);
  return m;
}

void DenseTrajectory::append(DenseSegment seg, const Vec& end_state) {
  if (dim_ == 0) dim_ = static_cast<int>(seg.coeffs.rows());
  end_time_ = seg.t1();
  end_state_ = end_state;
  segments_.push_back(std::move(seg));
}

DenseTrajectory DenseTrajectory::from_parts(int dim, std::vector<DenseSegment> segments,
                                            double end_time, Vec end_state) {
  DenseTrajectory out(dim);
  out.segments_ = std::move(segments);
  out.end_time_ = end_time;
  out.end_state_ = std::move(end_state);
  return out;
}

void DenseTrajectory::extend(const DenseTrajectory& other) {
  if (other.empty()) return;
  if (dim_ == 0) dim_ = other.dim_;
  segments_.insert(segments_.end(), other.segments_.begin(), other.segments_.end());
  end_time_ = other.end_time_;
  end_state_ = other.end_state_;
}

DenseTrajectory DenseTrajectory::mapped(const Mat& a, double dt) const {
  DenseTrajectory out(dim_);
  out.segments_.reserve(segments_.size());
  for (const auto& s : segments_) out.segments_.push_back({s.t0 + dt, s.h, a * s.coeffs});
  out.end_time_ = end_time_ + dt;
  out.end_state_ = a * end_state_;
  return out;
}

DenseTrajectory integrate(const TimeField& f, const Vec& y0, double t0, double t1,
                          const IntegratorOptions& opts) {
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0)) throw PreconditionError("tolerances must be positive");
  if (!(t1 > t0)) throw PreconditionError("integration span must be nonempty");

  const Eigen::Index n = y0.size();
  DenseTrajectory traj(static_cast<int>(n));
  Vec y = y0;
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y1(n), err(n);
  f(t0, y, k1);

  const double span = t1 - t0;
  double h = opts.initial_step;
  if (h <= 0.0) {
    const double d0 = scaled_norm(y, y, y, opts.atol, opts.rtol);
    const double d1n = scaled_norm(k1, y, y, opts.atol, opts.rtol);
    h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h = std::min(h, 0.1 * span);
  }
  h = std::min(h, opts.max_step);

  double t = t0;
  bool rejected_last = false;
  long steps = 0;
  while (t < t1) {
    if (++steps > opts.max_steps) throw IntegrationError("too many integration steps", t);
    bool last = false;
    if (t + h >= t1 - 1e-14 * std::max(1.0, std::abs(t1))) {
      h = t1 - t;
      last = true;
    }
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      throw IntegrationError("step size underflow", t);
    }

    ytmp = y + h * a21 * k1;
    f(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, ytmp, k6);
    y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    f(t + h, y1, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double e = scaled_norm(err, y, y1, opts.atol, opts.rtol);
    if (!std::isfinite(e)) {
      if (!y1.allFinite()) {
        h *= 0.2;
        rejected_last = true;
        if (h < 1e-300) throw IntegrationError("non-finite state", t);
        continue;
      }
    }
    if (e <= 1.0) {
      DenseSegment seg;
      seg.t0 = t;
      seg.h = h;
      seg.coeffs.resize(n, 5);
      const Vec ydiff = y1 - y;
      const Vec bspl = h * k1 - ydiff;
      seg.coeffs.col(0) = y;
      seg.coeffs.col(1) = ydiff;
      seg.coeffs.col(2) = bspl;
      seg.coeffs.col(3) = ydiff - h * k7 - bspl;
      seg.coeffs.col(4) = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      const double tnew = last ? t1 : t + h;
      traj.append(std::move(seg), y1);
      t = tnew;
      y = y1;
      k1 = k7;
      if (y.cwiseAbs().maxCoeff() > opts.blowup || !y.allFinite()) {
        throw IntegrationError("solution exceeded blow-up bound", t);
      }
      double fac = e > 0.0 ? 0.9 * std::pow(e, -0.2) : 10.0;
      fac = std::clamp(fac, 0.2, rejected_last ? 1.0 : 10.0);
      h = std::min(h * fac, opts.max_step);
      rejected_last = false;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(e, -0.2));
      rejected_last = true;
    }
  }
  return traj;
}

DenseTrajectory integrate(const SystemDef& sys, const Vec& x0, double t0, double t1,
                          const IntegratorOptions& opts) {
  const VectorField& rhs = sys.rhs;
  return integrate([&rhs](double, const Vec& y, Vec& dy) { dy = rhs(y); }, x0, t0, t1, opts);
}

}  // namespace oddlimit
