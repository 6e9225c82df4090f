#include "oddlimit/dynsys.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

namespace oddlimit {

int SymmetryAction::order(int max_order, double tol) const {
  const auto n = matrix.rows();
  Mat power = matrix;
  for (int k = 1; k <= max_order; ++k) {
    if ((power - Mat::Identity(n, n)).norm() < tol * std::max(1.0, power.norm())) return k;
    power = power * matrix;
  }
  return 0;
}

Mat S1Generator::exp(double theta) const { return (theta * matrix).exp(); }

bool GainMatrix::commutes_with(const Mat& a, double tol) const {
  return (matrix * a - a * matrix).norm() <= tol * std::max(1.0, matrix.norm() * a.norm());
}

Mat complex_block(Complex c) {
  Mat m(2, 2);
  m << c.real(), -c.imag(), c.imag(), c.real();
  return m;
}

void LandauParams::validate() const {
  if (!(gamma.real() > 0.0)) throw ConfigError("landau: Re(gamma) must be positive");
  if (!(a > 0.0)) throw ConfigError("landau: coupling a must be positive");
}

double LandauParams::antiphase_radius() const {
  return std::sqrt(std::max(0.0, (2.0 * a - alpha) / gamma.real()));
}

double LandauParams::antiphase_omega() const {
  const double r = antiphase_radius();
  return 1.0 + r * r * gamma.imag();
}

double LandauParams::synchronized_radius() const {
  return std::sqrt(std::max(0.0, -alpha / gamma.real()));
}

double LandauParams::synchronized_omega() const {
  const double r = synchronized_radius();
  return 1.0 + r * r * gamma.imag();
}

void LaserParams::validate() const {
  if (!(eta > 0.0)) throw ConfigError("laser: eta must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("laser: epsilon must be positive");
  if (b0 < 0.0) throw ConfigError("laser: b0 must be nonnegative");
}

namespace {

Mat rotation_generator(int n, std::initializer_list<int> slots) {
  Mat j = Mat::Zero(n, n);
  for (int s : slots) {
    j(s, s + 1) = -1.0;
    j(s + 1, s) = 1.0;
  }
  return j;
}

}  // namespace

LandauModel landau_system(const LandauParams& p) {
  p.validate();
  const double alpha = p.alpha;
  const double a = p.a;
  const Complex gamma = p.gamma;

  // Local term g(z) = (alpha + i + gamma |z|^2) z and its real Jacobian.
  auto local = [=](Complex z) { return (alpha + Complex(0, 1) + gamma * std::norm(z)) * z; };
  auto local_jac = [=](Complex z) {
    const Complex lin = alpha + Complex(0, 1) + gamma * std::norm(z);
    const Complex dx = lin + gamma * z * (2.0 * z.real());
    const Complex dy = lin * Complex(0, 1) + gamma * z * (2.0 * z.imag());
    Mat m(2, 2);
    m << dx.real(), dy.real(), dx.imag(), dy.imag();
    return m;
  };

  SystemDef sys;
  sys.dim = 4;
  sys.name = "landau";
  sys.rhs = [=](const Vec& x) {
    const Complex z1(x[0], x[1]), z2(x[2], x[3]);
    const Complex d1 = local(z1) + a * (z2 - z1);
    const Complex d2 = local(z2) + a * (z1 - z2);
    Vec dx(4);
    dx << d1.real(), d1.imag(), d2.real(), d2.imag();
    return dx;
  };
  sys.jacobian = [=](const Vec& x) {
    const Complex z1(x[0], x[1]), z2(x[2], x[3]);
    Mat m = Mat::Zero(4, 4);
    m.block(0, 0, 2, 2) = local_jac(z1) - a * Mat::Identity(2, 2);
    m.block(2, 2, 2, 2) = local_jac(z2) - a * Mat::Identity(2, 2);
    m.block(0, 2, 2, 2) = a * Mat::Identity(2, 2);
    m.block(2, 0, 2, 2) = a * Mat::Identity(2, 2);
    return m;
  };

  LandauModel model;
  model.system = std::move(sys);
  model.rotation.matrix = rotation_generator(4, {0, 2});

  Mat swap = Mat::Zero(4, 4);
  swap.block(0, 2, 2, 2) = Mat::Identity(2, 2);
  swap.block(2, 0, 2, 2) = Mat::Identity(2, 2);
  model.swap.matrix = swap;
  model.swap.shift = std::numbers::pi / p.antiphase_omega();

  model.gain.matrix = Mat::Zero(4, 4);
  model.gain.matrix.block(0, 0, 2, 2) = complex_block(p.b);
  model.gain.matrix.block(2, 2, 2, 2) = complex_block(p.b);
  return model;
}

LaserModel laser_system_rotating(const LaserParams& p) {
  p.validate();
  const Complex i(0, 1);
  const Complex gain1 = i * (p.delta - p.omega);
  const Complex gain2 = -i * p.omega;
  const Complex lw = 1.0 + i * p.alpha;
  const Complex coupling = p.eta * std::exp(-i * p.phi);
  const double eps = p.epsilon;
  const double pump = p.pump;

  SystemDef sys;
  sys.dim = 6;
  sys.name = "laser";
  sys.rhs = [=](const Vec& x) {
    const Complex e1(x[0], x[1]), e2(x[3], x[4]);
    const double n1 = x[2], n2 = x[5];
    const Complex de1 = gain1 * e1 + lw * n1 * e1 + coupling * e2;
    const Complex de2 = gain2 * e2 + lw * n2 * e2 + coupling * e1;
    Vec dx(6);
    dx << de1.real(), de1.imag(), eps * (pump - n1 - (1.0 + 2.0 * n1) * std::norm(e1)),
        de2.real(), de2.imag(), eps * (pump - n2 - (1.0 + 2.0 * n2) * std::norm(e2));
    return dx;
  };
  sys.jacobian = [=](const Vec& x) {
    Mat m = Mat::Zero(6, 6);
    for (int k = 0; k < 2; ++k) {
      const int f = 3 * k;   // field slot
      const int nidx = f + 2;
      const Complex e(x[f], x[f + 1]);
      const double n = x[nidx];
      const Complex own = (k == 0 ? gain1 : gain2) + lw * n;
      m.block(f, f, 2, 2) = complex_block(own);
      const Complex dn = lw * e;
      m(f, nidx) = dn.real();
      m(f + 1, nidx) = dn.imag();
      m.block(f, 3 - f, 2, 2) = complex_block(coupling);
      m(nidx, f) = -eps * (1.0 + 2.0 * n) * 2.0 * e.real();
      m(nidx, f + 1) = -eps * (1.0 + 2.0 * n) * 2.0 * e.imag();
      m(nidx, nidx) = -eps * (1.0 + 2.0 * std::norm(e));
    }
    return m;
  };

  LaserModel model;
  model.system = std::move(sys);
  model.rotation.matrix = rotation_generator(6, {0, 3});
  model.gain.matrix = Mat::Zero(6, 6);
  model.gain.matrix.block(0, 0, 2, 2) = complex_block(std::polar(p.b0, p.beta));
  return model;
}

double jacobian_mismatch(const SystemDef& sys, std::span<const Vec> states, double step) {
  double worst = 0.0;
  for (const Vec& x : states) {
    const Mat analytic = sys.jacobian(x);
    Mat numeric(sys.dim, sys.dim);
    for (int j = 0; j < sys.dim; ++j) {
      Vec xp = x, xm = x;
      xp[j] += step;
      xm[j] -= step;
      numeric.col(j) = (sys.rhs(xp) - sys.rhs(xm)) / (2.0 * step);
    }
    worst = std::max(worst, (analytic - numeric).norm() / std::max(1.0, analytic.norm()));
  }
  return worst;
}

double equivariance_defect(const SystemDef& sys, const Mat& a, std::span<const Vec> states) {
  double worst = 0.0;
  for (const Vec& x : states) {
    const Vec lhs = sys.rhs(a * x);
    const Vec rhs = a * sys.rhs(x);
    worst = std::max(worst, (lhs - rhs).norm() / std::max(1.0, rhs.norm()));
  }
  return worst;
}

std::vector<Vec> random_states(int dim, int count, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<Vec> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    Vec x(dim);
    for (int i = 0; i < dim; ++i) x[i] = u(rng);
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace oddlimit
