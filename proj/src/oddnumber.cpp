#include "oddlimit/oddnumber.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "oddlimit/variational.hpp"

namespace oddlimit {

std::string to_string(CriterionKind k) {
  switch (k) {
    case CriterionKind::finite:
      return "finite";
    case CriterionKind::s1:
      return "s1";
    case CriterionKind::standard:
      return "standard";
  }
  return "?";
}

Vec CriterionContext::mode(int j, double t) const {
  if (j == 0) return orbit.deriv(t);
  return rotation->matrix * orbit.state(t);
}

namespace {

std::vector<double> merged_mesh(const std::vector<double>& a, const std::vector<double>& b,
                                double end) {
  std::vector<double> m;
  for (double t : a) {
    if (t >= 0.0 && t <= end) m.push_back(t);
  }
  for (double t : b) {
    if (t >= 0.0 && t <= end) m.push_back(t);
  }
  m.push_back(0.0);
  m.push_back(end);
  std::sort(m.begin(), m.end());
  std::vector<double> out;
  for (double t : m) {
    if (out.empty() || t - out.back() > 1e-12 * end) out.push_back(t);
  }
  out.back() = end;
  return out;
}

std::string hypothesis_message(const FloquetReport& r, const char* hint) {
  std::ostringstream os;
  os << "hypothesis on the trivial multiplier violated: " << r.note << hint;
  return os.str();
}

CriterionContext finish(CriterionContext ctx) {
  const double end = ctx.action.shift;
  const IntegratorOptions io = orbit_options(ctx.orbit, ctx.opts.tol);
  std::vector<double> mesh = ctx.orbit.mesh();
  for (const Vec& y0 : ctx.floquet.adjoint_vectors) {
    ctx.adjoints.push_back(adjoint_trajectory(ctx.sys, ctx.orbit, y0, 0.0, end, io));
    mesh = merged_mesh(mesh, ctx.adjoints.back().mesh(), end);
  }
  ctx.mesh = std::move(mesh);
  return ctx;
}

Mat integrals(const CriterionContext& ctx, const GainMatrix& k,
              const std::vector<const DenseTrajectory*>& adj) {
  const int m = static_cast<int>(adj.size());
  const Mat& km = k.matrix;
  return composite_gauss(ctx.mesh, ctx.opts.quad_subdivisions, Mat(Mat::Zero(m, m)),
                         [&](double t) {
                           Mat v(m, m);
                           for (int j = 0; j < m; ++j) {
                             const Vec kpsi = km * ctx.mode(j, t);
                             for (int i = 0; i < m; ++i) v(i, j) = adj[i]->eval(t).dot(kpsi);
                           }
                           return v;
                         });
}

double sign_of_n(int n) { return n % 2 == 0 ? 1.0 : -1.0; }

}  // namespace

CriterionContext prepare_finite(const SystemDef& sys, const Orbit& orbit, const SymmetryAction& g,
                                const CriterionOptions& opts) {
  CriterionContext ctx;
  ctx.kind = CriterionKind::finite;
  ctx.sys = sys;
  ctx.orbit = orbit;
  ctx.action = g;
  ctx.opts = opts;
  ctx.floquet = floquet_finite(sys, orbit, g, {opts.tol, opts.bands});
  if (!ctx.floquet.hypothesis_ok) {
    throw HypothesisError(hypothesis_message(ctx.floquet, " (need a simple multiplier 1)"));
  }
  return finish(std::move(ctx));
}

CriterionContext prepare_standard(const SystemDef& sys, const Orbit& orbit,
                                  const CriterionOptions& opts) {
  SymmetryAction id{Mat::Identity(sys.dim, sys.dim), orbit.period()};
  CriterionContext ctx;
  ctx.kind = CriterionKind::standard;
  ctx.sys = sys;
  ctx.orbit = orbit;
  ctx.action = id;
  ctx.opts = opts;
  ctx.floquet = floquet_finite(sys, orbit, id, {opts.tol, opts.bands});
  if (!ctx.floquet.hypothesis_ok) {
    throw HypothesisError(hypothesis_message(
        ctx.floquet, " (multiplier 1 of Phi(T) is not simple; use the s1 or finite criterion)"));
  }
  return finish(std::move(ctx));
}

CriterionContext prepare_s1(const SystemDef& sys, const Orbit& orbit, const S1Generator& g,
                            const CriterionOptions& opts) {
  CriterionContext ctx;
  ctx.kind = CriterionKind::s1;
  ctx.sys = sys;
  ctx.orbit = orbit;
  ctx.action = {Mat::Identity(sys.dim, sys.dim), orbit.period()};
  ctx.rotation = g;
  ctx.opts = opts;
  ctx.floquet = floquet_s1(sys, orbit, g, {opts.tol, opts.bands});
  if (!ctx.floquet.hypothesis_ok) {
    throw HypothesisError(hypothesis_message(ctx.floquet, " (need multiplier 1 of multiplicity 2)"));
  }
  return finish(std::move(ctx));
}

CriterionVerdict evaluate(const CriterionContext& ctx, const GainMatrix& k) {
  if (k.matrix.rows() != ctx.sys.dim || k.matrix.cols() != ctx.sys.dim) {
    throw PreconditionError("gain matrix has wrong dimension");
  }
  if (ctx.kind == CriterionKind::finite && !k.commutes_with(ctx.action.matrix)) {
    throw PreconditionError("gain does not commute with the symmetry matrix");
  }
  std::vector<const DenseTrajectory*> adj;
  for (const auto& a : ctx.adjoints) adj.push_back(&a);

  CriterionVerdict v;
  v.kind = ctx.kind;
  v.N = ctx.floquet.N;
  v.c = integrals(ctx, k, adj);
  const double s = sign_of_n(v.N);
  if (ctx.kind == CriterionKind::s1) {
    v.expression = s * ((1.0 + v.c(0, 0)) * (1.0 + v.c(1, 1)) - v.c(0, 1) * v.c(1, 0));
  } else {
    v.expression = s * (1.0 + v.c(0, 0));
  }
  v.inconclusive = std::abs(v.expression) <= ctx.opts.expr_tol;
  v.excluded = v.expression < -ctx.opts.expr_tol;
  return v;
}

CriterionVerdict criterion_finite(const SystemDef& sys, const Orbit& orbit, const SymmetryAction& g,
                                  const GainMatrix& k, const CriterionOptions& opts) {
  if (!k.commutes_with(g.matrix)) {
    throw PreconditionError("gain does not commute with the symmetry matrix");
  }
  return evaluate(prepare_finite(sys, orbit, g, opts), k);
}

CriterionVerdict criterion_s1(const SystemDef& sys, const Orbit& orbit, const S1Generator& g,
                              const GainMatrix& k, const CriterionOptions& opts) {
  return evaluate(prepare_s1(sys, orbit, g, opts), k);
}

CriterionVerdict criterion_standard(const SystemDef& sys, const Orbit& orbit, const GainMatrix& k,
                                    const CriterionOptions& opts) {
  return evaluate(prepare_standard(sys, orbit, opts), k);
}

Mat s1_integrals_renormalized(const CriterionContext& ctx, const GainMatrix& k,
                              const std::vector<Vec>& adjoint0) {
  if (ctx.kind != CriterionKind::s1 || adjoint0.size() != 2) {
    throw PreconditionError("renormalization applies to the s1 criterion with two adjoint vectors");
  }
  Mat y(ctx.sys.dim, 2), p(ctx.sys.dim, 2);
  y << adjoint0[0], adjoint0[1];
  p << ctx.mode(0, 0.0), ctx.mode(1, 0.0);
  const Mat l = y * (y.transpose() * p).inverse().transpose();
  const IntegratorOptions io = orbit_options(ctx.orbit, ctx.opts.tol);
  std::vector<DenseTrajectory> own;
  for (int i = 0; i < 2; ++i) {
    own.push_back(adjoint_trajectory(ctx.sys, ctx.orbit, l.col(i), 0.0, ctx.action.shift, io));
  }
  return integrals(ctx, k, {&own[0], &own[1]});
}

Mat twisted_psi(const CriterionContext& ctx, const GainMatrix& k, double mu) {
  if (!(mu > 0.0)) throw PreconditionError("mu must be positive");
  const IntegratorOptions io = orbit_options(ctx.orbit, ctx.opts.tol);
  const Mat psi = fundamental_matrix(ctx.sys, ctx.orbit, 0.0, ctx.action.shift, mu, &k, io)
                      .final_value();
  return ctx.action.inverse() * psi;
}

double characteristic_F(const CriterionContext& ctx, const GainMatrix& k, double mu) {
  const Mat m = twisted_psi(ctx, k, mu);
  return (mu * Mat::Identity(m.rows(), m.cols()) - m).determinant();
}

std::optional<double> find_unstable_root(const CriterionContext& ctx, const GainMatrix& k,
                                         const CriterionVerdict& v) {
  if (!v.excluded) return std::nullopt;
  const double lo = 1.0 + ctx.opts.root_delta;
  double hi = ctx.opts.mu_max;
  if (!(hi > lo)) throw PreconditionError("empty root bracket");
  auto f = [&](double mu) { return characteristic_F(ctx, k, mu); };

  // F(mu) ~ mu^n for large mu, so the bracket can always be widened until F > 0.
  while (!(f(hi) > 0.0)) {
    if (hi > 1e12) throw ConvergenceError("F stays nonpositive up to mu = 1e12");
    hi *= 4.0;
  }

  // Walk down from mu_max on a log grid to the first nonpositive value; the
  // largest root lies between it and its upper neighbour.
  const int samples = 64;
  std::vector<double> grid(samples + 1);
  for (int i = 0; i <= samples; ++i) {
    grid[i] = 1.0 + (lo - 1.0) * std::pow((hi - 1.0) / (lo - 1.0), double(i) / samples);
  }
  double upper = grid[samples];
  double f_upper = f(upper);
  for (int i = samples - 1; i >= 0; --i) {
    const double mu = grid[i];
    const double fm = f(mu);
    if (fm <= 0.0) {
      if (fm == 0.0) return mu;
      boost::uintmax_t iters = 100;
      const auto r = boost::math::tools::toms748_solve(
          f, mu, upper, fm, f_upper, boost::math::tools::eps_tolerance<double>(50), iters);
      return 0.5 * (r.first + r.second);
    }
    upper = mu;
    f_upper = fm;
  }
  throw ConvergenceError("no sign change of F found in [1 + delta, mu_max]");
}

CertificateReport verify_certificate(const CriterionContext& ctx, const GainMatrix& k, double mu,
                                     std::optional<Vec> nu, double rel_tol) {
  CertificateReport rep;
  rep.mu = mu;
  const int n = ctx.sys.dim;
  if (nu) {
    rep.nu = *nu;
  } else {
    const Mat m = twisted_psi(ctx, k, mu) - mu * Mat::Identity(n, n);
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    rep.nu = svd.matrixV().col(n - 1);
  }
  const double tg = ctx.action.shift;
  const Mat shift = (1.0 / mu - 1.0) * k.matrix;
  const JacobianField& jac = ctx.sys.jacobian;
  const Orbit& orbit = ctx.orbit;
  auto field = [&](double t, const Vec& y, Vec& dy) {
    dy.noalias() = (jac(orbit.state(t)) + shift) * y;
  };
  IntegratorOptions io = orbit_options(orbit, ctx.opts.tol);
  const DenseTrajectory y = integrate(field, rep.nu, 0.0, 2.0 * tg, io);
  const Mat& a = ctx.action.matrix;
  double scale = 0.0, worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    const double t = tg * s / 49.0;
    const Vec later = y.eval(t + tg);
    scale = std::max(scale, later.norm());
    worst = std::max(worst, (later - mu * (a * y.eval(t))).norm());
  }
  rep.residual = scale > 0.0 ? worst / scale : worst;
  rep.valid = rep.residual < rel_tol;
  return rep;
}

std::string to_text(const CriterionVerdict& v) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "[verdict]\n";
  os << "kind = " << to_string(v.kind) << '\n';
  os << "N = " << v.N << '\n';
  for (int i = 0; i < v.c.rows(); ++i) {
    for (int j = 0; j < v.c.cols(); ++j) os << "c" << i + 1 << j + 1 << " = " << v.c(i, j) << '\n';
  }
  os << "expression = " << v.expression << '\n';
  os << "excluded = " << (v.excluded ? "true" : "false") << '\n';
  os << "inconclusive = " << (v.inconclusive ? "true" : "false") << '\n';
  if (v.certificate) {
    os << "mu_star = " << v.certificate->mu << '\n';
  } else {
    os << "mu_star = none\n";
  }
  return os.str();
}

}  // namespace oddlimit
