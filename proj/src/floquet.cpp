#include "oddlimit/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace oddlimit {

namespace {

// Left eigenspace of m at 1 by block inverse iteration on m^T.
Mat left_space(const Mat& m, int k) {
  const int n = static_cast<int>(m.rows());
  const double sigma = 1.0 + 1e-10;
  Eigen::PartialPivLU<Mat> lu(m.transpose() - sigma * Mat::Identity(n, n));
  Mat y = Mat::Zero(n, k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < n; ++i) y(i, j) = 1.0 + 0.37 * i * (j + 1) + 0.11 * ((i * 7 + j * 3) % 5);
  }
  for (int it = 0; it < 4; ++it) {
    y = lu.solve(y);
    Eigen::HouseholderQR<Mat> qr(y);
    y = qr.householderQ() * Mat::Identity(n, k);
  }
  return y;
}

}  // namespace

FloquetReport classify_spectrum(const Mat& m, int expected, const SpectralBands& bands) {
  FloquetReport r;
  r.matrix = m;
  r.bands = bands;
  r.expected_multiplicity = expected;
  const int n = static_cast<int>(m.rows());

  Eigen::EigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success) throw ConvergenceError("eigenvalue computation failed");
  const CVec ev = es.eigenvalues();
  r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::stable_sort(r.eigenvalues.begin(), r.eigenvalues.end(),
                   [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });
  const CMat v = es.eigenvectors();
  Eigen::JacobiSVD<CMat> vsvd(v);
  const auto& sv = vsvd.singularValues();
  r.eigenvector_condition = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1]
                                                    : std::numeric_limits<double>::infinity();

  r.N = 0;
  r.algebraic_multiplicity = 0;
  for (Complex mu : r.eigenvalues) {
    if (std::abs(mu - 1.0) <= bands.jordan) ++r.algebraic_multiplicity;
    const bool real = std::abs(mu.imag()) < bands.reality * std::max(1.0, std::abs(mu));
    if (real && mu.real() > 1.0 + bands.above_one && std::abs(mu - 1.0) > bands.cluster) ++r.N;
  }

  Eigen::JacobiSVD<Mat> svd(m - Mat::Identity(n, n));
  const double thresh = bands.rank * std::max(1.0, m.norm());
  r.geometric_multiplicity = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()[i] < thresh) ++r.geometric_multiplicity;
  }
  int clustered = 0;
  for (Complex mu : r.eigenvalues) {
    if (std::abs(mu - 1.0) <= bands.cluster) ++clustered;
  }

  std::ostringstream note;
  r.hypothesis_ok = true;
  if (r.geometric_multiplicity != expected) {
    r.hypothesis_ok = false;
    note << "geometric multiplicity of 1 is " << r.geometric_multiplicity << ", expected "
         << expected << "; ";
  }
  if (r.algebraic_multiplicity != expected) {
    r.hypothesis_ok = false;
    note << "algebraic multiplicity of 1 is " << r.algebraic_multiplicity << ", expected "
         << expected << "; ";
  }
  if (clustered != expected && r.hypothesis_ok) {
    r.hypothesis_ok = false;
    note << clustered << " eigenvalues in the cluster band, expected " << expected << "; ";
  }
  if (r.eigenvector_condition > bands.condition) {
    r.near_defective = true;
    note << "eigenvector matrix is ill conditioned; ";
  }
  r.note = note.str();
  if (!r.note.empty()) r.note.resize(r.note.size() - 2);
  return r;
}

FloquetReport floquet_finite(const SystemDef& sys, const Orbit& orbit, const SymmetryAction& g,
                             const FloquetOptions& opts) {
  const double tg = g.shift;
  if (!(tg > 0.0)) throw PreconditionError("symmetry shift must be positive");
  const Vec x0 = orbit.state(0.0);
  const double defect = (g.matrix * x0 - orbit.state(tg)).norm() / std::max(1.0, x0.norm());
  if (defect > 1e-6) {
    std::ostringstream os;
    os << "orbit does not satisfy A_g x*(0) = x*(T_g) (defect " << defect << ")";
    throw PreconditionError(os.str());
  }
  const Mat phi = fundamental_matrix(sys, orbit, tg, orbit_options(orbit, opts.tol)).final_value();
  FloquetReport r = classify_spectrum(g.inverse() * phi, 1, opts.bands);
  r.kind = "finite";
  r.shift = tg;
  r.modes.push_back(orbit.deriv(0.0));
  if (r.hypothesis_ok) {
    Vec y = left_space(r.matrix, 1).col(0);
    y /= y.dot(r.modes[0]);
    r.adjoint_vectors.push_back(y);
  }
  return r;
}

FloquetReport floquet_s1(const SystemDef& sys, const Orbit& orbit, const S1Generator& g,
                         const FloquetOptions& opts) {
  const GroupOrbitCheck chk = orbit_group_orbit_check(orbit, g);
  if (chk.relative_equilibrium) {
    throw PreconditionError("orbit is a relative equilibrium for this circle action");
  }
  const double t = orbit.period();
  const Mat phi = fundamental_matrix(sys, orbit, t, orbit_options(orbit, opts.tol)).final_value();
  FloquetReport r = classify_spectrum(phi, 2, opts.bands);
  r.kind = "s1";
  r.shift = t;
  r.modes.push_back(orbit.deriv(0.0));
  r.modes.push_back(g.matrix * orbit.state(0.0));
  if (r.hypothesis_ok) {
    const Mat y = left_space(r.matrix, 2);
    Mat p(sys.dim, 2);
    p.col(0) = r.modes[0];
    p.col(1) = r.modes[1];
    const Mat gram = y.transpose() * p;
    const Mat l = y * gram.inverse().transpose();
    r.adjoint_vectors.push_back(l.col(0));
    r.adjoint_vectors.push_back(l.col(1));
  }
  return r;
}

std::string to_text(const FloquetReport& r) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "[floquet]\n";
  os << "kind = " << r.kind << '\n';
  os << "shift = " << r.shift << '\n';
  os << "N = " << r.N << '\n';
  os << "expected_multiplicity = " << r.expected_multiplicity << '\n';
  os << "geometric_multiplicity = " << r.geometric_multiplicity << '\n';
  os << "algebraic_multiplicity = " << r.algebraic_multiplicity << '\n';
  os << "hypothesis_ok = " << (r.hypothesis_ok ? "true" : "false") << '\n';
  os << "near_defective = " << (r.near_defective ? "true" : "false") << '\n';
  os << "eigenvector_condition = " << r.eigenvector_condition << '\n';
  os << "bands = reality " << r.bands.reality << ", above_one " << r.bands.above_one
     << ", cluster " << r.bands.cluster << ", rank " << r.bands.rank << ", jordan "
     << r.bands.jordan << '\n';
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    os << "multiplier." << i << " = " << r.eigenvalues[i].real() << ' '
       << (r.eigenvalues[i].imag() < 0 ? "- " : "+ ") << std::abs(r.eigenvalues[i].imag())
       << "i  |mu| = " << std::abs(r.eigenvalues[i]) << '\n';
  }
  if (!r.note.empty()) os << "note = " << r.note << '\n';
  return os.str();
}

}  // namespace oddlimit
