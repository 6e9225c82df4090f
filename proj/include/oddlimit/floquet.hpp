#pragma once

// Spectra of the twisted monodromy A_g^{-1} Phi(T_g) (finite symmetry) and of
// Phi(T) (circle symmetry): trivial-multiplier hypotheses, the count N of real
// multipliers above 1 and the normalized adjoint vectors.

#include <string>
#include <vector>

#include "oddlimit/dynsys.hpp"
#include "oddlimit/orbit.hpp"
#include "oddlimit/variational.hpp"

namespace oddlimit {

struct SpectralBands {
  double reality = 1e-7;   // |Im mu| < reality * max(1, |mu|) counts as real
  double above_one = 1e-7; // Re mu > 1 + above_one counts as > 1
  double cluster = 1e-6;   // |mu - 1| <= cluster joins the trivial cluster
  double rank = 1e-6;      // singular values of (M - Id) below rank * |M| are zero
  double jordan = 1e-3;    // eigenvalues this close to 1 count toward algebraic multiplicity
  double condition = 1e8;  // eigenvector condition number above this is flagged
};

struct FloquetReport {
  std::string kind;  // "finite" or "s1"
  Mat matrix;
  std::vector<Complex> eigenvalues;  // sorted by decreasing modulus
  int N = 0;
  int expected_multiplicity = 1;
  int geometric_multiplicity = 0;
  int algebraic_multiplicity = 0;
  std::vector<Vec> modes;            // psi(0) = x*'(0) [, J x*(0)]
  std::vector<Vec> adjoint_vectors;  // normalized against `modes`
  bool hypothesis_ok = false;
  bool near_defective = false;
  double eigenvector_condition = 0.0;
  double shift = 0.0;  // T_g or T
  SpectralBands bands;
  std::string note;
};

struct FloquetOptions {
  double tol = 1e-10;
  SpectralBands bands;
};

// Spectral classification of an arbitrary real matrix against the trivial multiplier 1.
FloquetReport classify_spectrum(const Mat& m, int expected_multiplicity, const SpectralBands& bands);

FloquetReport floquet_finite(const SystemDef& sys, const Orbit& orbit, const SymmetryAction& g,
                             const FloquetOptions& opts = {});
FloquetReport floquet_s1(const SystemDef& sys, const Orbit& orbit, const S1Generator& g,
                         const FloquetOptions& opts = {});

std::string to_text(const FloquetReport& r);

}  // namespace oddlimit
