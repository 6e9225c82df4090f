#pragma once

// Stabilization-exclusion criteria for delayed feedback control of a periodic
// orbit and the constructive instability certificates behind them.
//
//   finite:   (-1)^N (1 + int_0^{T_g} psi^T(t) K psi(t) dt)         < 0
//   s1:       (-1)^N ((1 + c11)(1 + c22) - c12 c21)                 < 0
//   standard: finite with A_g = Id, T_g = T
//
// When the expression is negative, F(mu) = det(mu Id - A_g^{-1} Psi_mu(T_g))
// has a real root mu > 1 and the controlled linearization has a solution with
// y(t + T_g) = mu A_g y(t).

#include <optional>
#include <string>
#include <vector>

#include "oddlimit/dynsys.hpp"
#include "oddlimit/floquet.hpp"
#include "oddlimit/orbit.hpp"

namespace oddlimit {

enum class CriterionKind { finite, s1, standard };
std::string to_string(CriterionKind k);

struct CriterionOptions {
  double tol = 1e-10;
  double expr_tol = 1e-6;
  int quad_subdivisions = 1;
  SpectralBands bands;
  double root_delta = 1e-3;
  double mu_max = 50.0;
};

struct Certificate {
  double mu = 0.0;
  Vec nu;
};

struct CriterionVerdict {
  CriterionKind kind = CriterionKind::finite;
  Mat c;  // 1x1 or 2x2
  int N = 0;
  double expression = 0.0;
  bool excluded = false;
  bool inconclusive = false;
  std::optional<Certificate> certificate;
};

// Everything that does not depend on the gain: orbit, Floquet data and the
// adjoint modes. Build once, evaluate for many gains.
struct CriterionContext {
  CriterionKind kind = CriterionKind::finite;
  SystemDef sys;
  Orbit orbit;
  SymmetryAction action;  // (Id, T) for s1 and standard
  std::optional<S1Generator> rotation;
  FloquetReport floquet;
  std::vector<DenseTrajectory> adjoints;
  std::vector<double> mesh;
  CriterionOptions opts;

  // psi_j(t): x*'(t) for j = 0, J x*(t) for j = 1.
  Vec mode(int j, double t) const;
};

CriterionContext prepare_finite(const SystemDef& sys, const Orbit& orbit, const SymmetryAction& g,
                                const CriterionOptions& opts = {});
CriterionContext prepare_s1(const SystemDef& sys, const Orbit& orbit, const S1Generator& g,
                            const CriterionOptions& opts = {});
CriterionContext prepare_standard(const SystemDef& sys, const Orbit& orbit,
                                  const CriterionOptions& opts = {});

CriterionVerdict evaluate(const CriterionContext& ctx, const GainMatrix& k);

CriterionVerdict criterion_finite(const SystemDef& sys, const Orbit& orbit, const SymmetryAction& g,
                                  const GainMatrix& k, const CriterionOptions& opts = {});
CriterionVerdict criterion_s1(const SystemDef& sys, const Orbit& orbit, const S1Generator& g,
                              const GainMatrix& k, const CriterionOptions& opts = {});
CriterionVerdict criterion_standard(const SystemDef& sys, const Orbit& orbit, const GainMatrix& k,
                                    const CriterionOptions& opts = {});

// c_ij for an explicitly supplied adjoint pair and mode pair at t = 0; the pair
// is first re-normalized so that the Gram conditions hold.
Mat s1_integrals_renormalized(const CriterionContext& ctx, const GainMatrix& k,
                              const std::vector<Vec>& adjoint0);

double characteristic_F(const CriterionContext& ctx, const GainMatrix& k, double mu);
Mat twisted_psi(const CriterionContext& ctx, const GainMatrix& k, double mu);

// Largest real root of F above 1 + root_delta; nullopt unless excluded. The
// search starts from mu_max and widens it while F(mu_max) <= 0.
std::optional<double> find_unstable_root(const CriterionContext& ctx, const GainMatrix& k,
                                         const CriterionVerdict& v);

struct CertificateReport {
  double mu = 0.0;
  Vec nu;
  double residual = 0.0;
  bool valid = false;
};

CertificateReport verify_certificate(const CriterionContext& ctx, const GainMatrix& k, double mu,
                                     std::optional<Vec> nu = std::nullopt, double rel_tol = 1e-6);

std::string to_text(const CriterionVerdict& v);

}  // namespace oddlimit
