#pragma once

// System definitions, declared symmetries, gain matrices and the two shipped
// models: a pair of diffusively coupled Landau oscillators and a pair of
// coupled semiconductor lasers written in a co-rotating frame.
//
// Complex variables are realified as interleaved (Re, Im) pairs, so a complex
// gain b acts on each complex slot as the 2x2 block [[Re b, -Im b], [Im b, Re b]].

#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "oddlimit/types.hpp"

namespace oddlimit {

using VectorField = std::function<Vec(const Vec&)>;
using JacobianField = std::function<Mat(const Vec&)>;

struct SystemDef {
  int dim = 0;
  VectorField rhs;
  JacobianField jacobian;
  std::string name;
};

// Spatio-temporal symmetry (A_g, T_g) of a periodic solution: A_g x*(t) = x*(t + T_g).
struct SymmetryAction {
  Mat matrix;
  double shift = 0.0;

  Mat inverse() const { return matrix.inverse(); }
  // Smallest k <= max_order with A^k = Id, or 0 if none.
  int order(int max_order = 24, double tol = 1e-10) const;
};

// Generator J of a circle action x -> exp(theta J) x.
struct S1Generator {
  Mat matrix;

  Mat exp(double theta) const;
};

struct GainMatrix {
  Mat matrix;

  static GainMatrix zero(int n) { return {Mat::Zero(n, n)}; }
  bool commutes_with(const Mat& a, double tol = 1e-12) const;
};

// 2x2 real block of multiplication by a complex number.
Mat complex_block(Complex c);

struct LandauParams {
  double alpha = 0.5;
  double a = 0.5;
  Complex gamma{1.0, 0.0};
  Complex b{0.0, 0.0};

  void validate() const;
  // Radius and angular frequency of the anti-phase branch.
  double antiphase_radius() const;
  double antiphase_omega() const;
  // Radius and angular frequency of the synchronized branch (exists for alpha < 0).
  double synchronized_radius() const;
  double synchronized_omega() const;
};

// Defaults reproduce the reference operating point of this repository: the
// coupling phase and frame frequency select the unstable relative periodic
// orbit documented in docs/laser_target.md.
struct LaserParams {
  double delta = 0.3;
  double alpha = 2.0;
  double eta = 0.2;
  double phi = -1.24;
  double epsilon = 0.03;
  double pump = 1.0;
  double omega = 0.3151;
  double b0 = 0.0;
  double beta = 0.0;

  void validate() const;
};

struct LandauModel {
  SystemDef system;
  S1Generator rotation;   // simultaneous phase rotation of z1, z2
  SymmetryAction swap;    // (z1, z2) -> (z2, z1) with half-period shift pi/omega
  GainMatrix gain;        // b acting on both oscillators
};

LandauModel landau_system(const LandauParams& p);

struct LaserModel {
  SystemDef system;       // 6-dimensional, co-rotating with frequency p.omega
  S1Generator rotation;   // joint phase rotation of E1 and E2
  GainMatrix gain;        // b0 exp(i beta) on the E1 block only
};

LaserModel laser_system_rotating(const LaserParams& p);

// Largest relative mismatch between the analytic Jacobian and central
// differences over the given states.
double jacobian_mismatch(const SystemDef& sys, std::span<const Vec> states, double step = 1e-6);

// Largest relative violation of rhs(A x) = A rhs(x) over the given states.
double equivariance_defect(const SystemDef& sys, const Mat& a, std::span<const Vec> states);

// Random states with entries uniform in [-scale, scale].
std::vector<Vec> random_states(int dim, int count, std::mt19937_64& rng, double scale = 1.0);

}  // namespace oddlimit
