#pragma once

// Embedded Runge-Kutta 5(4) (Dormand-Prince) with the free 4th-order
// continuous extension. Every accepted step is kept as one interpolation
// segment so the whole solution can be evaluated anywhere in its span.

#include <array>
#include <functional>
#include <limits>
#include <vector>

#include "oddlimit/types.hpp"

namespace oddlimit {

// Right-hand side of a non-autonomous system: dy = F(t, y).
using TimeField = std::function<void(double t, const Vec& y, Vec& dy)>;

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0: automatic
  long max_steps = 2'000'000;
  double blowup = 1e8;        // abort when any |y_i| exceeds this
};

// One accepted step on [t0, t0 + h]. Coefficients follow the Hairer layout:
// y(t0 + s h) = c0 + s (c1 + (1-s) (c2 + s (c3 + (1-s) c4))).
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  Mat coeffs;  // dim x 5

  double t1() const { return t0 + h; }
  Vec eval(double t) const;
  Vec start() const { return coeffs.col(0); }
};

class DenseTrajectory {
 public:
  DenseTrajectory() = default;
  explicit DenseTrajectory(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  bool empty() const { return segments_.empty(); }
  double t0() const { return segments_.front().t0; }
  double t1() const { return segments_.empty() ? 0.0 : end_time_; }

  // Evaluates at t in [t0, t1]. Step endpoints return the stored states exactly.
  Vec eval(double t) const;
  Vec final_state() const { return end_state_; }

  // Accepted step times t_0 < t_1 < ... < t_m.
  std::vector<double> mesh() const;
  const std::vector<DenseSegment>& segments() const { return segments_; }

  void append(DenseSegment seg, const Vec& end_state);
  static DenseTrajectory from_parts(int dim, std::vector<DenseSegment> segments, double end_time,
                                    Vec end_state);
  // Appends all segments of `other` (which must start where this one ends).
  void extend(const DenseTrajectory& other);

  // Image under x -> A x with times shifted by dt.
  DenseTrajectory mapped(const Mat& a, double dt) const;

  std::size_t locate(double t) const;

 private:
  int dim_ = 0;
  std::vector<DenseSegment> segments_;
  double end_time_ = 0.0;
  Vec end_state_;
};

DenseTrajectory integrate(const TimeField& f, const Vec& y0, double t0, double t1,
                          const IntegratorOptions& opts = {});

struct SystemDef;

DenseTrajectory integrate(const SystemDef& sys, const Vec& x0, double t0, double t1,
                          const IntegratorOptions& opts = {});

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre5 {
  static constexpr std::array<double, 5> nodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> weights{0.2369268850561891, 0.4786286704993665,
                                                 0.5688888888888889, 0.4786286704993665,
                                                 0.2369268850561891};
};

// Composite Gauss-Legendre over the intervals of `mesh`, each split into
// `subdivisions` equal pieces.
template <typename Integrand, typename Value>
Value composite_gauss(const std::vector<double>& mesh, int subdivisions, Value zero,
                      Integrand&& g) {
  Value acc = zero;
  for (std::size_t k = 0; k + 1 < mesh.size(); ++k) {
    const double h = (mesh[k + 1] - mesh[k]) / subdivisions;
    for (int s = 0; s < subdivisions; ++s) {
      const double a = mesh[k] + s * h;
      const double mid = a + 0.5 * h;
      for (int q = 0; q < 5; ++q) {
        acc += (0.5 * h * GaussLegendre5::weights[q]) * g(mid + 0.5 * h * GaussLegendre5::nodes[q]);
      }
    }
  }
  return acc;
}

}  // namespace oddlimit
