#pragma once

#include <vector>

#include "btv/model.hpp"

namespace btv {

/// Largest singular value.
double spectral_norm(const Matrix& m);

/// e^M
Matrix expm(const Matrix& m);

/// Exact zero-order-hold discretization: x(t+h) = Phi x(t) + Gamma u for u
/// constant on the step.
struct Discretization {
  double h = 0.0;
  Matrix Phi;
  Matrix Gamma;
};

Discretization discretize(const Matrix& a, const Matrix& b, double h);

/// Largest h <= t_f with ||A||_2 h <= 0.1.
double default_sim_step(const Matrix& a, double t_f);

/// u(t) = values[i] for times[i] <= t < times[i+1]; times[0] == 0.
class PiecewiseConstantSignal {
 public:
  PiecewiseConstantSignal(std::vector<double> times, std::vector<Vector> values);
  static PiecewiseConstantSignal constant(const Vector& u);

  const Vector& value(double t) const;
  const std::vector<double>& times() const { return times_; }
  const std::vector<Vector>& values() const { return values_; }
  Index dim() const { return values_.front().size(); }
  /// First switch time strictly after t, or +inf.
  double next_switch(double t) const;

 private:
  std::vector<double> times_;
  std::vector<Vector> values_;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Vector> x;
  std::vector<Vector> y;
};

/// Steps of length h (shortened to land on every input switch and on t_f),
/// each propagated exactly. Samples are recorded at every step boundary.
Trajectory simulate(const LtiSystem& sys, const Vector& x0,
                    const PiecewiseConstantSignal& u, double t_f, double h);

}  // namespace btv
