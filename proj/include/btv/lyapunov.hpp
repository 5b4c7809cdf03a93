#pragma once

#include <Eigen/Eigenvalues>

#include "btv/model.hpp"

namespace btv {

inline constexpr double kLyapTol = 1e-8;
inline constexpr double kSymTol = 1e-10;

struct LyapunovResult {
  Matrix P;
  /// ||A P + P A^T + Q||_F / (2 ||A||_F ||P||_F + ||Q||_F)
  double relative_residual = 0.0;
};

/// Bartels-Stewart solver. The real Schur form of A is computed once and
/// reused for any number of right-hand sides and for the transposed equation.
class LyapunovSolver {
 public:
  /// Throws NotHurwitzError if A is not stable within `margin` (relative to
  /// ||A||_F), NumericalError if the Schur decomposition fails.
  explicit LyapunovSolver(const Matrix& a,
                          double margin = kDefaultStabilityMargin);

  /// A P + P A^T + Q = 0
  LyapunovResult solve(const Matrix& q) const;
  /// A^T P + P A + Q = 0
  LyapunovResult solve_transposed(const Matrix& q) const;

  const Matrix& a() const { return a_; }
  Index n() const { return a_.rows(); }
  double spectral_abscissa() const { return abscissa_; }

 private:
  LyapunovResult solve_impl(const Matrix& q, bool transposed) const;

  Matrix a_;
  Matrix u_, t_;    // A = U T U^T
  Matrix ur_, tr_;  // A^T = Ur Tr Ur^T, Tr = J T^T J
  double abscissa_ = 0.0;
};

LyapunovResult solve_lyapunov(const Matrix& a, const Matrix& q);
double lyapunov_residual(const Matrix& a, const Matrix& p, const Matrix& q);

struct GramianPair {
  Matrix Wc;
  Matrix Wo;
  double residual_c = 0.0;
  double residual_o = 0.0;
};

/// A Wc + Wc A^T + B B^T = 0 and A^T Wo + Wo A + C^T C = 0.
GramianPair gramians(const LtiSystem& sys);

}  // namespace btv
