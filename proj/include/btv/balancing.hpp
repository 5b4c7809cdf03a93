#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "btv/lyapunov.hpp"
#include "btv/model.hpp"

namespace btv {

struct BalanceOptions {
  /// Smallest accepted eigenvalue ratio of Wc, and Hankel singular value
  /// ratio, before the realization is declared non-minimal.
  double rank_tol = 1e-12;
  /// cond(H) above this attaches a warning.
  double cond_max = 1e8;
};

struct BalancedRealization {
  Matrix H;
  Matrix H_inv;
  Vector sigma;  // nonincreasing
  Matrix A_t, B_t, C_t;
  /// max relative deviation of the transformed gramians from diag(sigma)
  double balance_error = 0.0;
  double condition = 1.0;
  GramianPair gramians;
  std::vector<std::string> warnings;

  Index n() const { return H.rows(); }
  LtiSystem system() const { return LtiSystem(A_t, B_t, C_t); }
};

/// Square-root balancing: Wc = G G^T via its eigendecomposition, then the SVD
/// of Lo^T G (Wo = Lo Lo^T) gives K and Sigma. Rows of H are signed so that
/// their largest-magnitude entry is positive.
BalancedRealization balance(const LtiSystem& sys, const BalanceOptions& opts = {});

/// sqrt(eig(Wc Wo)), nonincreasing. Works for non-minimal systems too.
Vector hankel_singular_values(const LtiSystem& sys);

struct Abstraction {
  LtiSystem reduced;
  Index k = 0;
  Matrix S;            // k x n selection
  Matrix initial_map;  // S H, maps full-order states to reduced states
  HyperBox x0_reduced;
  std::shared_ptr<const BalancedRealization> parent;
  std::optional<Vector> delta;
};

struct TruncateOptions {
  /// Enforce p < k. Off only for degenerate checks such as k = n = p = 1.
  bool require_output_abstraction = true;
};

Abstraction truncate(std::shared_ptr<const BalancedRealization> bal, Index k,
                     const HyperBox& x0, const TruncateOptions& opts = {});
Abstraction truncate(const BalancedRealization& bal, Index k, const HyperBox& x0,
                     const TruncateOptions& opts = {});

/// Exact per-row interval of {M x : x in box}.
HyperBox linear_image_hull(const Matrix& m, const HyperBox& box);

/// [H; S H]
Matrix augmented_initial_map(const BalancedRealization& bal, Index k);

/// Upper bound on sup ||(H x0, S H x0)|| over the box, from the exact
/// per-coordinate intervals.
double sup_augmented_initial_norm(const BalancedRealization& bal, Index k,
                                  const HyperBox& x0);
double sup_norm_over_box(const HyperBox& box);

}  // namespace btv
