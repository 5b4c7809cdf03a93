#pragma once

#include <optional>
#include <vector>

#include "btv/model.hpp"

namespace btv {

/// Abstraction-level form of one output specification. Each region is itself
/// a Spec, read through spec_satisfied():
///  - safe_region: y_r satisfies it  =>  y satisfies the original.
///    nullopt when that region is empty.
///  - unsafe_region: the set of y_r that violate it.
///  - witness_region: y_r violates it  =>  y violates the original.
///    nullopt when that region is empty.
/// For a safe-region original, unsafe_region and witness_region coincide. For
/// an unsafe-region original, safe_region and unsafe_region coincide (the
/// enlarged unsafe set) and witness_region is the shrunk one.
struct TransformedSpec {
  Spec original;
  std::optional<Spec> safe_region;
  Spec unsafe_region;
  std::optional<Spec> witness_region;
  Vector delta_used;
  /// Per-row Delta for polytopes; a single Delta_R for ellipsoids.
  Vector margins;
  /// Ellipsoids only: eigenbasis (columns) and eigenvalues of Q used for
  /// Delta_R.
  Matrix basis;
  Vector eigenvalues;

  bool safe_region_empty() const { return !safe_region.has_value(); }
};

/// Delta_i = sum_j |Gamma_ij| delta_j
Vector polytope_margins(const Matrix& gamma, const Vector& delta);

struct EllipsoidMargin {
  double delta_r;
  Matrix basis;
  Vector eigenvalues;
};

/// Delta_R = sqrt(sum_i lambda_i (sum_j |e_i(j)| delta_j)^2) with Q = E L E^T.
/// Each eigenvector is signed so its largest-magnitude entry is positive.
EllipsoidMargin ellipsoid_margin(const Matrix& q, const Vector& delta);

TransformedSpec transform_polytope(const PolytopeSpec& spec, const Vector& delta);
TransformedSpec transform_ellipsoid(const EllipsoidSpec& spec, const Vector& delta);
TransformedSpec transform_unsafe_polytope(const PolytopeSpec& spec,
                                          const Vector& delta);
TransformedSpec transform_unsafe_ellipsoid(const EllipsoidSpec& spec,
                                           const Vector& delta);

/// Dispatches on shape and polarity.
TransformedSpec transform(const Spec& spec, const Vector& delta);
std::vector<TransformedSpec> transform_all(const std::vector<Spec>& specs,
                                           const Vector& delta);

/// One entry per mode, each holding the transforms of every spec under that
/// mode's delta.
std::vector<std::vector<TransformedSpec>> transform_pss(
    const std::vector<Spec>& specs, const std::vector<Vector>& deltas);

}  // namespace btv
