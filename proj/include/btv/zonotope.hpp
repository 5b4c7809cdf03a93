#pragma once

#include "btv/model.hpp"

namespace btv {

/// {c + G xi : ||xi||_inf <= 1}
class Zonotope {
 public:
  Zonotope() = default;
  Zonotope(Vector center, Matrix generators);
  static Zonotope from_box(const HyperBox& box);

  const Vector& center() const { return c_; }
  const Matrix& generators() const { return g_; }
  Index dim() const { return c_.size(); }
  Index num_generators() const { return g_.cols(); }

  Zonotope linear_map(const Matrix& m) const;
  Zonotope minkowski_sum(const Zonotope& other) const;
  /// Adds the box [-r, r] (zero entries are skipped).
  Zonotope add_box(const Vector& radius) const;
  Zonotope translate(const Vector& v) const;

  /// c +- |G| 1
  HyperBox interval_hull() const;
  /// |G| 1
  Vector radius() const;
  /// max over the set of l^T z
  double support(const Vector& l) const;
  /// Upper bound on max ||z||_2 over the set.
  double norm_bound() const;

  /// Keeps the largest generators and replaces the rest by their interval
  /// hull so that at most order_cap * dim generators remain. Sound
  /// over-approximation.
  Zonotope reduce(double order_cap) const;
  /// Drops all-zero generator columns.
  Zonotope compact() const;

 private:
  Vector c_;
  Matrix g_;
};

}  // namespace btv
