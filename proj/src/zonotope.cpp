#include "btv/zonotope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "btv/kernels.hpp"

namespace btv {

Zonotope::Zonotope(Vector center, Matrix generators)
    : c_(std::move(center)), g_(std::move(generators)) {
  if (g_.cols() > 0 && g_.rows() != c_.size())
    throw DimensionError("generators", "row count must match the center");
  if (g_.cols() == 0) g_.resize(c_.size(), 0);
}

Zonotope Zonotope::from_box(const HyperBox& box) {
  return Zonotope(box.center(), Matrix(box.halfwidth().asDiagonal())).compact();
}

Zonotope Zonotope::linear_map(const Matrix& m) const {
  if (m.cols() != dim()) throw DimensionError("map", "column count must match");
  return Zonotope(m * c_, m * g_);
}

Zonotope Zonotope::minkowski_sum(const Zonotope& other) const {
  if (other.dim() != dim()) throw DimensionError("zonotope", "dimension mismatch");
  Matrix g(dim(), g_.cols() + other.g_.cols());
  g << g_, other.g_;
  return Zonotope(c_ + other.c_, std::move(g));
}

Zonotope Zonotope::add_box(const Vector& radius) const {
  if (radius.size() != dim()) throw DimensionError("radius", "dimension mismatch");
  const Index extra = (radius.array() != 0.0).count();
  Matrix g = Matrix::Zero(dim(), g_.cols() + extra);
  g.leftCols(g_.cols()) = g_;
  Index col = g_.cols();
  for (Index i = 0; i < dim(); ++i)
    if (radius[i] != 0.0) g(i, col++) = std::abs(radius[i]);
  return Zonotope(c_, std::move(g));
}

Zonotope Zonotope::translate(const Vector& v) const { return Zonotope(c_ + v, g_); }

Vector Zonotope::radius() const {
  Vector r(dim());
  const Vector ones = Vector::Ones(g_.cols());
  kernels::abs_gemv(g_, ones.data(), r.data());
  return r;
}

HyperBox Zonotope::interval_hull() const {
  const Vector r = radius();
  return HyperBox(c_ - r, c_ + r);
}

double Zonotope::support(const Vector& l) const {
  double s = l.dot(c_);
  for (Index j = 0; j < g_.cols(); ++j) s += std::abs(kernels::active().dot(l.data(), g_.col(j).data(), static_cast<std::size_t>(dim())));
  return s;
}

double Zonotope::norm_bound() const {
  return (c_.cwiseAbs() + radius()).norm();
}

Zonotope Zonotope::compact() const {
  std::vector<Index> keep;
  for (Index j = 0; j < g_.cols(); ++j)
    if (kernels::active().max_abs(g_.col(j).data(), static_cast<std::size_t>(dim())) != 0.0) keep.push_back(j);
  if (static_cast<Index>(keep.size()) == g_.cols()) return *this;
  Matrix g(dim(), static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) g.col(static_cast<Index>(j)) = g_.col(keep[j]);
  return Zonotope(c_, std::move(g));
}

Zonotope Zonotope::reduce(double order_cap) const {
  const Index d = dim();
  const Index cap = static_cast<Index>(std::floor(order_cap * static_cast<double>(d)));
  if (g_.cols() <= cap || d == 0) return *this;
  const Index keep = std::max<Index>(0, cap - d);
  const auto& kt = kernels::active();
  const auto n = static_cast<std::size_t>(d);
  // Girard's ordering: generators closest to axis-aligned boxes go first.
  std::vector<double> score(static_cast<std::size_t>(g_.cols()));
  for (Index j = 0; j < g_.cols(); ++j)
    score[static_cast<std::size_t>(j)] =
        kt.abs_sum(g_.col(j).data(), n) - kt.max_abs(g_.col(j).data(), n);
  std::vector<Index> order(static_cast<std::size_t>(g_.cols()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)];
  });
  Matrix g = Matrix::Zero(d, keep + d);
  for (Index j = 0; j < keep; ++j) g.col(j) = g_.col(order[static_cast<std::size_t>(j)]);
  Vector box = Vector::Zero(d);
  for (std::size_t j = static_cast<std::size_t>(keep); j < order.size(); ++j)
    kt.abs_axpy(1.0, g_.col(order[j]).data(), box.data(), n);
  for (Index i = 0; i < d; ++i) g(i, keep + i) = box[i];
  return Zonotope(c_, std::move(g)).compact();
}

}  // namespace btv
