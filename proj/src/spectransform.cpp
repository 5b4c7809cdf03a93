#include "btv/spectransform.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

namespace btv {
namespace {

void check_delta(Index p, const Vector& delta) {
  if (delta.size() != p)
    throw DimensionError("delta", "expected " + std::to_string(p) + " entries");
  if (!delta.allFinite() || (delta.array() < 0.0).any())
    throw InvariantError("delta must be finite and non-negative");
}

// True when {y : gamma y + psi <= 0} is provably empty. Fourier-Motzkin
// elimination, exact for the small output dimensions seen here; gives up and
// answers false once the row count exceeds the cap.
bool polytope_empty(const Matrix& gamma, const Vector& psi) {
  constexpr std::size_t kRowCap = 4096;
  constexpr double kTol = 1e-12;
  struct Row {
    Vector a;
    double b;  // a y <= b
  };
  std::vector<Row> rows;
  for (Index r = 0; r < gamma.rows(); ++r) {
    Row row{gamma.row(r).transpose(), -psi[r]};
    const double scale = row.a.cwiseAbs().maxCoeff();
    if (scale > 0.0) {
      row.a /= scale;
      row.b /= scale;
    }
    rows.push_back(std::move(row));
  }
  for (Index j = 0; j < gamma.cols(); ++j) {
    std::vector<Row> pos, neg, next;
    for (auto& r : rows) {
      if (r.a[j] > kTol) pos.push_back(std::move(r));
      else if (r.a[j] < -kTol) neg.push_back(std::move(r));
      else next.push_back(std::move(r));
    }
    if (next.size() + pos.size() * neg.size() > kRowCap) return false;
    for (const auto& u : pos)
      for (const auto& l : neg) {
        const double wu = -l.a[j], wl = u.a[j];
        Row c{wu * u.a + wl * l.a, wu * u.b + wl * l.b};
        c.a[j] = 0.0;
        const double scale = c.a.cwiseAbs().maxCoeff();
        if (scale > kTol) {
          c.a /= scale;
          c.b /= scale;
        } else {
          c.a.setZero();
          c.b /= wu + wl;
        }
        next.push_back(std::move(c));
      }
    rows = std::move(next);
  }
  for (const auto& r : rows)
    if (r.b < -kTol) return true;
  return false;
}

}  // namespace

Vector polytope_margins(const Matrix& gamma, const Vector& delta) {
  check_delta(gamma.cols(), delta);
  return gamma.cwiseAbs() * delta;
}

EllipsoidMargin ellipsoid_margin(const Matrix& q, const Vector& delta) {
  check_delta(q.rows(), delta);
  Eigen::SelfAdjointEigenSolver<Matrix> es(q);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of Q failed");
  EllipsoidMargin out{0.0, es.eigenvectors(), es.eigenvalues()};
  for (Index i = 0; i < out.basis.cols(); ++i) {
    Index arg = 0;
    out.basis.col(i).cwiseAbs().maxCoeff(&arg);
    if (out.basis(arg, i) < 0.0) out.basis.col(i) *= -1.0;
  }
  double sum = 0.0;
  for (Index i = 0; i < out.basis.cols(); ++i) {
    const double proj = out.basis.col(i).cwiseAbs().dot(delta);
    sum += out.eigenvalues[i] * proj * proj;
  }
  out.delta_r = std::sqrt(sum);
  return out;
}

TransformedSpec transform_polytope(const PolytopeSpec& spec, const Vector& delta) {
  if (spec.polarity != Polarity::kSafeRegion)
    throw std::invalid_argument("transform_polytope expects a safe-region spec");
  const Vector d = polytope_margins(spec.gamma, delta);
  PolytopeSpec shrunk(spec.gamma, spec.psi + d, Polarity::kSafeRegion);
  PolytopeSpec enlarged(spec.gamma, spec.psi - d, Polarity::kSafeRegion);
  std::optional<Spec> safe;
  if (!polytope_empty(shrunk.gamma, shrunk.psi)) safe = Spec(shrunk);
  return TransformedSpec{spec, safe, Spec(enlarged), Spec(enlarged),
                         delta, d, Matrix(), Vector()};
}

TransformedSpec transform_unsafe_polytope(const PolytopeSpec& spec,
                                          const Vector& delta) {
  if (spec.polarity != Polarity::kUnsafeRegion)
    throw std::invalid_argument(
        "transform_unsafe_polytope expects an unsafe-region spec");
  const Vector d = polytope_margins(spec.gamma, delta);
  PolytopeSpec enlarged(spec.gamma, spec.psi - d, Polarity::kUnsafeRegion);
  PolytopeSpec shrunk(spec.gamma, spec.psi + d, Polarity::kUnsafeRegion);
  std::optional<Spec> witness;
  if (!polytope_empty(shrunk.gamma, shrunk.psi)) witness = Spec(shrunk);
  return TransformedSpec{spec, Spec(enlarged), Spec(enlarged), witness,
                         delta, d, Matrix(), Vector()};
}

TransformedSpec transform_ellipsoid(const EllipsoidSpec& spec, const Vector& delta) {
  if (spec.polarity != Polarity::kSafeRegion)
    throw std::invalid_argument("transform_ellipsoid expects a safe-region spec");
  const EllipsoidMargin em = ellipsoid_margin(spec.q, delta);
  const double inner = spec.radius - em.delta_r;
  EllipsoidSpec enlarged(spec.q, spec.a, spec.radius + em.delta_r,
                         Polarity::kSafeRegion);
  std::optional<Spec> safe;
  if (inner > 0.0)
    safe = EllipsoidSpec(spec.q, spec.a, inner, Polarity::kSafeRegion);
  return TransformedSpec{spec,         safe,
                         Spec(enlarged), Spec(enlarged),
                         delta,        Vector::Constant(1, em.delta_r),
                         em.basis,     em.eigenvalues};
}

TransformedSpec transform_unsafe_ellipsoid(const EllipsoidSpec& spec,
                                           const Vector& delta) {
  if (spec.polarity != Polarity::kUnsafeRegion)
    throw std::invalid_argument(
        "transform_unsafe_ellipsoid expects an unsafe-region spec");
  const EllipsoidMargin em = ellipsoid_margin(spec.q, delta);
  const double inner = spec.radius - em.delta_r;
  EllipsoidSpec enlarged(spec.q, spec.a, spec.radius + em.delta_r,
                         Polarity::kUnsafeRegion);
  std::optional<Spec> witness;
  if (inner > 0.0)
    witness = EllipsoidSpec(spec.q, spec.a, inner, Polarity::kUnsafeRegion);
  return TransformedSpec{spec,         Spec(enlarged),
                         Spec(enlarged), witness,
                         delta,        Vector::Constant(1, em.delta_r),
                         em.basis,     em.eigenvalues};
}

TransformedSpec transform(const Spec& spec, const Vector& delta) {
  if (const auto* s = std::get_if<PolytopeSpec>(&spec)) {
    return s->polarity == Polarity::kSafeRegion
               ? transform_polytope(*s, delta)
               : transform_unsafe_polytope(*s, delta);
  }
  const auto& e = std::get<EllipsoidSpec>(spec);
  return e.polarity == Polarity::kSafeRegion ? transform_ellipsoid(e, delta)
                                             : transform_unsafe_ellipsoid(e, delta);
}

std::vector<TransformedSpec> transform_all(const std::vector<Spec>& specs,
                                           const Vector& delta) {
  std::vector<TransformedSpec> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(transform(s, delta));
  return out;
}

std::vector<std::vector<TransformedSpec>> transform_pss(
    const std::vector<Spec>& specs, const std::vector<Vector>& deltas) {
  if (deltas.empty()) throw std::invalid_argument("one delta per mode is required");
  std::vector<std::vector<TransformedSpec>> out;
  out.reserve(deltas.size());
  for (const auto& d : deltas) out.push_back(transform_all(specs, d));
  return out;
}

}  // namespace btv
