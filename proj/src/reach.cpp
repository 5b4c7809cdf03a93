#include "btv/reach.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "btv/kernels.hpp"
#include "btv/simulate.hpp"

namespace btv {

double default_reach_step(const Matrix& a, double t_f) {
  const double na = spectral_norm(a);
  double h = t_f > 0.0 ? t_f / 200.0 : 1.0;
  if (na > 0.0) h = std::min(h, 0.1 / na);
  return h;
}

double remainder_factor(double x) {
  if (x <= 0.0) return 0.0;
  double r;
  if (x < 1e-3) {
    r = x * x * (0.5 + x * (1.0 / 6.0 + x / 24.0)) * (1.0 + x);
  } else {
    r = std::expm1(x) - x;
  }
  return r * (1.0 + 1e-12);
}

ReachResult reach_lti(const LtiSystem& sys, const HyperBox& x0,
                      const HyperBox& u_box, double t_f, const ReachOptions& opts) {
  return reach_lti(sys, Zonotope::from_box(x0), u_box, t_f, opts);
}

ReachResult reach_lti(const LtiSystem& sys, const Zonotope& x0,
                      const HyperBox& u_box, double t_f, const ReachOptions& opts) {
  if (x0.dim() != sys.n()) throw DimensionError("x0", "dimension does not match n");
  if (u_box.dim() != sys.m()) throw DimensionError("input", "dimension does not match m");
  if (!(t_f >= 0.0) || !std::isfinite(t_f))
    throw std::invalid_argument("t_f must be finite and non-negative");
  double h = opts.step_h ? *opts.step_h : default_reach_step(sys.A(), t_f);
  if (!(h > 0.0)) throw std::invalid_argument("step_h must be positive");

  ReachResult out;
  out.t_f = t_f;
  const Matrix& a = sys.A();
  const Matrix& c = sys.C();
  Zonotope x = x0.reduce(opts.order_cap);
  if (t_f == 0.0) {
    out.h = 0.0;
    out.steps.push_back({0.0, 0.0, x.linear_map(c)});
    return out;
  }
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t_f / h - 1e-9)));
  h = t_f / static_cast<double>(steps);
  out.h = h;

  const Index n = sys.n();
  const Discretization d = discretize(a, sys.B(), h);
  const double na = spectral_norm(a);
  const double beta = remainder_factor(na * h);
  // beta / ||A||, continuous at ||A|| = 0
  const double beta_over_a = na > 0.0 ? beta / na : 0.0;

  const Vector uc = u_box.center();
  const Vector ur = u_box.halfwidth();
  const Vector cw = d.Gamma * uc;                       // exact response to uc
  const Matrix gw = h * sys.B() * ur.asDiagonal();      // varying part
  Vector bu_rad(n);
  kernels::abs_gemv(sys.B(), ur.data(), bu_rad.data());
  const double sup_bu_var = bu_rad.norm();
  const double sup_bu_c = (sys.B() * uc).norm();
  // Deviation of the input response from its linear interpolation, and of a
  // time-varying input from its averaged form.
  const double rho_u = beta_over_a * (sup_bu_c + sup_bu_var);
  const double rho_next = beta_over_a * sup_bu_var;
  // x_j = Phi^j X0 + sum_{i<j} Phi^i (W + rho box) + center terms. The
  // homogeneous part is propagated exactly and the input part is accumulated
  // as Phi^i-images, so boxed generators are never mapped again.
  Matrix w(n, gw.cols() + n);
  w.leftCols(gw.cols()) = gw;
  w.rightCols(n) = rho_next * Matrix::Identity(n, n);
  Zonotope hom = x;
  Zonotope acc(Vector::Zero(n), Matrix(n, 0));
  Matrix phi_pow = Matrix::Identity(n, n);

  out.steps.reserve(steps);
  for (std::size_t j = 0; j < steps; ++j) {
    x = hom.minkowski_sum(acc);
    const Zonotope px = x.linear_map(d.Phi);
    // Hull over the step: x + lambda (Phi x + cw - x), lambda in [0, 1].
    const Index g = x.num_generators();
    Matrix gens(n, 2 * g + 1 + gw.cols());
    gens.leftCols(g) = 0.5 * (x.generators() + px.generators());
    gens.col(g) = 0.5 * (x.center() - px.center() - cw);
    gens.middleCols(g + 1, g) = 0.5 * (x.generators() - px.generators());
    gens.rightCols(gw.cols()) = gw;
    const double bloat = beta * x.norm_bound() + rho_u;
    Zonotope omega =
        Zonotope(0.5 * (x.center() + px.center() + cw), std::move(gens))
            .add_box(Vector::Constant(n, bloat))
            .compact()
            .reduce(opts.order_cap);
    const double t0 = static_cast<double>(j) * h;
    const double t1 = j + 1 == steps ? t_f : static_cast<double>(j + 1) * h;
    out.steps.push_back({t0, t1, omega.linear_map(c)});
    hom = hom.linear_map(d.Phi);
    hom = Zonotope(hom.center() + cw, hom.generators());
    acc = acc.minkowski_sum(Zonotope(Vector::Zero(n), phi_pow * w))
              .compact()
              .reduce(opts.order_cap);
    phi_pow = d.Phi * phi_pow;
    if (!hom.center().allFinite() || !acc.generators().allFinite())
      throw NumericalError("reach set became non-finite");
  }
  return out;
}

const char* outcome_name(CheckOutcome o) {
  switch (o) {
    case CheckOutcome::kSafe: return "safe";
    case CheckOutcome::kMaybeUnsafe: return "maybe-unsafe";
    case CheckOutcome::kIndeterminate: return "indeterminate";
  }
  return "?";
}

namespace {

Matrix upper_factor(const Matrix& q) {
  Eigen::LLT<Matrix> llt(q);
  if (llt.info() != Eigen::Success) throw NumericalError("Q is not positive definite");
  return Matrix(llt.matrixL()).transpose();  // Q = U^T U
}

// min ||r0 + M xi||^2 over the unit box, by cyclic coordinate descent.
Vector box_qp(const Vector& r0, const Matrix& m, int sweeps = 200) {
  Vector xi = Vector::Zero(m.cols());
  Vector r = r0;
  const Vector col_sq = m.colwise().squaredNorm();
  for (int s = 0; s < sweeps; ++s) {
    double moved = 0.0;
    for (Index j = 0; j < m.cols(); ++j) {
      if (col_sq[j] == 0.0) continue;
      const double target =
          std::clamp(xi[j] - m.col(j).dot(r) / col_sq[j], -1.0, 1.0);
      const double step = target - xi[j];
      if (step != 0.0) {
        r += step * m.col(j);
        xi[j] = target;
        moved = std::max(moved, std::abs(step));
      }
    }
    if (moved < 1e-12) break;
  }
  return xi;
}

double quad(const EllipsoidSpec& e, const Vector& y) {
  const Vector d = y - e.a;
  return d.dot(e.q * d);
}

Vector sign_of(const Vector& v) {
  return v.unaryExpr([](double x) { return x >= 0.0 ? 1.0 : -1.0; });
}

// Upper bound on max (y - a)^T Q (y - a) over z.
double quad_upper_bound(const Zonotope& z, const EllipsoidSpec& e) {
  const Matrix u = upper_factor(e.q);
  const Vector w0 = u * (z.center() - e.a);
  const Matrix wg = u * z.generators();
  Vector rad(w0.size());
  const Vector ones = Vector::Ones(wg.cols());
  kernels::abs_gemv(wg, ones.data(), rad.data());
  const double interval = (w0.cwiseAbs() + rad).squaredNorm();
  double tri = w0.norm();
  for (Index j = 0; j < wg.cols(); ++j) tri += wg.col(j).norm();
  return std::min(interval, tri * tri);
}

bool row_satisfied_everywhere(const Zonotope& z, const PolytopeSpec& s, Index i) {
  // max over z of Gamma_i y + Psi_i <= 0
  return z.support(s.gamma.row(i).transpose()) + s.psi[i] <= 0.0;
}

bool row_violated_everywhere(const Zonotope& z, const PolytopeSpec& s, Index i) {
  // min over z of Gamma_i y + Psi_i > 0
  return -z.support(-s.gamma.row(i).transpose()) + s.psi[i] > 0.0;
}

}  // namespace

bool proves_satisfied(const Zonotope& z, const Spec& region) {
  if (const auto* s = std::get_if<PolytopeSpec>(&region)) {
    if (s->polarity == Polarity::kSafeRegion) {
      for (Index i = 0; i < s->q(); ++i)
        if (!row_satisfied_everywhere(z, *s, i)) return false;
      return true;
    }
    for (Index i = 0; i < s->q(); ++i)
      if (row_violated_everywhere(z, *s, i)) return true;
    return false;
  }
  const auto& e = std::get<EllipsoidSpec>(region);
  if (e.polarity == Polarity::kSafeRegion)
    return quad_upper_bound(z, e) <= e.radius * e.radius;
  // Disjointness from the ellipsoid via a separating hyperplane through the
  // Q-nearest point found in z.
  const Matrix u = upper_factor(e.q);
  const Vector xi = box_qp(u * (z.center() - e.a), u * z.generators());
  const Vector ys = z.center() + z.generators() * xi;
  const Vector nrm = e.q * (ys - e.a);
  if (nrm.norm() == 0.0) return false;
  const double zmin = nrm.dot(z.center() - e.a) - (z.generators().transpose() * nrm).cwiseAbs().sum();
  const double emax = e.radius * std::sqrt(std::max(0.0, quad(e, ys)));
  return zmin > emax;
}

std::optional<Vector> find_violation(const Zonotope& z, const Spec& region) {
  auto violates = [&](const Vector& y) { return !spec_satisfied(region, y); };
  if (violates(z.center())) return z.center();
  const Matrix& g = z.generators();
  if (const auto* s = std::get_if<PolytopeSpec>(&region)) {
    if (s->polarity == Polarity::kSafeRegion) {
      for (Index i = 0; i < s->q(); ++i) {
        const Vector l = s->gamma.row(i).transpose();
        const Vector y = z.center() + g * sign_of(g.transpose() * l);
        if (violates(y)) return y;
      }
      return std::nullopt;
    }
    // Point of z inside the polytope: projected gradient on the squared
    // constraint violation.
    const Matrix mg = s->gamma * g;
    const double lip = 2.0 * std::max(mg.squaredNorm(), 1e-300);
    Vector xi = Vector::Zero(g.cols());
    for (int it = 0; it < 2000; ++it) {
      const Vector y = z.center() + g * xi;
      const Vector viol = (s->gamma * y + s->psi).cwiseMax(0.0);
      if (viol.maxCoeff() <= 0.0) {
        if (violates(y)) return y;
        break;
      }
      xi = (xi - (2.0 / lip) * (mg.transpose() * viol)).cwiseMax(-1.0).cwiseMin(1.0);
    }
    return std::nullopt;
  }
  const auto& e = std::get<EllipsoidSpec>(region);
  if (e.polarity == Polarity::kUnsafeRegion) {
    const Matrix u = upper_factor(e.q);
    const Vector xi = box_qp(u * (z.center() - e.a), u * g);
    const Vector y = z.center() + g * xi;
    if (violates(y)) return y;
    return std::nullopt;
  }
  // Outside a safe ellipsoid: sign ascent from several directions.
  std::vector<Vector> dirs{e.q * (z.center() - e.a)};
  for (Index i = 0; i < z.dim(); ++i) {
    dirs.push_back(e.q.col(i));
    dirs.push_back(-e.q.col(i));
  }
  for (const auto& d0 : dirs) {
    Vector dir = d0;
    for (int it = 0; it < 20; ++it) {
      const Vector y = z.center() + g * sign_of(g.transpose() * dir);
      if (violates(y)) return y;
      const Vector next = e.q * (y - e.a);
      if (next.isApprox(dir)) break;
      dir = next;
    }
  }
  return std::nullopt;
}

CheckResult check_spec(const ReachResult& reach, const TransformedSpec& spec) {
  CheckResult out;
  bool all_safe = spec.safe_region.has_value();
  for (std::size_t j = 0; j < reach.steps.size(); ++j) {
    const Zonotope& z = reach.steps[j].y;
    if (all_safe && !proves_satisfied(z, *spec.safe_region)) all_safe = false;
    if (!all_safe) {
      if (auto pt = find_violation(z, spec.unsafe_region)) {
        out.outcome = CheckOutcome::kMaybeUnsafe;
        out.step = j;
        out.point = std::move(pt);
        return out;
      }
    }
  }
  if (all_safe) {
    out.outcome = CheckOutcome::kSafe;
  } else {
    out.outcome = CheckOutcome::kIndeterminate;
    if (!spec.safe_region) out.note = "transformed safe region is empty";
  }
  return out;
}

CheckResult check_specs(const ReachResult& reach,
                        const std::vector<TransformedSpec>& specs) {
  CheckResult combined;
  combined.outcome = CheckOutcome::kSafe;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    CheckResult r = check_spec(reach, specs[i]);
    if (r.outcome == CheckOutcome::kMaybeUnsafe) {
      r.spec_index = i;
      return r;
    }
    if (r.outcome == CheckOutcome::kIndeterminate &&
        combined.outcome == CheckOutcome::kSafe) {
      combined = r;
      combined.spec_index = i;
    }
  }
  return combined;
}

}  // namespace btv
