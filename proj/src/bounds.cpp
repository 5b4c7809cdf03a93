#include "btv/bounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "btv/kernels.hpp"
#include "btv/parallel.hpp"
#include "btv/simulate.hpp"

namespace btv {
namespace {

double lambda_max_sym(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("symmetric eigendecomposition failed");
  return es.eigenvalues().maxCoeff();
}

// sqrt(sum_i max(|l_i|, |u_i|)^2) over the exact image of the box under m.
double sup_norm_of_image(const Matrix& m, const HyperBox& box) {
  return sup_norm_over_box(linear_image_hull(m, box));
}

Vector row_norms(const Matrix& c) { return c.rowwise().norm(); }

// Uniform grid with ||A|| h <= 0.1 covering [0, t_f].
std::size_t grid_steps(double norm_a, double t_f) {
  if (t_f <= 0.0) return 0;
  const double n = std::ceil(t_f * norm_a / 0.1);
  return static_cast<std::size_t>(std::max(1.0, n));
}

// Upper bound on sup |y_i''| over one step of length h starting from state x,
// for y = C e^{A s} x. Taylor expansion of y'' to order kOrder - 2 with the
// exact derivatives C A^j x; the remainder uses ||C_i A^{kOrder+1}|| e^{mu h}.
// Vanishes with the error itself, so exact reductions give exact zeros.
class CurvatureBound {
 public:
  static constexpr int kOrder = 8;

  CurvatureBound(const AugmentedSystem& aug, double h) : p_(aug.p()) {
    const Index dim = aug.dim();
    rows_.resize((kOrder - 1) * p_, dim);
    weights_.resize(kOrder - 1);
    Matrix ca = aug.C_bar * aug.A_bar;
    double w = 1.0;
    for (int j = 2; j <= kOrder; ++j) {
      ca = ca * aug.A_bar;  // C A^j
      rows_.middleRows((j - 2) * p_, p_) = ca;
      weights_[j - 2] = w;
      w *= h / static_cast<double>(j - 1);  // h^{j-1} / (j-1)!
    }
    const Matrix top = ca * aug.A_bar;  // C A^{kOrder+1}
    rem_ = row_norms(top) * (w * std::exp(aug.growth_rate * h));
    scratch_.resize(rows_.rows());
  }

  /// Writes the per-output bound for state x into out.
  void operator()(const double* x, double xnorm, double* out) {
    kernels::gemv(rows_, x, scratch_.data());
    for (Index i = 0; i < p_; ++i) {
      double acc = rem_[i] * xnorm;
      for (int j = 0; j < kOrder - 1; ++j)
        acc += weights_[j] * std::abs(scratch_[j * p_ + i]);
      out[i] = acc;
    }
  }

 private:
  Index p_;
  Matrix rows_;
  Vector weights_;
  Vector rem_;
  Vector scratch_;
};

}  // namespace

const char* method_name(E1Method m) {
  switch (m) {
    case E1Method::kTheorem1: return "theorem1";
    case E1Method::kTheorem2: return "theorem2";
    case E1Method::kSimulation: return "simulation";
  }
  return "?";
}

const char* method_name(E2Method m) {
  switch (m) {
    case E2Method::kTheorem3: return "theorem3";
    case E2Method::kSimulation: return "simulation";
  }
  return "?";
}

bool is_simulation(E1Method m) { return m == E1Method::kSimulation; }
bool is_simulation(E2Method m) { return m == E2Method::kSimulation; }

AugmentedSystem build_augmented(const BalancedRealization& bal,
                                const Abstraction& abs) {
  const Index n = bal.n(), k = abs.k;
  if (abs.reduced.n() != k || abs.reduced.p() != bal.C_t.rows() ||
      abs.reduced.m() != bal.B_t.cols() || k > n)
    throw DimensionError("abstraction", "does not derive from this realization");
  AugmentedSystem aug;
  aug.n = n;
  aug.k = k;
  aug.A_bar = Matrix::Zero(n + k, n + k);
  aug.A_bar.topLeftCorner(n, n) = bal.A_t;
  aug.A_bar.bottomRightCorner(k, k) = abs.reduced.A();
  aug.B_bar.resize(n + k, bal.B_t.cols());
  aug.B_bar << bal.B_t, abs.reduced.B();
  aug.C_bar.resize(bal.C_t.rows(), n + k);
  aug.C_bar << bal.C_t, -abs.reduced.C();
  aug.norm_a = spectral_norm(aug.A_bar);
  const double lmax = lambda_max_sym(aug.A_bar + aug.A_bar.transpose());
  aug.growth_rate = std::max(0.0, 0.5 * lmax);
  return aug;
}

void require_monotone(const AugmentedSystem& aug) {
  if (2.0 * aug.growth_rate > kMonotoneTol * aug.norm_a) {
    std::ostringstream msg;
    msg << "augmented system is not monotonically convergent: "
           "lambda_max(A + A^T) = "
        << 2.0 * aug.growth_rate << " exceeds " << kMonotoneTol << " * ||A||";
    throw InvariantError(msg.str());
  }
}

Vector e1_theoretical(const AugmentedSystem& aug, double sup_norm_x0_bar) {
  require_monotone(aug);
  return row_norms(aug.C_bar) * sup_norm_x0_bar;
}

namespace {

E1OptimizationResult e1_optimization_impl(const AugmentedSystem& aug,
                                          const Matrix& map, const HyperBox& box,
                                          const E1OptimizationOptions& opts) {
  const Index dim = aug.dim();
  const Index p = aug.p();
  E1OptimizationResult out;
  out.bound.resize(p);
  const double sup_x = sup_norm_of_image(map, box);
  bool monotone = true;
  try {
    require_monotone(aug);
  } catch (const InvariantError&) {
    monotone = false;
    out.warnings.push_back(
        "A_bar + A_bar^T is not negative semidefinite; only Lyapunov-based "
        "certificates are used");
  }
  const LyapunovSolver solver(aug.A_bar);
  const Matrix eye = Matrix::Identity(dim, dim);

  for (Index i = 0; i < p; ++i) {
    const Vector c = aug.C_bar.row(i).transpose();
    const double cn2 = c.squaredNorm();
    if (cn2 == 0.0 || sup_x == 0.0) {
      out.bound[i] = 0.0;
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    if (monotone) best = std::sqrt(cn2) * sup_x;  // P = ||c||^2 I
    for (double f : opts.eps_factors) {
      Matrix q = c * c.transpose();
      q.diagonal().array() += f * cn2;
      Matrix pl;
      try {
        pl = solver.solve_transposed(q).P;
      } catch (const NumericalError&) {
        continue;
      }
      Eigen::LLT<Matrix> llt_l(pl);
      if (llt_l.info() != Eigen::Success) continue;
      const double alpha = std::max(1.0, c.dot(llt_l.solve(c)));
      const Matrix p1 = alpha * pl;
      const double lmax1 = alpha * lambda_max_sym(pl);
      const int steps = monotone ? std::max(1, opts.theta_steps) : 1;
      for (int s = 1; s <= steps; ++s) {
        const double theta = static_cast<double>(s) / steps;
        const Matrix pm = theta * p1 + (1.0 - theta) * cn2 * eye;
        Eigen::LLT<Matrix> llt(pm);
        if (llt.info() != Eigen::Success) continue;
        const Matrix lt = Matrix(llt.matrixL()).transpose();
        const double via_factor = sup_norm_of_image(lt * map, box);
        const double via_eig =
            std::sqrt(theta * lmax1 + (1.0 - theta) * cn2) * sup_x;
        best = std::min({best, via_factor, via_eig});
      }
    }
    if (!std::isfinite(best)) {
      out.warnings.push_back("no feasible certificate for output " +
                             std::to_string(i) + "; using the norm bound");
      best = std::sqrt(cn2) * sup_x;
    }
    out.bound[i] = best;
  }
  return out;
}

}  // namespace

E1OptimizationResult e1_optimization(const AugmentedSystem& aug,
                                     const Matrix& initial_map,
                                     const HyperBox& x0,
                                     const E1OptimizationOptions& opts) {
  if (initial_map.rows() != aug.dim() || initial_map.cols() != x0.dim())
    throw DimensionError("initial map", "does not match the augmented system");
  return e1_optimization_impl(aug, initial_map, x0, opts);
}

E1OptimizationResult e1_optimization(const AugmentedSystem& aug,
                                     const HyperBox& x0_bar_box,
                                     const E1OptimizationOptions& opts) {
  if (x0_bar_box.dim() != aug.dim())
    throw DimensionError("x0_bar", "dimension does not match n + k");
  return e1_optimization_impl(aug, Matrix::Identity(aug.dim(), aug.dim()),
                              x0_bar_box, opts);
}

Vector e1_simulation(const AugmentedSystem& aug, const Matrix& initial_map,
                     const HyperBox& x0, double t_f, std::size_t vertex_cap) {
  if (initial_map.rows() != aug.dim() || initial_map.cols() != x0.dim())
    throw DimensionError("initial map", "does not match the augmented system");
  const auto free = x0.free_coordinates();
  const std::size_t d = free.size();
  if (d >= 63 || (std::size_t{1} << d) > vertex_cap) {
    std::ostringstream msg;
    msg << "vertex simulation needs 2^" << d << " runs, above the cap of "
        << vertex_cap;
    throw CapacityError(msg.str());
  }
  const std::size_t vertices = std::size_t{1} << d;
  const Index dim = aug.dim(), p = aug.p();
  const std::size_t steps = grid_steps(aug.norm_a, t_f);
  const double h = steps ? t_f / static_cast<double>(steps) : 0.0;
  const Matrix phi = steps ? expm(aug.A_bar * h) : Matrix::Identity(dim, dim);
  const Vector cnorm = row_norms(aug.C_bar);

  std::vector<Vector> per_vertex(vertices, Vector::Zero(p));
  parallel_for(vertices, [&](std::size_t v) {
    CurvatureBound curvature(aug, h);
    Vector curv(p);
    Vector x0v = x0.lb();
    for (std::size_t b = 0; b < d; ++b)
      if (v >> b & 1U) x0v[free[b]] = x0.ub()[free[b]];
    Vector x(dim), next(dim), y(p), y_next(p);
    kernels::gemv(initial_map, x0v.data(), x.data());
    kernels::gemv(aug.C_bar, x.data(), y.data());
    Vector best = y.cwiseAbs();
    for (std::size_t s = 0; s < steps; ++s) {
      const double xn = x.norm();
      const double t = static_cast<double>(s) * h;
      // ||x(tau)|| <= e^{mu (tau - t)} ||x(t)||: nothing later can exceed this.
      const double tail = xn * std::exp(aug.growth_rate * (t_f - t));
      if (((cnorm * tail).array() <= best.array()).all()) break;
      kernels::gemv(phi, x.data(), next.data());
      kernels::gemv(aug.C_bar, next.data(), y_next.data());
      // Linear interpolation error is at most h^2 / 8 sup |y''|.
      curvature(x.data(), xn, curv.data());
      for (Index i = 0; i < p; ++i)
        best[i] = std::max(best[i], std::max(std::abs(y[i]), std::abs(y_next[i])) +
                                        h * h / 8.0 * curv[i]);
      x.swap(next);
      y.swap(y_next);
    }
    per_vertex[v] = best;
  });
  Vector out = Vector::Zero(p);
  for (const auto& b : per_vertex) out = out.cwiseMax(b);
  return out;
}

double input_sup_norm(const HyperBox& u_box) { return u_box.sup_norm(); }

Vector e2_theoretical(const Vector& sigma, Index k, const HyperBox& u_box,
                      Index p) {
  if (k < 0 || k > sigma.size())
    throw std::invalid_argument("k must satisfy 0 <= k <= n");
  double sum = 0.0;
  for (Index j = k; j < sigma.size(); ++j)
    sum += static_cast<double>(2 * (j + 1) - 1) * sigma[j];
  return Vector::Constant(p, 2.0 * sum * input_sup_norm(u_box));
}

E2SimulationResult e2_simulation(const AugmentedSystem& aug,
                                 const HyperBox& u_box, double decay_tol,
                                 std::size_t max_steps) {
  const Index dim = aug.dim(), p = aug.p(), m = aug.B_bar.cols();
  if (u_box.dim() != m) throw DimensionError("input", "dimension does not match m");
  E2SimulationResult out;
  out.bound = Vector::Zero(p);
  out.simulations = static_cast<std::size_t>(m);
  if (aug.B_bar.norm() == 0.0 || aug.C_bar.norm() == 0.0) return out;

  const double h = 0.1 / aug.norm_a;
  const Matrix phi = expm(aug.A_bar * h);
  CurvatureBound curvature(aug, h);
  Vector curv(p);

  // Tail: with alpha below -2 max Re lambda(A) and P_i solving
  // (A + alpha/2)^T P_i + P_i (A + alpha/2) = -c_i^T c_i,
  // int_T^inf |y_i| <= sqrt(x^T P_i x / alpha) by Cauchy-Schwarz.
  const double alpha = -LyapunovSolver(aug.A_bar).spectral_abscissa();
  if (!(alpha > 0.0)) throw NumericalError("tail certificate needs a stable A");
  const LyapunovSolver shifted(aug.A_bar + 0.5 * alpha * Matrix::Identity(dim, dim));
  std::vector<Matrix> tail_p;
  for (Index i = 0; i < p; ++i)
    tail_p.push_back(shifted.solve_transposed(aug.C_bar.row(i).transpose() * aug.C_bar.row(i)).P);
  auto tail = [&](Index i, const Vector& x) {
    return (1.0 + 1e-6) * std::sqrt(std::max(0.0, x.dot(tail_p[i] * x)) / alpha);
  };

  // The input is split as u = c + r v with |v_j| <= 1. The response to c is
  // the step response, bounded through sup_t |C A^{-1} (x_c(t) - x_c(0))|.
  const Vector c = u_box.center();
  const Vector r = u_box.halfwidth();
  const Vector umax = u_box.lb().cwiseAbs().cwiseMax(u_box.ub().cwiseAbs());
  const Matrix cainv =
      aug.A_bar.transpose().fullPivLu().solve(aug.C_bar.transpose()).transpose();

  Matrix x(dim, m + 1), next(dim, m + 1);
  x.leftCols(m) = aug.B_bar;
  x.col(m) = aug.B_bar * c;
  const Vector w0 = x.col(m);
  Vector init_norm(m + 1);
  for (Index j = 0; j <= m; ++j) init_norm[j] = x.col(j).norm();

  Matrix integral = Matrix::Zero(p, m + 1);  // int |y_i| per column
  Matrix y = aug.C_bar * x, y_next(p, m + 1);
  Vector sup_step = Vector::Zero(p);
  std::size_t s = 0;
  for (; s < max_steps; ++s) {
    bool decayed = true;
    for (Index j = 0; j <= m; ++j)
      if (x.col(j).norm() > decay_tol * init_norm[j]) decayed = false;
    if (decayed) break;
    next.noalias() = phi * x;
    y_next.noalias() = aug.C_bar * next;
    const Vector s_now = cainv * (x.col(m) - w0);
    for (Index j = 0; j <= m; ++j) {
      const double xn = x.col(j).norm();
      // int |y| <= trapezoid of |y| + h^3 / 12 sup |y''| on each step.
      curvature(x.col(j).data(), xn, curv.data());
      for (Index i = 0; i < p; ++i) {
        const double step_int = h * 0.5 * (std::abs(y(i, j)) + std::abs(y_next(i, j))) +
                                h * h * h / 12.0 * curv[i];
        integral(i, j) += step_int;
        if (j == m)
          sup_step[i] = std::max(sup_step[i], std::abs(s_now[i]) + step_int);
      }
    }
    x.swap(next);
    y.swap(y_next);
  }
  out.steps = s;
  out.truncated = s == max_steps;
  const Vector s_end = cainv * (x.col(m) - w0);
  for (Index j = 0; j <= m; ++j)
    for (Index i = 0; i < p; ++i) integral(i, j) += tail(i, x.col(j));
  for (Index i = 0; i < p; ++i) {
    const double sup_center =
        std::max(sup_step[i], std::abs(s_end[i]) + tail(i, x.col(m)));
    double split = sup_center, plain = 0.0;
    for (Index j = 0; j < m; ++j) {
      split += r[j] * integral(i, j);
      plain += umax[j] * integral(i, j);
    }
    out.bound[i] = std::min(split, plain);
  }
  return out;
}

ErrorBound combine(const Vector& e1, const Vector& e2, E1Method m1, E2Method m2,
                   double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
  if (e1.size() != e2.size())
    throw DimensionError("e2", "must have as many entries as e1");
  if (!e1.allFinite() || !e2.allFinite() || (e1.array() < 0).any() ||
      (e2.array() < 0).any())
    throw InvariantError("error bounds must be finite and non-negative");
  ErrorBound eb;
  const Index p = e1.size();
  const double g = is_simulation(m1) || is_simulation(m2) ? gamma : 0.0;
  eb.e1 = e1;
  eb.e2 = e2;
  eb.delta = (1.0 + g) * (e1 + e2);
  eb.rho = eb.delta.norm();
  eb.e1_method.assign(static_cast<std::size_t>(p), m1);
  eb.e2_method.assign(static_cast<std::size_t>(p), m2);
  eb.gamma_applied = Vector::Constant(p, g);
  eb.gamma = gamma;
  return eb;
}

ErrorBound compute_error_bound(const BalancedRealization& bal,
                               const Abstraction& abs, const HyperBox& x0,
                               const HyperBox& u_box, double t_f,
                               const BoundOptions& opts, MethodBounds* raw) {
  const AugmentedSystem aug = build_augmented(bal, abs);
  const Matrix map = augmented_initial_map(bal, abs.k);
  std::vector<std::string> warnings;
  std::vector<std::pair<E1Method, Vector>> e1s;
  std::vector<std::pair<E2Method, Vector>> e2s;

  for (E1Method m : opts.e1_methods) {
    try {
      switch (m) {
        case E1Method::kTheorem1:
          e1s.emplace_back(m, e1_theoretical(
                                  aug, sup_augmented_initial_norm(bal, abs.k, x0)));
          break;
        case E1Method::kTheorem2: {
          auto r = e1_optimization(aug, map, x0, opts.optimization);
          for (auto& w : r.warnings) warnings.push_back("theorem2: " + w);
          e1s.emplace_back(m, std::move(r.bound));
          break;
        }
        case E1Method::kSimulation:
          e1s.emplace_back(m, e1_simulation(aug, map, x0, t_f, opts.vertex_cap));
          break;
      }
    } catch (const Error& e) {
      warnings.push_back(std::string(method_name(m)) + " e1 skipped: " + e.what());
    }
  }
  for (E2Method m : opts.e2_methods) {
    if (m == E2Method::kTheorem3) {
      e2s.emplace_back(m, e2_theoretical(bal.sigma, abs.k, u_box, aug.p()));
    } else {
      auto r = e2_simulation(aug, u_box, opts.decay_tol, opts.max_steps);
      if (r.truncated)
        warnings.push_back(
            "simulation e2: impulse response did not decay within the step "
            "cap; the tail certificate covers the remainder");
      e2s.emplace_back(m, std::move(r.bound));
    }
  }
  if (e1s.empty() || e2s.empty())
    throw Error("no enabled bound method produced a result");
  if (raw) *raw = MethodBounds{e1s, e2s};

  const Index p = aug.p();
  ErrorBound best;
  best.e1.resize(p);
  best.e2.resize(p);
  best.delta.resize(p);
  best.gamma_applied.resize(p);
  best.e1_method.resize(static_cast<std::size_t>(p));
  best.e2_method.resize(static_cast<std::size_t>(p));
  best.gamma = opts.gamma;
  for (Index i = 0; i < p; ++i) {
    double d_best = std::numeric_limits<double>::infinity();
    for (const auto& [m1, v1] : e1s) {
      for (const auto& [m2, v2] : e2s) {
        const ErrorBound c = combine(v1.segment(i, 1), v2.segment(i, 1), m1, m2,
                                     opts.gamma);
        if (c.delta[0] < d_best) {
          d_best = c.delta[0];
          best.e1[i] = v1[i];
          best.e2[i] = v2[i];
          best.delta[i] = c.delta[0];
          best.gamma_applied[i] = c.gamma_applied[0];
          best.e1_method[static_cast<std::size_t>(i)] = m1;
          best.e2_method[static_cast<std::size_t>(i)] = m2;
        }
      }
    }
  }
  best.rho = best.delta.norm();
  best.warnings = std::move(warnings);
  return best;
}

}  // namespace btv
