#include "btv/lyapunov.hpp"

#include <cmath>
#include <vector>

#include <Eigen/LU>

#include "btv/kernels.hpp"

namespace btv {
namespace {

struct Block {
  Index start;
  Index size;
};

std::vector<Block> diagonal_blocks(const Matrix& t) {
  std::vector<Block> blocks;
  const Index n = t.rows();
  Index i = 0;
  while (i < n) {
    if (i + 1 < n && t(i + 1, i) != 0.0) {
      blocks.push_back({i, 2});
      i += 2;
    } else {
      blocks.push_back({i, 1});
      i += 1;
    }
  }
  return blocks;
}

// Solves T_ii X + X T_jj^T = R for a block of at most 2x2.
void small_sylvester(const Matrix& t, const Block& bi, const Block& bj,
                     const double* rhs, Index ld, double* x, Index ldx) {
  const Index ri = bi.size, rj = bj.size, dim = ri * rj;
  Eigen::Matrix4d k = Eigen::Matrix4d::Zero();
  Eigen::Vector4d r = Eigen::Vector4d::Zero();
  // vec(X) column-major: index a + ri*b  (a row, b column)
  for (Index b = 0; b < rj; ++b) {
    for (Index a = 0; a < ri; ++a) {
      const Index row = a + ri * b;
      r[row] = rhs[a + ld * b];
      for (Index c = 0; c < ri; ++c)
        k(row, c + ri * b) += t(bi.start + a, bi.start + c);
      for (Index d = 0; d < rj; ++d)
        k(row, a + ri * d) += t(bj.start + b, bj.start + d);
    }
  }
  if (dim == 1) {
    if (k(0, 0) == 0.0) throw NumericalError("singular Lyapunov block");
    x[0] = r[0] / k(0, 0);
    return;
  }
  Eigen::FullPivLU<Matrix> lu(k.topLeftCorner(dim, dim));
  if (!lu.isInvertible()) throw NumericalError("singular Lyapunov block");
  Vector sol = lu.solve(r.head(dim));
  for (Index b = 0; b < rj; ++b)
    for (Index a = 0; a < ri; ++a) x[a + ldx * b] = sol[a + ri * b];
}

// Solves T X + X T^T = R for symmetric R with T upper quasi-triangular.
Matrix solve_quasi_triangular(const Matrix& t, Matrix r) {
  const Index n = t.rows();
  const auto blocks = diagonal_blocks(t);
  Matrix x = Matrix::Zero(n, n);
  const auto& kt = kernels::active();
  for (auto jb = blocks.rbegin(); jb != blocks.rend(); ++jb) {
    const Index j0 = jb->start, j1 = jb->start + jb->size;
    // Only rows 0..j1-1 are solved; rows below come from symmetry.
    for (Index j = j0; j < j1; ++j) {
      double* rj = r.col(j).data();
      for (Index l = j1; l < n; ++l) {
        const double tjl = t(j, l);
        if (tjl != 0.0) kt.axpy(-tjl, x.col(l).data(), rj, j1);
      }
      for (Index kk = j1; kk < n; ++kk) {
        const double xkj = x(j, kk);
        x(kk, j) = xkj;
        if (xkj != 0.0) kt.axpy(-xkj, t.col(kk).data(), rj, j1);
      }
    }
    for (Index ib = static_cast<Index>(&*jb - blocks.data()); ib >= 0; --ib) {
      const Block& bi = blocks[ib];
      small_sylvester(t, bi, *jb, r.data() + bi.start + n * j0, n,
                      x.data() + bi.start + n * j0, n);
      for (Index j = j0; j < j1; ++j) {
        double* rj = r.col(j).data();
        for (Index a = bi.start; a < bi.start + bi.size; ++a) {
          const double xa = x(a, j);
          if (xa != 0.0) kt.axpy(-xa, t.col(a).data(), rj, bi.start);
        }
      }
    }
  }
  return x;
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

LyapunovSolver::LyapunovSolver(const Matrix& a, double margin) : a_(a) {
  if (a.rows() == 0 || a.rows() != a.cols())
    throw DimensionError("A", "Lyapunov solver needs a square matrix");
  if (!a.allFinite()) throw NumericalError("A contains non-finite entries");
  Eigen::RealSchur<Matrix> schur(a);
  if (schur.info() != Eigen::Success)
    throw NumericalError("real Schur decomposition failed");
  u_ = schur.matrixU();
  t_ = schur.matrixT();
  const Index n = a.rows();
  // Zero the strictly-lower entries outside 2x2 bumps so block detection is
  // exact.
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 2; i < n; ++i) t_(i, j) = 0.0;

  abscissa_ = -std::numeric_limits<double>::infinity();
  for (const Block& b : diagonal_blocks(t_)) {
    const double re = b.size == 1
                          ? t_(b.start, b.start)
                          : 0.5 * (t_(b.start, b.start) +
                                   t_(b.start + 1, b.start + 1));
    abscissa_ = std::max(abscissa_, re);
  }
  const double threshold = -margin * a.norm();
  if (!(abscissa_ < threshold))
    throw NotHurwitzError("A is not Hurwitz: spectral abscissa " +
                          std::to_string(abscissa_));

  const auto rev = Eigen::PermutationMatrix<Eigen::Dynamic>(
      Eigen::VectorXi::LinSpaced(static_cast<int>(n), static_cast<int>(n) - 1, 0));
  ur_ = u_ * rev;
  tr_ = rev.transpose() * t_.transpose() * rev;
}

LyapunovResult LyapunovSolver::solve(const Matrix& q) const {
  return solve_impl(q, false);
}

LyapunovResult LyapunovSolver::solve_transposed(const Matrix& q) const {
  return solve_impl(q, true);
}

LyapunovResult LyapunovSolver::solve_impl(const Matrix& q, bool transposed) const {
  const Index n = a_.rows();
  if (q.rows() != n || q.cols() != n)
    throw DimensionError("Q", "expected " + std::to_string(n) + "x" +
                                  std::to_string(n));
  const double qn = q.norm();
  if ((q - q.transpose()).norm() > 1e-8 * qn)
    throw InvariantError("Q is not symmetric");
  const Matrix& u = transposed ? ur_ : u_;
  const Matrix& t = transposed ? tr_ : t_;
  const Matrix op = transposed ? Matrix(a_.transpose()) : a_;

  auto raw = [&](const Matrix& rhs) {
    Matrix r = -(u.transpose() * symmetrized(rhs) * u);
    Matrix x = solve_quasi_triangular(t, symmetrized(r));
    return symmetrized(u * x * u.transpose());
  };

  LyapunovResult out;
  out.P = raw(q);
  out.relative_residual = lyapunov_residual(op, out.P, q);
  for (int iter = 0; iter < 2 && out.relative_residual > 0.1 * kLyapTol; ++iter) {
    const Matrix res = op * out.P + out.P * op.transpose() + q;
    Matrix refined = out.P + raw(symmetrized(res));
    const double rr = lyapunov_residual(op, refined, q);
    if (!(rr < out.relative_residual)) break;
    out.P = std::move(refined);
    out.relative_residual = rr;
  }
  if (!out.P.allFinite()) throw NumericalError("Lyapunov solution is not finite");
  if (out.relative_residual > kLyapTol)
    throw NumericalError("Lyapunov residual " +
                         std::to_string(out.relative_residual) +
                         " exceeds tolerance");
  return out;
}

LyapunovResult solve_lyapunov(const Matrix& a, const Matrix& q) {
  return LyapunovSolver(a).solve(q);
}

double lyapunov_residual(const Matrix& a, const Matrix& p, const Matrix& q) {
  const double num = (a * p + p * a.transpose() + q).norm();
  const double den = 2.0 * a.norm() * p.norm() + q.norm();
  return den == 0.0 ? 0.0 : num / den;
}

GramianPair gramians(const LtiSystem& sys) {
  LyapunovSolver solver(sys.A());
  auto c = solver.solve(sys.B() * sys.B().transpose());
  auto o = solver.solve_transposed(sys.C().transpose() * sys.C());
  return {std::move(c.P), std::move(o.P), c.relative_residual,
          o.relative_residual};
}

}  // namespace btv
