#include "btv/balancing.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "btv/kernels.hpp"

namespace btv {
namespace {

struct SquareRoot {
  Matrix v;
  Vector d;  // ascending, clamped at 0
};

SquareRoot eig_sqrt(const Matrix& w) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(w);
  if (es.info() != Eigen::Success)
    throw NumericalError("gramian eigendecomposition failed");
  return {es.eigenvectors(), es.eigenvalues().cwiseMax(0.0)};
}

Matrix factor(const SquareRoot& s) {
  return s.v * s.d.cwiseSqrt().asDiagonal();
}

}  // namespace

BalancedRealization balance(const LtiSystem& sys, const BalanceOptions& opts) {
  require_hurwitz(sys, "A");
  BalancedRealization bal;
  bal.gramians = gramians(sys);
  const SquareRoot c = eig_sqrt(bal.gramians.Wc);
  const double cmax = c.d.maxCoeff();
  if (!(cmax > 0.0) || c.d.minCoeff() <= opts.rank_tol * cmax) {
    std::ostringstream msg;
    msg << "controllability gramian is numerically singular (eigenvalue ratio "
        << (cmax > 0.0 ? c.d.minCoeff() / cmax : 0.0)
        << "); reduce the model to a minimal realization first";
    throw RankDeficientError(msg.str());
  }
  const Matrix g = factor(c);
  const Matrix lo = factor(eig_sqrt(bal.gramians.Wo));

  Eigen::BDCSVD<Matrix> svd(lo.transpose() * g, Eigen::ComputeFullV);
  bal.sigma = svd.singularValues();
  const Matrix& k = svd.matrixV();
  const double smax = bal.sigma[0];
  if (!(smax > 0.0) || bal.sigma.tail(1)[0] <= opts.rank_tol * smax) {
    std::ostringstream msg;
    msg << "Hankel singular values span more than 1/rank_tol (ratio "
        << (smax > 0.0 ? bal.sigma.tail(1)[0] / smax : 0.0)
        << "); the system is not minimal (unobservable modes), reduce it first";
    throw RankDeficientError(msg.str());
  }

  const Vector s_half = bal.sigma.cwiseSqrt();
  const Vector d_half = c.d.cwiseSqrt();
  bal.H = s_half.asDiagonal() * k.transpose() *
          d_half.cwiseInverse().asDiagonal() * c.v.transpose();
  bal.H_inv = c.v * d_half.asDiagonal() * k * s_half.cwiseInverse().asDiagonal();

  for (Index i = 0; i < bal.H.rows(); ++i) {
    Index arg = 0;
    bal.H.row(i).cwiseAbs().maxCoeff(&arg);
    if (bal.H(i, arg) < 0.0) {
      bal.H.row(i) *= -1.0;
      bal.H_inv.col(i) *= -1.0;
    }
  }

  bal.A_t = bal.H * sys.A() * bal.H_inv;
  bal.B_t = bal.H * sys.B();
  bal.C_t = sys.C() * bal.H_inv;

  const Matrix wc_t = bal.H * bal.gramians.Wc * bal.H.transpose();
  const Matrix wo_t = bal.H_inv.transpose() * bal.gramians.Wo * bal.H_inv;
  const Matrix sig = bal.sigma.asDiagonal();
  bal.balance_error = std::max((wc_t - sig).norm(), (wo_t - sig).norm()) /
                      bal.sigma.norm();

  Eigen::BDCSVD<Matrix> hsvd(bal.H);
  const Vector& hs = hsvd.singularValues();
  bal.condition = hs[0] / hs.tail(1)[0];
  if (!(bal.condition <= opts.cond_max)) {
    std::ostringstream msg;
    msg << "balancing transformation is ill-conditioned (cond(H) = "
        << bal.condition << ")";
    bal.warnings.push_back(msg.str());
  }
  return bal;
}

Vector hankel_singular_values(const LtiSystem& sys) {
  require_hurwitz(sys, "A");
  const GramianPair gp = gramians(sys);
  const Matrix lc = factor(eig_sqrt(gp.Wc));
  const Matrix lo = factor(eig_sqrt(gp.Wo));
  Eigen::BDCSVD<Matrix> svd(lo.transpose() * lc);
  return svd.singularValues();
}

HyperBox linear_image_hull(const Matrix& m, const HyperBox& box) {
  if (m.cols() != box.dim())
    throw DimensionError("box", "dimension does not match the linear map");
  const Vector c = box.center();
  const Vector hw = box.halfwidth();
  Vector mid(m.rows()), rad(m.rows());
  kernels::gemv(m, c.data(), mid.data());
  kernels::abs_gemv(m, hw.data(), rad.data());
  return HyperBox(mid - rad, mid + rad);
}

Matrix augmented_initial_map(const BalancedRealization& bal, Index k) {
  if (k < 1 || k > bal.n())
    throw std::invalid_argument("k must satisfy 1 <= k <= n");
  Matrix m(bal.n() + k, bal.n());
  m.topRows(bal.n()) = bal.H;
  m.bottomRows(k) = bal.H.topRows(k);
  return m;
}

double sup_norm_over_box(const HyperBox& box) {
  return box.lb().cwiseAbs().cwiseMax(box.ub().cwiseAbs()).norm();
}

double sup_augmented_initial_norm(const BalancedRealization& bal, Index k,
                                  const HyperBox& x0) {
  const HyperBox hull = linear_image_hull(bal.H, x0);
  const Vector mag = hull.lb().cwiseAbs().cwiseMax(hull.ub().cwiseAbs());
  if (k < 1 || k > bal.n())
    throw std::invalid_argument("k must satisfy 1 <= k <= n");
  return std::sqrt(mag.squaredNorm() + mag.head(k).squaredNorm());
}

Abstraction truncate(std::shared_ptr<const BalancedRealization> bal, Index k,
                     const HyperBox& x0, const TruncateOptions& opts) {
  const Index n = bal->n();
  const Index p = bal->C_t.rows();
  if (k > n || k < 1)
    throw std::invalid_argument("truncation order k=" + std::to_string(k) +
                                " must satisfy k <= n=" + std::to_string(n));
  if (opts.require_output_abstraction && k <= p)
    throw std::invalid_argument("truncation order k=" + std::to_string(k) +
                                " must exceed the output dimension p=" +
                                std::to_string(p));
  if (x0.dim() != n) throw DimensionError("x0", "dimension does not match n");
  Matrix s = Matrix::Zero(k, n);
  s.leftCols(k).setIdentity();
  Matrix sh = bal->H.topRows(k);
  HyperBox reduced_box = linear_image_hull(sh, x0);
  LtiSystem reduced(bal->A_t.topLeftCorner(k, k), bal->B_t.topRows(k),
                    bal->C_t.leftCols(k));
  return Abstraction{std::move(reduced), k,     std::move(s),
                     std::move(sh),      std::move(reduced_box),
                     std::move(bal),     std::nullopt};
}

Abstraction truncate(const BalancedRealization& bal, Index k, const HyperBox& x0,
                     const TruncateOptions& opts) {
  return truncate(std::make_shared<const BalancedRealization>(bal), k, x0, opts);
}

}  // namespace btv
