#include "btv/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "btv/kernels.hpp"

namespace btv {

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() <= 64 && m.cols() <= 64) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()[0];
  }
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()[0];
}

Matrix expm(const Matrix& m) {
  Matrix e = m.exp();
  if (!e.allFinite()) throw NumericalError("matrix exponential is not finite");
  return e;
}

Discretization discretize(const Matrix& a, const Matrix& b, double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("step h must be positive and finite");
  const Index n = a.rows(), m = b.cols();
  Matrix aug = Matrix::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = a * h;
  aug.topRightCorner(n, m) = b * h;
  const Matrix e = aug.exp();
  if (!e.allFinite()) throw NumericalError("matrix exponential is not finite");
  return {h, e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

double default_sim_step(const Matrix& a, double t_f) {
  const double na = spectral_norm(a);
  double h = t_f > 0.0 ? t_f : 1.0;
  if (na > 0.0) h = std::min(h, 0.1 / na);
  return h;
}

PiecewiseConstantSignal::PiecewiseConstantSignal(std::vector<double> times,
                                                 std::vector<Vector> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.empty() || times_.size() != values_.size())
    throw DimensionError("input signal", "times and values must match and be non-empty");
  if (times_.front() != 0.0)
    throw InvariantError("input signal must start at t = 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1]))
      throw InvariantError("input switch times must be increasing");
    if (values_[i].size() != values_[0].size())
      throw DimensionError("input signal", "values have inconsistent sizes");
  }
}

PiecewiseConstantSignal PiecewiseConstantSignal::constant(const Vector& u) {
  return PiecewiseConstantSignal({0.0}, {u});
}

const Vector& PiecewiseConstantSignal::value(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto idx = it == times_.begin() ? 0 : (it - times_.begin()) - 1;
  return values_[static_cast<std::size_t>(idx)];
}

double PiecewiseConstantSignal::next_switch(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return it == times_.end() ? std::numeric_limits<double>::infinity() : *it;
}

Trajectory simulate(const LtiSystem& sys, const Vector& x0,
                    const PiecewiseConstantSignal& u, double t_f, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("step h must be positive");
  if (!(t_f >= 0.0)) throw std::invalid_argument("t_f must be non-negative");
  if (x0.size() != sys.n()) throw DimensionError("x0", "dimension does not match n");
  if (u.dim() != sys.m()) throw DimensionError("input", "dimension does not match m");

  const Discretization full = discretize(sys.A(), sys.B(), h);
  std::map<double, Discretization> partial;
  auto step_for = [&](double len) -> const Discretization& {
    if (std::abs(len - h) <= 1e-12 * h) return full;
    auto it = partial.find(len);
    if (it == partial.end())
      it = partial.emplace(len, discretize(sys.A(), sys.B(), len)).first;
    return it->second;
  };

  Trajectory tr;
  Vector x = x0, next(sys.n()), y(sys.p());
  auto record = [&](double t) {
    kernels::gemv(sys.C(), x.data(), y.data());
    tr.t.push_back(t);
    tr.x.push_back(x);
    tr.y.push_back(y);
  };
  double t = 0.0;
  record(t);
  const double snap = 1e-12 * h;
  while (t < t_f) {
    double target = std::min({t + h, u.next_switch(t), t_f});
    if (t_f - target < snap) target = t_f;
    const double len = target - t;
    const Discretization& d = step_for(len);
    kernels::gemv2(d.Phi, x.data(), d.Gamma, u.value(t).data(), next.data());
    x.swap(next);
    if (!x.allFinite()) throw NumericalError("simulation produced a non-finite state");
    t = target;
    record(t);
  }
  return tr;
}

}  // namespace btv
