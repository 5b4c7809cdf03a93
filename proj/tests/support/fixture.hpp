#pragma once
// Shared fixtures for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "btv/balancing.hpp"
#include "btv/bounds.hpp"
#include "btv/generator.hpp"
#include "btv/simulate.hpp"

namespace btv::fixture {

/// Random stable system that passes the balancing rank checks; redraws
/// near non-minimal samples.
inline LtiSystem minimal_system(std::mt19937_64& rng, Index n, Index m, Index p,
                                double skew_scale = 2.0) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    LtiSystem sys = random_stable_system(n, m, p, rng, skew_scale);
    try {
      balance(sys);
      return sys;
    } catch (const RankDeficientError&) {
    }
  }
  throw Error("no minimal random system found");
}

inline HyperBox random_box(std::mt19937_64& rng, Index dim, double lo = 0.05,
                           double hi = 1.0) {
  std::uniform_real_distribution<double> w(lo, hi), off(-0.5, 0.5);
  Vector lb(dim), ub(dim);
  for (Index i = 0; i < dim; ++i) {
    const double c = off(rng), r = w(rng);
    lb[i] = c - r;
    ub[i] = c + r;
  }
  return HyperBox(lb, ub);
}

inline Vector random_vertex(std::mt19937_64& rng, const HyperBox& box) {
  std::bernoulli_distribution coin(0.5);
  Vector v(box.dim());
  for (Index i = 0; i < box.dim(); ++i) v[i] = coin(rng) ? box.ub()[i] : box.lb()[i];
  return v;
}

inline Vector random_point(std::mt19937_64& rng, const HyperBox& box) {
  std::uniform_real_distribution<double> t(0.0, 1.0);
  Vector v(box.dim());
  for (Index i = 0; i < box.dim(); ++i)
    v[i] = box.lb()[i] + t(rng) * (box.ub()[i] - box.lb()[i]);
  return v;
}

/// Random piecewise-constant signal in the box; bang-bang when `vertices`.
inline PiecewiseConstantSignal random_signal(std::mt19937_64& rng, const HyperBox& box,
                                             double t_f, int pieces, bool vertices) {
  std::vector<double> times{0.0};
  std::vector<Vector> values;
  std::uniform_real_distribution<double> t(0.0, t_f);
  for (int i = 1; i < pieces; ++i) times.push_back(t(rng));
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (std::size_t i = 0; i < times.size(); ++i)
    values.push_back(vertices ? random_vertex(rng, box) : random_point(rng, box));
  return PiecewiseConstantSignal(times, values);
}

/// Random matrix with singular values in [1, cond].
inline Matrix random_conditioned(std::mt19937_64& rng, Index n, double cond) {
  std::normal_distribution<double> g;
  auto orth = [&] {
    Matrix m(n, n);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    return Matrix(Eigen::HouseholderQR<Matrix>(m).householderQ());
  };
  std::uniform_real_distribution<double> lg(0.0, std::log(cond));
  Vector s(n);
  for (Index i = 0; i < n; ++i) s[i] = std::exp(lg(rng));
  s[0] = 1.0;
  if (n > 1) s[n - 1] = cond;
  return orth() * s.asDiagonal() * orth();
}

/// max_t |y_i(t) - y_r,i(t)| on a shared grid, per output.
inline Vector max_output_error(const LtiSystem& full, const Abstraction& abs,
                               const Vector& x0, const PiecewiseConstantSignal& u,
                               double t_f, double h) {
  const Trajectory a = simulate(full, x0, u, t_f, h);
  const Trajectory b = simulate(abs.reduced, abs.initial_map * x0, u, t_f, h);
  Vector err = Vector::Zero(full.p());
  const std::size_t count = std::min(a.y.size(), b.y.size());
  for (std::size_t s = 0; s < count; ++s)
    err = err.cwiseMax((a.y[s] - b.y[s]).cwiseAbs());
  return err;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("btv-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace btv::fixture
