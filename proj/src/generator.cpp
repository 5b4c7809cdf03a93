#include "btv/generator.hpp"

#include <cmath>
#include <string>

#include "btv/simulate.hpp"

namespace btv {

LtiSystem random_stable_system(Index n, Index m, Index p, std::mt19937_64& rng,
                               double skew_scale) {
  if (n < 1 || m < 1 || p < 1) throw std::invalid_argument("n, m, p must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> diag(0.5, 1.5);
  const double s = skew_scale / std::sqrt(static_cast<double>(n));
  Matrix a = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < j; ++i) {
      const double v = normal(rng) * s;
      a(i, j) = v;
      a(j, i) = -v;
    }
  for (Index i = 0; i < n; ++i) a(i, i) = -diag(rng);
  Matrix b(n, m), c(p, n);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i) b(i, j) = normal(rng);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < p; ++i) c(i, j) = normal(rng);
  return LtiSystem(std::move(a), std::move(b), std::move(c));
}

VerificationProblem random_problem(const GeneratorOptions& opts, double t_f) {
  if (opts.p >= opts.n)
    throw std::invalid_argument("p must be smaller than n (no abstraction with p < k <= n)");
  std::mt19937_64 rng(opts.seed);
  LtiSystem sys = random_stable_system(opts.n, opts.m, opts.p, rng, opts.skew_scale);
  std::uniform_real_distribution<double> width(0.1, 1.0);
  Vector xw(opts.n), ul(opts.m), uu(opts.m);
  for (Index i = 0; i < opts.n; ++i) xw[i] = width(rng);
  for (Index i = 0; i < opts.m; ++i) {
    ul[i] = -width(rng);
    uu[i] = width(rng);
  }
  HyperBox x0(-xw, xw);
  HyperBox u(ul, uu);
  // A + A^T <= -I gives ||x(t)|| <= ||x0|| + 2 ||B|| sup ||u||.
  const double state = xw.norm() + 2.0 * spectral_norm(sys.B()) *
                                        ul.cwiseAbs().cwiseMax(uu.cwiseAbs()).norm();
  const Vector limit = 1.2 * sys.C().rowwise().norm() * state;
  Matrix gamma(2 * opts.p, opts.p);
  gamma << Matrix::Identity(opts.p, opts.p), -Matrix::Identity(opts.p, opts.p);
  Vector psi(2 * opts.p);
  psi << -limit, -limit;
  std::vector<Spec> specs{PolytopeSpec(gamma, psi, Polarity::kSafeRegion)};
  return VerificationProblem("random-n" + std::to_string(opts.n) + "-seed" +
                                 std::to_string(opts.seed),
                             std::move(sys), std::move(x0), std::move(u),
                             std::move(specs), t_f);
}

}  // namespace btv
