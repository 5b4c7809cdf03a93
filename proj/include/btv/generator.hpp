#pragma once

#include <cstdint>
#include <random>

#include "btv/model.hpp"

namespace btv {

struct GeneratorOptions {
  Index n = 4;
  Index m = 1;
  Index p = 1;
  /// Entries of the skew part are N(0, 1) * skew_scale / sqrt(n).
  double skew_scale = 1.0;
  std::uint64_t seed = 0;
};

/// A = S - D with S skew-symmetric and D = diag(U(0.5, 1.5)), so A + A^T < 0
/// and A is Hurwitz by construction. B and C have N(0, 1) entries.
LtiSystem random_stable_system(Index n, Index m, Index p, std::mt19937_64& rng,
                               double skew_scale = 1.0);

/// Random system plus boxes and a safe-region output box that provably holds:
/// |y_i| <= 1.2 ||C_i|| (sup ||x0|| + 2 ||B|| sup ||u||).
VerificationProblem random_problem(const GeneratorOptions& opts, double t_f = 5.0);

}  // namespace btv
