#pragma once

#include <optional>
#include <string>
#include <vector>

#include "btv/spectransform.hpp"
#include "btv/zonotope.hpp"

namespace btv {

inline constexpr double kDefaultOrderCap = 20.0;

struct ReachOptions {
  /// Default: min(t_f / 200, 0.1 / ||A||_2).
  std::optional<double> step_h;
  double order_cap = kDefaultOrderCap;
};

struct ReachStep {
  double t0;
  double t1;
  Zonotope y;  // output set over [t0, t1]
};

struct ReachResult {
  std::vector<ReachStep> steps;
  double h = 0.0;
  double t_f = 0.0;
};

double default_reach_step(const Matrix& a, double t_f);

/// e^{xh} - 1 - xh for x >= 0, rounded upward.
double remainder_factor(double x_h);

/// Zonotope propagation with first-order bloating. Input signals may be any
/// bounded measurable functions with values in u_box.
ReachResult reach_lti(const LtiSystem& sys, const Zonotope& x0,
                      const HyperBox& u_box, double t_f,
                      const ReachOptions& opts = {});
ReachResult reach_lti(const LtiSystem& sys, const HyperBox& x0,
                      const HyperBox& u_box, double t_f,
                      const ReachOptions& opts = {});

enum class CheckOutcome { kSafe, kMaybeUnsafe, kIndeterminate };
const char* outcome_name(CheckOutcome o);

struct CheckResult {
  CheckOutcome outcome = CheckOutcome::kIndeterminate;
  /// For kMaybeUnsafe: the step, spec and a point of the step set inside the
  /// transformed unsafe region.
  std::optional<std::size_t> step;
  std::optional<std::size_t> spec_index;
  std::optional<Vector> point;
  std::string note;
};

/// Proves every point of z satisfies `region` (sound, may fail to prove).
bool proves_satisfied(const Zonotope& z, const Spec& region);
/// A point of z that violates `region`, if one is found.
std::optional<Vector> find_violation(const Zonotope& z, const Spec& region);

CheckResult check_spec(const ReachResult& reach, const TransformedSpec& spec);
/// All specs must hold. Safe iff every spec is Safe; MaybeUnsafe if any is.
CheckResult check_specs(const ReachResult& reach,
                        const std::vector<TransformedSpec>& specs);

}  // namespace btv
