#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "btv/simulate.hpp"
#include "btv/spectransform.hpp"

namespace btv {

/// A concrete run of the reduced system whose output lies strictly inside a
/// transformed witness region, which proves the full-order run from the same
/// x0 and input violates the original spec.
struct Witness {
  Vector x0;          // full-order initial state
  Vector x0_reduced;  // initial_map * x0
  PiecewiseConstantSignal input;
  double time = 0.0;
  Vector y_reduced;
  std::optional<Vector> y_full;  // set when confirmed on the full model
  std::size_t spec_index = 0;
  double margin = 0.0;
  std::size_t candidate = 0;
};

struct WitnessOptions {
  std::size_t budget = 256;
  std::uint64_t seed = 0;
  /// Simulation step; 0 picks ||A||_2 h <= 0.1 on the reduced system.
  double step_h = 0.0;
  /// Also simulate this system (full order) from x0 and require the original
  /// spec to be violated at the witness time.
  const LtiSystem* confirm_with = nullptr;
};

/// Relative guard band applied to witness predicates.
inline constexpr double kWitnessGuard = 1e-9;

/// > 0 iff y violates the region, measured in the region's own units.
double violation_margin(const Spec& region, const Vector& y);
/// eta = kWitnessGuard * scale of the spec.
double witness_guard(const Spec& region);

/// Randomized search over vertex and random initial states, constant,
/// bang-bang and random piecewise-constant inputs. Deterministic in the seed.
/// Throws std::invalid_argument when budget == 0.
std::optional<Witness> find_unsafe_witness(
    const LtiSystem& sys, const Matrix& initial_map, const HyperBox& x0,
    const HyperBox& u_box, const std::vector<TransformedSpec>& specs, double t_f,
    const WitnessOptions& opts = {});

/// initial_map = I
std::optional<Witness> find_unsafe_witness(
    const LtiSystem& sys, const HyperBox& x0, const HyperBox& u_box,
    const std::vector<TransformedSpec>& specs, double t_f,
    const WitnessOptions& opts = {});

}  // namespace btv
