#pragma once

#include <string>
#include <vector>

#include "btv/balancing.hpp"

namespace btv {

/// Block-diagonal composition of the balanced full-order system and the
/// reduced system. Its output is y - y_r.
struct AugmentedSystem {
  Matrix A_bar;  // diag(A_t, A_r)
  Matrix B_bar;  // [B_t; B_r]
  Matrix C_bar;  // [C_t, -C_r]
  Index n = 0;
  Index k = 0;
  /// max(0, lambda_max(A_bar + A_bar^T)) / 2; zero for an exactly balanced
  /// realization.
  double growth_rate = 0.0;
  double norm_a = 0.0;  // ||A_bar||_2
  Index p() const { return C_bar.rows(); }
  Index dim() const { return A_bar.rows(); }
};

AugmentedSystem build_augmented(const BalancedRealization& bal,
                                const Abstraction& abs);

enum class E1Method { kTheorem1, kTheorem2, kSimulation };
enum class E2Method { kTheorem3, kSimulation };

const char* method_name(E1Method m);
const char* method_name(E2Method m);

/// Relative tolerance on lambda_max(A_bar + A_bar^T) / ||A_bar||_2 above which
/// the zero-input bounds refuse to run.
inline constexpr double kMonotoneTol = 1e-6;

/// Throws InvariantError when A_bar + A_bar^T is not negative semidefinite
/// within kMonotoneTol.
void require_monotone(const AugmentedSystem& aug);

/// ||C_bar_i||_2 * sup_norm_x0_bar
Vector e1_theoretical(const AugmentedSystem& aug, double sup_norm_x0_bar);

struct E1OptimizationOptions {
  std::vector<double> eps_factors = {1e-8, 1e-4, 1e-2, 1.0};
  int theta_steps = 10;
};

struct E1OptimizationResult {
  Vector bound;
  std::vector<std::string> warnings;
};

/// Per output, a P with P > 0, A^T P + P A < 0 and C_i^T C_i <= P; the bound is
/// a sound upper bound on sup sqrt(xb0^T P xb0) where xb0 = M x0, x0 in box.
E1OptimizationResult e1_optimization(const AugmentedSystem& aug,
                                     const Matrix& initial_map,
                                     const HyperBox& x0,
                                     const E1OptimizationOptions& opts = {});
/// Same, with the initial augmented state known only through a box.
E1OptimizationResult e1_optimization(const AugmentedSystem& aug,
                                     const HyperBox& x0_bar_box,
                                     const E1OptimizationOptions& opts = {});

inline constexpr std::size_t kDefaultVertexCap = 4096;

/// Exhaustive zero-input simulation from every vertex of the box (only the
/// non-degenerate coordinates multiply the count). Throws CapacityError when
/// the vertex count exceeds `vertex_cap`.
Vector e1_simulation(const AugmentedSystem& aug, const Matrix& initial_map,
                     const HyperBox& x0, double t_f,
                     std::size_t vertex_cap = kDefaultVertexCap);

/// max_j max(|lb_j|, |ub_j|)
double input_sup_norm(const HyperBox& u_box);

/// 2 * sum_{j>k} (2j - 1) sigma_j * ||u||_inf, repeated for each of p outputs.
Vector e2_theoretical(const Vector& sigma, Index k, const HyperBox& u_box,
                      Index p);

struct E2SimulationResult {
  Vector bound;
  bool truncated = false;  // step cap hit before decay; bound is still sound
  std::size_t steps = 0;
  std::size_t simulations = 0;
};

inline constexpr double kDefaultDecayTol = 1e-9;
inline constexpr std::size_t kDefaultMaxSteps = 4'000'000;

/// Impulse responses of the augmented system, one per input channel.
E2SimulationResult e2_simulation(const AugmentedSystem& aug,
                                 const HyperBox& u_box,
                                 double decay_tol = kDefaultDecayTol,
                                 std::size_t max_steps = kDefaultMaxSteps);

inline constexpr double kDefaultGamma = 0.01;

struct ErrorBound {
  Vector e1;
  Vector e2;
  Vector delta;
  double rho = 0.0;
  std::vector<E1Method> e1_method;  // per output
  std::vector<E2Method> e2_method;  // per output
  Vector gamma_applied;             // per output
  double gamma = kDefaultGamma;
  std::vector<std::string> warnings;
};

bool is_simulation(E1Method m);
bool is_simulation(E2Method m);

/// delta_i = (1 + g)(e1_i + e2_i), g = gamma when either method is
/// simulation-based and 0 otherwise. rho = ||delta||_2.
ErrorBound combine(const Vector& e1, const Vector& e2, E1Method m1, E2Method m2,
                   double gamma = kDefaultGamma);

struct BoundOptions {
  std::vector<E1Method> e1_methods = {E1Method::kTheorem1, E1Method::kTheorem2};
  std::vector<E2Method> e2_methods = {E2Method::kTheorem3};
  double gamma = kDefaultGamma;
  std::size_t vertex_cap = kDefaultVertexCap;
  double decay_tol = kDefaultDecayTol;
  std::size_t max_steps = kDefaultMaxSteps;
  E1OptimizationOptions optimization;
};

/// Raw per-method vectors, kept for reporting.
struct MethodBounds {
  std::vector<std::pair<E1Method, Vector>> e1;
  std::vector<std::pair<E2Method, Vector>> e2;
};

/// Runs every enabled method and takes, per output, the smallest delta over
/// all (e1, e2) method pairs. Methods that cannot run (vertex cap, truncated
/// impulse response) are skipped with a warning.
ErrorBound compute_error_bound(const BalancedRealization& bal,
                               const Abstraction& abs, const HyperBox& x0,
                               const HyperBox& u_box, double t_f,
                               const BoundOptions& opts = {},
                               MethodBounds* raw = nullptr);

}  // namespace btv
