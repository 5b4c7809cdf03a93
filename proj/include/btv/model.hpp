#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "btv/types.hpp"

namespace btv {

/// Continuous-time LTI model  x' = A x + B u,  y = C x.
class LtiSystem {
 public:
  LtiSystem(Matrix a, Matrix b, Matrix c);

  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  const Matrix& C() const { return c_; }
  Index n() const { return a_.rows(); }
  Index m() const { return b_.cols(); }
  Index p() const { return c_.rows(); }

  friend bool operator==(const LtiSystem&, const LtiSystem&);

 private:
  Matrix a_, b_, c_;
};

/// Axis-aligned box {x : lb <= x <= ub}.
class HyperBox {
 public:
  HyperBox(Vector lb, Vector ub);
  static HyperBox point(const Vector& x) { return HyperBox(x, x); }

  const Vector& lb() const { return lb_; }
  const Vector& ub() const { return ub_; }
  Index dim() const { return lb_.size(); }
  Vector center() const { return 0.5 * (lb_ + ub_); }
  Vector halfwidth() const { return 0.5 * (ub_ - lb_); }
  bool contains(const Vector& x, double tol = 0.0) const;
  /// Coordinates with lb < ub.
  std::vector<Index> free_coordinates() const;
  /// max_i max(|lb_i|, |ub_i|)
  double sup_norm() const;

  friend bool operator==(const HyperBox&, const HyperBox&);

 private:
  Vector lb_, ub_;
};

enum class Polarity { kSafeRegion, kUnsafeRegion };

/// Output predicate  Gamma y + Psi <= 0.
struct PolytopeSpec {
  PolytopeSpec(Matrix gamma, Vector psi, Polarity polarity);
  Matrix gamma;
  Vector psi;
  Polarity polarity;
  Index q() const { return gamma.rows(); }
  Index p() const { return gamma.cols(); }
  friend bool operator==(const PolytopeSpec&, const PolytopeSpec&);
};

/// Output predicate  (y - a)^T Q (y - a) <= R^2.
struct EllipsoidSpec {
  EllipsoidSpec(Matrix q, Vector a, double radius, Polarity polarity);
  Matrix q;
  Vector a;
  double radius;
  Polarity polarity;
  Index p() const { return q.rows(); }
  friend bool operator==(const EllipsoidSpec&, const EllipsoidSpec&);
};

using Spec = std::variant<PolytopeSpec, EllipsoidSpec>;

Index spec_output_dim(const Spec& spec);
Polarity spec_polarity(const Spec& spec);
/// True when y satisfies the spec: inside a safe region, or outside an
/// unsafe one.
bool spec_satisfied(const Spec& spec, const Vector& y);

/// Periodically switched system. Mode i runs for durations[i] seconds and
/// is entered with its state reset into mode_initial_sets[i].
class PssSystem {
 public:
  PssSystem(std::vector<LtiSystem> modes, std::vector<double> durations,
            std::vector<HyperBox> mode_initial_sets);

  const std::vector<LtiSystem>& modes() const { return modes_; }
  const std::vector<double>& durations() const { return durations_; }
  const std::vector<HyperBox>& mode_initial_sets() const { return initial_; }
  std::size_t size() const { return modes_.size(); }
  double period() const;

  friend bool operator==(const PssSystem&, const PssSystem&);

 private:
  std::vector<LtiSystem> modes_;
  std::vector<double> durations_;
  std::vector<HyperBox> initial_;
};

using SystemModel = std::variant<LtiSystem, PssSystem>;

/// Everything needed to pose a time-bounded safety question. All specs must
/// hold simultaneously.
struct VerificationProblem {
  VerificationProblem(std::string name, SystemModel system, HyperBox x0,
                      HyperBox inputs, std::vector<Spec> specs, double t_f);

  std::string name;
  SystemModel system;
  HyperBox x0;
  HyperBox inputs;
  std::vector<Spec> specs;
  double t_f;

  bool is_pss() const { return std::holds_alternative<PssSystem>(system); }
  const LtiSystem& lti() const;
  const PssSystem& pss() const;
  Index n() const;
  Index m() const;
  Index p() const;

  friend bool operator==(const VerificationProblem&,
                         const VerificationProblem&);
};

struct StabilityReport {
  bool stable;
  double spectral_abscissa;
  double threshold;
};

inline constexpr double kDefaultStabilityMargin = 1e-9;

/// Stable iff max Re(lambda(A)) < -margin * ||A||_F.
StabilityReport check_stability(const LtiSystem& sys,
                                double margin = kDefaultStabilityMargin);
double spectral_abscissa(const Matrix& a);

/// Throws NotHurwitzError naming `what` when the check fails.
void require_hurwitz(const LtiSystem& sys, const std::string& what,
                     double margin = kDefaultStabilityMargin);

}  // namespace btv
