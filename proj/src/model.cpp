#include "btv/model.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace btv {
namespace {

bool same(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same(const Vector& a, const Vector& b) {
  return a.size() == b.size() && a == b;
}

void require_finite(const Matrix& m, const std::string& name) {
  if (!m.allFinite()) throw InvariantError(name + " contains non-finite entries");
}

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

LtiSystem::LtiSystem(Matrix a, Matrix b, Matrix c)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
  if (a_.rows() == 0 || a_.rows() != a_.cols())
    throw DimensionError("A", "must be square and non-empty, got " + shape(a_));
  if (b_.rows() != a_.rows() || b_.cols() == 0)
    throw DimensionError("B", "expected " + std::to_string(a_.rows()) +
                                  " rows and at least one column, got " +
                                  shape(b_));
  if (c_.cols() != a_.rows() || c_.rows() == 0)
    throw DimensionError("C", "expected " + std::to_string(a_.rows()) +
                                  " columns and at least one row, got " +
                                  shape(c_));
  require_finite(a_, "A");
  require_finite(b_, "B");
  require_finite(c_, "C");
}

bool operator==(const LtiSystem& x, const LtiSystem& y) {
  return same(x.a_, y.a_) && same(x.b_, y.b_) && same(x.c_, y.c_);
}

HyperBox::HyperBox(Vector lb, Vector ub) : lb_(std::move(lb)), ub_(std::move(ub)) {
  if (lb_.size() != ub_.size())
    throw DimensionError("box", "lb has " + std::to_string(lb_.size()) +
                                    " entries but ub has " +
                                    std::to_string(ub_.size()));
  for (Index i = 0; i < lb_.size(); ++i) {
    if (!std::isfinite(lb_[i]) || !std::isfinite(ub_[i]))
      throw InvariantError("box bound " + std::to_string(i) + " is not finite");
    if (lb_[i] > ub_[i])
      throw InvariantError("box coordinate " + std::to_string(i) +
                           " has lb > ub");
  }
}

bool HyperBox::contains(const Vector& x, double tol) const {
  if (x.size() != dim()) return false;
  for (Index i = 0; i < dim(); ++i)
    if (x[i] < lb_[i] - tol || x[i] > ub_[i] + tol) return false;
  return true;
}

std::vector<Index> HyperBox::free_coordinates() const {
  std::vector<Index> out;
  for (Index i = 0; i < dim(); ++i)
    if (lb_[i] < ub_[i]) out.push_back(i);
  return out;
}

double HyperBox::sup_norm() const {
  if (dim() == 0) return 0.0;
  return std::max(lb_.cwiseAbs().maxCoeff(), ub_.cwiseAbs().maxCoeff());
}

bool operator==(const HyperBox& x, const HyperBox& y) {
  return same(x.lb_, y.lb_) && same(x.ub_, y.ub_);
}

PolytopeSpec::PolytopeSpec(Matrix g, Vector s, Polarity pol)
    : gamma(std::move(g)), psi(std::move(s)), polarity(pol) {
  if (gamma.rows() == 0 || gamma.cols() == 0)
    throw DimensionError("Gamma", "must be non-empty");
  if (psi.size() != gamma.rows())
    throw DimensionError("Psi", "expected " + std::to_string(gamma.rows()) +
                                    " entries, got " +
                                    std::to_string(psi.size()));
  require_finite(gamma, "Gamma");
  require_finite(psi, "Psi");
}

bool operator==(const PolytopeSpec& x, const PolytopeSpec& y) {
  return x.polarity == y.polarity && same(x.gamma, y.gamma) && same(x.psi, y.psi);
}

EllipsoidSpec::EllipsoidSpec(Matrix qm, Vector center, double r, Polarity pol)
    : q(std::move(qm)), a(std::move(center)), radius(r), polarity(pol) {
  if (q.rows() == 0 || q.rows() != q.cols())
    throw DimensionError("Q", "must be square and non-empty, got " + shape(q));
  if (a.size() != q.rows())
    throw DimensionError("a", "expected " + std::to_string(q.rows()) +
                                  " entries, got " + std::to_string(a.size()));
  require_finite(q, "Q");
  require_finite(a, "a");
  if (!(std::isfinite(radius) && radius > 0.0))
    throw InvariantError("ellipsoid radius must be positive and finite");
  const double sym_tol = 1e-10 * std::max(q.norm(), 1e-300);
  if ((q - q.transpose()).norm() > sym_tol)
    throw InvariantError("Q is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigenvalues of Q could not be computed");
  if (!(es.eigenvalues().minCoeff() > 0.0))
    throw InvariantError("Q is not positive definite");
}

bool operator==(const EllipsoidSpec& x, const EllipsoidSpec& y) {
  return x.polarity == y.polarity && x.radius == y.radius && same(x.q, y.q) &&
         same(x.a, y.a);
}

Index spec_output_dim(const Spec& spec) {
  return std::visit([](const auto& s) { return s.p(); }, spec);
}

Polarity spec_polarity(const Spec& spec) {
  return std::visit([](const auto& s) { return s.polarity; }, spec);
}

bool spec_satisfied(const Spec& spec, const Vector& y) {
  struct Visitor {
    const Vector& y;
    bool operator()(const PolytopeSpec& s) const {
      const bool inside = ((s.gamma * y + s.psi).array() <= 0.0).all();
      return s.polarity == Polarity::kSafeRegion ? inside : !inside;
    }
    bool operator()(const EllipsoidSpec& s) const {
      const Vector d = y - s.a;
      const bool inside = d.dot(s.q * d) <= s.radius * s.radius;
      return s.polarity == Polarity::kSafeRegion ? inside : !inside;
    }
  };
  return std::visit(Visitor{y}, spec);
}

PssSystem::PssSystem(std::vector<LtiSystem> modes, std::vector<double> durations,
                     std::vector<HyperBox> mode_initial_sets)
    : modes_(std::move(modes)),
      durations_(std::move(durations)),
      initial_(std::move(mode_initial_sets)) {
  if (modes_.empty()) throw InvariantError("PSS needs at least one mode");
  if (durations_.size() != modes_.size() || initial_.size() != modes_.size())
    throw InvariantError("PSS modes, durations and initial sets differ in length");
  const auto& first = modes_.front();
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const auto& mode = modes_[i];
    const std::string tag = "mode " + std::to_string(i + 1);
    if (mode.n() != first.n() || mode.m() != first.m() || mode.p() != first.p())
      throw DimensionError(tag, "dimensions differ from mode 1");
    if (!(std::isfinite(durations_[i]) && durations_[i] > 0.0))
      throw InvariantError(tag + " duration must be positive");
    if (initial_[i].dim() != first.n())
      throw DimensionError(tag + " x0", "expected dimension " +
                                            std::to_string(first.n()));
    require_hurwitz(mode, tag);
  }
}

double PssSystem::period() const {
  double t = 0.0;
  for (double d : durations_) t += d;
  return t;
}

bool operator==(const PssSystem& x, const PssSystem& y) {
  return x.modes_ == y.modes_ && x.durations_ == y.durations_ &&
         x.initial_ == y.initial_;
}

VerificationProblem::VerificationProblem(std::string nm, SystemModel sys,
                                         HyperBox init, HyperBox in,
                                         std::vector<Spec> sp, double horizon)
    : name(std::move(nm)),
      system(std::move(sys)),
      x0(std::move(init)),
      inputs(std::move(in)),
      specs(std::move(sp)),
      t_f(horizon) {
  if (!(std::isfinite(t_f) && t_f > 0.0))
    throw InvariantError("t_f must be positive and finite");
  if (x0.dim() != n())
    throw DimensionError("x0", "expected dimension " + std::to_string(n()) +
                                   ", got " + std::to_string(x0.dim()));
  if (inputs.dim() != m())
    throw DimensionError("input", "expected dimension " + std::to_string(m()) +
                                      ", got " + std::to_string(inputs.dim()));
  if (specs.empty()) throw InvariantError("at least one spec is required");
  for (const auto& s : specs)
    if (spec_output_dim(s) != p())
      throw DimensionError("spec", "expected output dimension " +
                                       std::to_string(p()) + ", got " +
                                       std::to_string(spec_output_dim(s)));
}

const LtiSystem& VerificationProblem::lti() const {
  if (const auto* s = std::get_if<LtiSystem>(&system)) return *s;
  throw Error("problem '" + name + "' is a PSS, not an LTI system");
}

const PssSystem& VerificationProblem::pss() const {
  if (const auto* s = std::get_if<PssSystem>(&system)) return *s;
  throw Error("problem '" + name + "' is an LTI system, not a PSS");
}

Index VerificationProblem::n() const {
  return is_pss() ? pss().modes().front().n() : lti().n();
}
Index VerificationProblem::m() const {
  return is_pss() ? pss().modes().front().m() : lti().m();
}
Index VerificationProblem::p() const {
  return is_pss() ? pss().modes().front().p() : lti().p();
}

bool operator==(const VerificationProblem& x, const VerificationProblem& y) {
  return x.name == y.name && x.system == y.system && x.x0 == y.x0 &&
         x.inputs == y.inputs && x.specs == y.specs && x.t_f == y.t_f;
}

double spectral_abscissa(const Matrix& a) {
  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigenvalue computation did not converge");
  const auto ev = es.eigenvalues();
  if (!ev.allFinite()) throw NumericalError("eigenvalues are not finite");
  return ev.real().maxCoeff();
}

StabilityReport check_stability(const LtiSystem& sys, double margin) {
  const double abscissa = spectral_abscissa(sys.A());
  const double threshold = -margin * sys.A().norm();
  return {abscissa < threshold, abscissa, threshold};
}

void require_hurwitz(const LtiSystem& sys, const std::string& what,
                     double margin) {
  const auto rep = check_stability(sys, margin);
  if (!rep.stable)
    throw NotHurwitzError(what + " is not asymptotically stable (spectral "
                          "abscissa " + std::to_string(rep.spectral_abscissa) +
                          ")");
}

}  // namespace btv
