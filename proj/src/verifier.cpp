#include "btv/verifier.hpp"

#include <chrono>
#include <memory>

namespace btv {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct ModeSetup {
  std::size_t index;
  const LtiSystem* sys;
  HyperBox x0;
  double horizon;
  std::shared_ptr<const BalancedRealization> bal;
};

struct ModeAttempt {
  ModeLog log;
  std::optional<Witness> witness;
};

ModeAttempt analyse_mode(const ModeSetup& m, Index k, const VerificationProblem& problem,
                         const VerifyOptions& opts) {
  ModeAttempt out;
  out.log.mode = m.index;
  out.log.horizon = m.horizon;
  const Abstraction abs = truncate(m.bal, k, m.x0);
  out.log.delta = compute_error_bound(*m.bal, abs, m.x0, problem.inputs, m.horizon,
                                      opts.bounds);
  out.log.specs = transform_all(problem.specs, out.log.delta.delta);
  for (const auto& s : out.log.specs) {
    if (s.safe_region_empty()) {
      out.log.note = "transformed safe region is empty";
      out.log.check = CheckOutcome::kIndeterminate;
      return out;
    }
  }
  const Zonotope xr0 = Zonotope::from_box(m.x0).linear_map(abs.initial_map);
  const ReachResult reach =
      reach_lti(abs.reduced, xr0, problem.inputs, m.horizon, opts.reach);
  out.log.reach_steps = reach.steps.size();
  const CheckResult check = check_specs(reach, out.log.specs);
  out.log.check = check.outcome;
  out.log.note = check.note;
  if (check.outcome == CheckOutcome::kMaybeUnsafe) {
    WitnessOptions wo;
    wo.budget = opts.witness_budget;
    wo.seed = opts.seed + static_cast<std::uint64_t>(k) * 1000003ULL + m.index;
    wo.confirm_with = opts.confirm_witness ? m.sys : nullptr;
    out.witness = find_unsafe_witness(abs.reduced, abs.initial_map, m.x0,
                                      problem.inputs, out.log.specs, m.horizon, wo);
  }
  return out;
}

Verdict run(const VerificationProblem& problem, std::vector<ModeSetup> modes,
            const VerifyOptions& opts) {
  const auto t_start = Clock::now();
  const Index n = problem.n(), p = problem.p();
  if (p >= n)
    throw std::invalid_argument("no output abstraction exists: p >= n");
  const Index k0 = opts.k0.value_or(p + 1);
  const Index k_max = opts.k_max.value_or(n);
  if (!(p < k0 && k0 <= k_max && k_max <= n))
    throw std::invalid_argument("orders must satisfy p < k0 <= k_max <= n");

  Verdict verdict;
  for (auto& m : modes) {
    m.bal = std::make_shared<const BalancedRealization>(balance(*m.sys));
    for (const auto& w : m.bal->warnings)
      verdict.warnings.push_back("mode " + std::to_string(m.index + 1) + ": " + w);
  }

  for (Index k : k_schedule(k0, k_max, opts.geometric_schedule)) {
    if (opts.time_budget_s > 0.0 && seconds_since(t_start) > opts.time_budget_s) {
      verdict.warnings.push_back("wall-clock budget exhausted before k=" +
                                 std::to_string(k));
      break;
    }
    const auto t_k = Clock::now();
    KLogEntry entry;
    entry.k = k;
    bool all_safe = true;
    std::optional<Witness> witness;
    std::size_t witness_mode = 0;
    for (const auto& m : modes) {
      ModeAttempt a = analyse_mode(m, k, problem, opts);
      if (a.log.check != CheckOutcome::kSafe) all_safe = false;
      if (a.log.note == "transformed safe region is empty") entry.skipped = true;
      if (a.log.check == CheckOutcome::kMaybeUnsafe)
        entry.outcome = CheckOutcome::kMaybeUnsafe;
      if (a.witness && !witness) {
        witness = std::move(a.witness);
        witness_mode = m.index;
      }
      entry.modes.push_back(std::move(a.log));
      if (witness) break;
    }
    if (all_safe) entry.outcome = CheckOutcome::kSafe;
    if (entry.skipped) entry.note = "skipped: transformed safe region is empty";
    entry.seconds = seconds_since(t_k);

    auto take_deltas = [&] {
      for (const auto& ml : entry.modes) verdict.delta.push_back(ml.delta);
    };
    verdict.per_k_log.push_back(entry);
    if (all_safe) {
      verdict.outcome = Outcome::kSafe;
      verdict.k_used = k;
      take_deltas();
      return verdict;
    }
    if (witness) {
      verdict.outcome = Outcome::kUnsafe;
      verdict.k_used = k;
      verdict.witness = std::move(witness);
      verdict.witness_mode = witness_mode;
      take_deltas();
      return verdict;
    }
  }
  verdict.outcome = Outcome::kIndeterminate;
  return verdict;
}

}  // namespace

BoundOptions VerifyOptions::default_bound_options() {
  BoundOptions b;
  b.e1_methods = {E1Method::kTheorem1, E1Method::kTheorem2, E1Method::kSimulation};
  b.e2_methods = {E2Method::kTheorem3, E2Method::kSimulation};
  return b;
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kSafe: return "safe";
    case Outcome::kUnsafe: return "unsafe";
    case Outcome::kIndeterminate: return "indeterminate";
  }
  return "?";
}

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::kSafe: return 0;
    case Outcome::kUnsafe: return 1;
    case Outcome::kIndeterminate: return 2;
  }
  return 3;
}

std::vector<Index> k_schedule(Index k0, Index k_max, bool geometric) {
  std::vector<Index> ks;
  if (k0 > k_max) return ks;
  if (!geometric) {
    for (Index k = k0; k <= k_max; ++k) ks.push_back(k);
    return ks;
  }
  for (Index k = k0; k < k_max; k *= 2) ks.push_back(k);
  ks.push_back(k_max);
  return ks;
}

Verdict verify(const VerificationProblem& problem, const VerifyOptions& opts) {
  if (problem.is_pss())
    throw std::invalid_argument("verify expects an LTI problem; use verify_pss");
  require_hurwitz(problem.lti(), "A");
  return run(problem, {{0, &problem.lti(), problem.x0, problem.t_f, nullptr}}, opts);
}

Verdict verify_pss(const VerificationProblem& problem, const VerifyOptions& opts) {
  if (!problem.is_pss()) return verify(problem, opts);
  const PssSystem& pss = problem.pss();
  std::vector<ModeSetup> modes;
  double start = 0.0;
  for (std::size_t i = 0; i < pss.size(); ++i) {
    if (start >= problem.t_f && i > 0) break;
    const double horizon = std::min(pss.durations()[i], problem.t_f - start);
    modes.push_back({i, &pss.modes()[i], pss.mode_initial_sets()[i], horizon, nullptr});
    start += pss.durations()[i];
  }
  return run(problem, std::move(modes), opts);
}

}  // namespace btv
