#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "btv/bounds.hpp"
#include "btv/reach.hpp"
#include "btv/witness.hpp"

namespace btv {

enum class Outcome { kSafe, kUnsafe, kIndeterminate };
const char* outcome_name(Outcome o);
/// 0 Safe, 1 Unsafe, 2 Indeterminate.
int exit_code(Outcome o);

struct VerifyOptions {
  /// Defaults: k0 = p + 1, k_max = n.
  std::optional<Index> k0;
  std::optional<Index> k_max;
  BoundOptions bounds = default_bound_options();
  ReachOptions reach;
  std::size_t witness_budget = 256;
  std::uint64_t seed = 0;
  /// Re-simulate the full-order model before accepting a witness.
  bool confirm_witness = true;
  /// k0, 2 k0, 4 k0, ... capped at k_max instead of k0, k0 + 1, ...
  bool geometric_schedule = false;
  /// Wall-clock budget in seconds (0 = unlimited); overrun ends the loop
  /// with Indeterminate.
  double time_budget_s = 0.0;

  static BoundOptions default_bound_options();
};

struct ModeLog {
  std::size_t mode = 0;
  ErrorBound delta;
  std::vector<TransformedSpec> specs;
  CheckOutcome check = CheckOutcome::kIndeterminate;
  std::size_t reach_steps = 0;
  double horizon = 0.0;
  std::string note;
};

struct KLogEntry {
  Index k = 0;
  std::vector<ModeLog> modes;
  CheckOutcome outcome = CheckOutcome::kIndeterminate;
  bool skipped = false;
  std::string note;
  double seconds = 0.0;
};

struct Verdict {
  Outcome outcome = Outcome::kIndeterminate;
  std::optional<Index> k_used;
  /// Bound of the deciding iteration, one per mode (a single entry for LTI).
  std::vector<ErrorBound> delta;
  std::optional<Witness> witness;
  std::optional<std::size_t> witness_mode;
  std::vector<KLogEntry> per_k_log;
  std::vector<std::string> warnings;
};

/// The k-incrementing semi-algorithm for an LTI problem.
Verdict verify(const VerificationProblem& problem, const VerifyOptions& opts = {});

/// Per-mode abstraction of a periodically switched system. Each mode is
/// analysed from its reset set over its own dwell time; the problem is Safe
/// iff every active mode is.
Verdict verify_pss(const VerificationProblem& problem,
                   const VerifyOptions& opts = {});

/// The k values visited.
std::vector<Index> k_schedule(Index k0, Index k_max, bool geometric);

}  // namespace btv
