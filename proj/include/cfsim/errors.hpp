#pragma once

#include <stdexcept>
#include <string>

namespace cfsim {

// Caller broke a documented precondition (mismatched conflict relations,
// glb/lub of an empty set, out-of-range operation id, ...).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// residual(t, u) requested but t is not a prefix of u.
struct NotAPrefix : UsageError {
  using UsageError::UsageError;
};

// lub(S) requested but S has no common upper bound.
struct Incompatible : UsageError {
  using UsageError::UsageError;
};

// A sequential-spec transition was evaluated outside its domain.
struct SpecError : UsageError {
  using UsageError::UsageError;
};

// ret_star asked for an occurrence the trace does not contain.
struct OccurrenceNotFound : UsageError {
  using UsageError::UsageError;
};

// Representative enumeration asked for a trace beyond the configured bound.
struct OracleBoundExceeded : UsageError {
  using UsageError::UsageError;
};

// A process proposed twice to the same commit-adopt instance.
struct DoubleProposal : UsageError {
  using UsageError::UsageError;
};

// invoke() called on a process that still has an operation in flight.
struct ReentrantInvocation : UsageError {
  using UsageError::UsageError;
};

// Interleaving exploration exceeded its state-space budget.
struct ExplorationBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact linearizability search exceeded its operation-count bound.
struct SearchBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A progress checker was pointed at a record whose schedule plan lacks the
// structure the scenario class requires (no solo window, no phase boundary).
struct ScenarioMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scenario config file could not be parsed or validated.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cfsim
