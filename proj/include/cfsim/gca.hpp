#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cfsim/sim.hpp"
#include "cfsim/task.hpp"

namespace cfsim {

// Operators lifted to views whose cells may be unwritten (nullopt):
// compatibility and least upper bound ignore unwritten cells (the lub of
// nothing is the empty trace); the greatest lower bound of a set containing
// an unwritten cell is unwritten.
bool bot_compatible(std::span<const std::optional<Trace>> set);
Trace bot_lub(std::span<const std::optional<Trace>> set, ConflictRelationPtr rel);
std::optional<Trace> bot_glb(std::span<const std::optional<Trace>> set);

// First local phase of a propose: every written cell is cut down to the
// greatest common prefix of itself and all cells it is incompatible with;
// unwritten cells pass through. `unchanged` reports whether the projection
// was the identity on this view; `candidate` is the least upper bound of the
// projected written cells (they are mutually compatible by construction —
// violating that is a logic error, not a data error).
struct CompatProjection {
  std::vector<std::optional<Trace>> projected;
  bool unchanged = false;
  Trace candidate;
};
CompatProjection compat_projection(const std::vector<std::optional<Trace>>& view,
                                   ConflictRelationPtr rel);

// One-shot generalized commit-adopt: exactly four shared-memory steps
// (announce, scan announcements, publish candidate, scan candidates), local
// computation in between. Throws DoubleProposal on a second propose by the
// same process to the same round.
SimTask<GcaResult> gca_propose(World& w, ProcessContext& ctx, int64_t round, Trace input);

}  // namespace cfsim
