#include "cfsim/gca.hpp"

#include <stdexcept>
#include <string>

#include "cfsim/errors.hpp"

namespace cfsim {

namespace {

std::vector<Trace> written_cells(std::span<const std::optional<Trace>> set) {
  std::vector<Trace> out;
  out.reserve(set.size());
  for (const auto& c : set)
    if (c.has_value()) out.push_back(*c);
  return out;
}

}  // namespace

bool bot_compatible(std::span<const std::optional<Trace>> set) {
  return compatible(written_cells(set));
}

Trace bot_lub(std::span<const std::optional<Trace>> set, ConflictRelationPtr rel) {
  std::vector<Trace> cells = written_cells(set);
  if (cells.empty()) return Trace::empty(std::move(rel));
  return lub(cells);
}

std::optional<Trace> bot_glb(std::span<const std::optional<Trace>> set) {
  std::vector<Trace> cells;
  cells.reserve(set.size());
  for (const auto& c : set) {
    if (!c.has_value()) return std::nullopt;
    cells.push_back(*c);
  }
  return glb(cells);
}

CompatProjection compat_projection(const std::vector<std::optional<Trace>>& view,
                                   ConflictRelationPtr rel) {
  CompatProjection out;
  out.projected.resize(view.size());
  for (size_t k = 0; k < view.size(); ++k) {
    if (!view[k].has_value()) continue;  // unwritten cells pass through
    std::vector<Trace> clash{*view[k]};
    for (size_t j = 0; j < view.size(); ++j) {
      if (j == k || !view[j].has_value()) continue;
      if (!compatible({*view[j], *view[k]})) clash.push_back(*view[j]);
    }
    out.projected[k] = glb(clash);
  }
  out.unchanged = (out.projected == view);

  std::vector<Trace> cells = written_cells(out.projected);
  if (cells.empty()) {
    out.candidate = Trace::empty(std::move(rel));
    return out;
  }
  std::optional<Trace> merged = try_lub(cells);
  if (!merged.has_value())
    throw std::logic_error("compatibility projection produced an incompatible set");
  out.candidate = *merged;
  return out;
}

SimTask<GcaResult> gca_propose(World& w, ProcessContext& ctx, int64_t round, Trace input) {
  World::GcaObjects& inst = w.gca_instance(round);
  const uint32_t bit = 1u << (ctx.id - 1);
  if (inst.proposed & bit)
    throw DoubleProposal("process " + std::to_string(ctx.id) +
                         " proposed twice to commit-adopt round " + std::to_string(round));
  inst.proposed |= bit;

  const size_t ledger_idx = w.rec.gca_ledger.size();
  {
    GcaProposeRec rec;
    rec.round = round;
    rec.process = ctx.id;
    rec.input = input;
    rec.entry_mark = w.now;
    w.rec.gca_ledger.push_back(std::move(rec));
  }

  // Step 1: announce the proposal.
  Action announce{Action::Kind::snap_update, inst.A, ctx.id - 1, CellValue(input)};
  co_await mem_step(ctx, std::move(announce));

  // Step 2: scan all announcements.
  Action scan_a{Action::Kind::snap_scan, inst.A, 0, {}};
  ActionResult a = co_await mem_step(ctx, std::move(scan_a));
  std::vector<std::optional<Trace>> view_a(w.n);
  for (int k = 0; k < w.n; ++k)
    if (!is_bottom(a.view[k])) view_a[k] = std::get<Trace>(a.view[k]);

  CompatProjection proj = compat_projection(view_a, w.rel);

  // Step 3: publish the merge candidate plus whether the projection was the
  // identity on the scanned view.
  Action publish{Action::Kind::snap_update, inst.B, ctx.id - 1,
                 CellValue(BEntry{proj.candidate, proj.unchanged})};
  co_await mem_step(ctx, std::move(publish));

  // Step 4: scan all candidates.
  Action scan_b{Action::Kind::snap_scan, inst.B, 0, {}};
  ActionResult b = co_await mem_step(ctx, std::move(scan_b));
  std::vector<std::optional<BEntry>> view_b(w.n);
  for (int k = 0; k < w.n; ++k)
    if (!is_bottom(b.view[k])) view_b[k] = std::get<BEntry>(b.view[k]);

  // Adopt the greatest common prefix of the flagged candidates, or our own
  // candidate if nobody's flag is up. Our own cell is always written.
  std::vector<Trace> flagged;
  for (int k = 0; k < w.n; ++k)
    if (view_b[k].has_value() && view_b[k]->flag) flagged.push_back(view_b[k]->trace);
  if (!view_b[ctx.id - 1].has_value())
    throw std::logic_error("own candidate cell missing from scan");
  const Trace beta = flagged.empty() ? view_b[ctx.id - 1]->trace : glb(flagged);

  // Commit if every written cell in both scans equals our own input (nobody
  // observed disagreement), or if every announcement below the adopted trace
  // has published a candidate and nobody's flag is down.
  bool all_equal_input = true;
  for (int k = 0; k < w.n; ++k) {
    if (view_a[k].has_value() && *view_a[k] != input) all_equal_input = false;
    if (view_b[k].has_value() && view_b[k]->trace != input) all_equal_input = false;
  }
  bool covered = true;   // announcements <= beta all have candidates published
  bool any_down = false; // somebody's flag is explicitly false
  for (int k = 0; k < w.n; ++k) {
    if (view_a[k].has_value() && is_prefix(*view_a[k], beta) && !view_b[k].has_value())
      covered = false;
    if (view_b[k].has_value() && !view_b[k]->flag) any_down = true;
  }
  const bool commit = all_equal_input || (covered && !any_down);

  GcaResult result{beta, commit};
  w.rec.gca_ledger[ledger_idx].output = result;
  w.rec.gca_ledger[ledger_idx].exit_mark = w.now;
  co_return result;
}

}  // namespace cfsim
