#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cfsim/letter.hpp"
#include "cfsim/value.hpp"

namespace cfsim {

struct SequentialSpec;

// Multiset of letters with positive multiplicities. std::map keeps iteration
// deterministic.
using OpsMultiset = std::map<Letter, int>;

// The i-th occurrence (1-based) of a letter within a trace.
struct OccurrenceRef {
  Letter letter;
  int index = 1;
};

// Lexicographically least representative of the equivalence class of `s`
// under swaps of adjacent non-conflicting letters.
Schedule normalize(const Schedule& s, const ConflictRelation& rel);

// Definition-level equivalence: equal multisets and identical relative order
// of every conflicting occurrence pair. Agrees with normalize-equality (the
// test suite checks this against the representative-enumeration oracle).
bool equivalent(const Schedule& s, const Schedule& t, const ConflictRelation& rel);

// An equivalence class of schedules, stored by its canonical representative.
// Value type; cheap to copy at the sizes this library works with.
class Trace {
 public:
  // Empty trace usable with any relation.
  Trace() = default;

  static Trace empty(ConflictRelationPtr rel) { return Trace(Schedule{}, std::move(rel)); }
  static Trace of(const Schedule& s, ConflictRelationPtr rel);
  static Trace single(const Letter& l, ConflictRelationPtr rel);

  const Schedule& canonical() const { return canon_; }
  const ConflictRelationPtr& relation() const { return rel_; }
  size_t size() const { return canon_.size(); }
  bool empty_trace() const { return canon_.empty(); }

  // Canonical-representative equality. Traces built under different conflict
  // relations must not be compared (UsageError), except that the relation-less
  // empty trace compares against anything.
  bool operator==(const Trace& o) const;
  bool operator!=(const Trace& o) const { return !(*this == o); }

  // Deterministic order for use as a map key (canonical schedule, lexicographic).
  bool operator<(const Trace& o) const { return canon_ < o.canon_; }

 private:
  Trace(Schedule canon, ConflictRelationPtr rel) : canon_(std::move(canon)), rel_(std::move(rel)) {}

  Schedule canon_;
  ConflictRelationPtr rel_;
};

// Monoid concatenation: [s] . [t] = [s t].
Trace concat(const Trace& a, const Trace& b);
Trace append(const Trace& a, const Letter& l);

OpsMultiset ops(const Trace& t);
OpsMultiset ops(const Schedule& s);
bool contains(const OpsMultiset& m, const Letter& l);
bool multiset_subset(const OpsMultiset& a, const OpsMultiset& b);  // a <= b pointwise
OpsMultiset multiset_union_max(const OpsMultiset& a, const OpsMultiset& b);

// Prefix order: t <= u iff u = t . z for some trace z.
bool is_prefix(const Trace& t, const Trace& u);

// The unique z with u = t . z. Throws NotAPrefix.
Trace residual(const Trace& t, const Trace& u);

// Greatest common prefix of a non-empty set of traces. Always exists.
Trace glb(std::span<const Trace> set);
Trace glb(std::initializer_list<Trace> set);

// Least common extension, if the set has any common extension at all.
std::optional<Trace> try_lub(std::span<const Trace> set);
Trace lub(std::span<const Trace> set);  // throws Incompatible
Trace lub(std::initializer_list<Trace> set);

// comp(S): some common extension exists. comp({}) and comp({t}) hold.
bool compatible(std::span<const Trace> set);
bool compatible(std::initializer_list<Trace> set);

// Lifted transition: responses and states along the canonical representative,
// starting from `start`. Position k of the result is the (response, post-state)
// of the k-th letter.
std::vector<std::pair<Value, Value>> sigma_star(const SequentialSpec& spec, const Trace& t,
                                                const Value& start);

// Response of the index-th occurrence of occ.letter in t, evaluated from the
// spec's initial state. Well-defined on the class (representative-invariant);
// throws OccurrenceNotFound if the occurrence is absent.
Value ret_star(const SequentialSpec& spec, const OccurrenceRef& occ, const Trace& t);

// Every schedule equivalent to t, as the breadth-first closure of adjacent
// non-conflicting swaps. Sorted lexicographically. Intended for oracles and
// desk-scale checks; throws OracleBoundExceeded beyond `bound` letters.
std::vector<Schedule> oracle_representatives(const Trace& t, size_t bound = 8);
std::vector<Schedule> oracle_representatives(const Schedule& s, const ConflictRelation& rel,
                                             size_t bound = 8);

}  // namespace cfsim
