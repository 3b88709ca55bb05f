#include "cfsim/trace.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <unordered_set>

#include "cfsim/seq_spec.hpp"

namespace cfsim {

namespace {

// Pick the governing relation for an operation over several traces; traces
// with a null relation (relation-less empty trace) defer to the others.
ConflictRelationPtr merge_relation(const ConflictRelationPtr& a, const ConflictRelationPtr& b) {
  if (!a) return b;
  if (!b) return a;
  if (a == b || *a == *b) return a;
  throw UsageError("trace operation across mismatched conflict relations");
}

ConflictRelationPtr merge_relation(std::span<const Trace> set) {
  ConflictRelationPtr rel;
  for (const Trace& t : set) rel = merge_relation(rel, t.relation());
  return rel;
}

// Occurrence index (1-based) of each position within its letter value.
std::vector<int> occurrence_indices(const Schedule& s) {
  std::vector<int> idx(s.size());
  std::map<Letter, int> seen;
  for (size_t p = 0; p < s.size(); ++p) idx[p] = ++seen[s[p]];
  return idx;
}

// Consume the letters of `t` (in the given order) from the front of `u`.
// Returns the leftover positions of `u` in order, or nullopt if `t` is not a
// prefix of [u].
std::optional<Schedule> consume_prefix(const Schedule& t, const Schedule& u,
                                       const ConflictRelation& rel) {
  std::vector<bool> used(u.size(), false);
  for (const Letter& a : t) {
    size_t p = u.size();
    for (size_t q = 0; q < u.size(); ++q) {
      if (!used[q] && u[q] == a) {
        p = q;
        break;
      }
    }
    if (p == u.size()) return std::nullopt;
    for (size_t q = 0; q < p; ++q)
      if (!used[q] && rel.conflicts(u[q], a)) return std::nullopt;
    used[p] = true;
  }
  Schedule rest;
  for (size_t q = 0; q < u.size(); ++q)
    if (!used[q]) rest.push_back(u[q]);
  return rest;
}

}  // namespace

Schedule normalize(const Schedule& s, const ConflictRelation& rel) {
  std::vector<bool> used(s.size(), false);
  Schedule out;
  out.reserve(s.size());
  for (size_t step = 0; step < s.size(); ++step) {
    size_t best = s.size();
    for (size_t p = 0; p < s.size(); ++p) {
      if (used[p]) continue;
      bool available = true;
      for (size_t q = 0; q < p && available; ++q) {
        if (used[q]) continue;
        // An earlier unconsumed equal letter is the one to emit; an earlier
        // unconsumed conflicting letter pins this one behind it.
        if (s[q] == s[p] || rel.conflicts(s[q], s[p])) available = false;
      }
      if (!available) continue;
      if (best == s.size() || s[p] < s[best]) best = p;
    }
    assert(best < s.size());
    used[best] = true;
    out.push_back(s[best]);
  }
  return out;
}

bool equivalent(const Schedule& s, const Schedule& t, const ConflictRelation& rel) {
  if (ops(s) != ops(t)) return false;
  // Relative order of every conflicting occurrence pair, keyed independently
  // of position so the two schedules can be compared.
  using OccKey = std::pair<Letter, int>;
  auto order_map = [&rel](const Schedule& x) {
    std::map<std::pair<OccKey, OccKey>, bool> m;
    std::vector<int> idx = occurrence_indices(x);
    for (size_t p = 0; p < x.size(); ++p) {
      for (size_t q = p + 1; q < x.size(); ++q) {
        if (!rel.conflicts(x[p], x[q])) continue;
        OccKey a{x[p], idx[p]}, b{x[q], idx[q]};
        if (a <= b)
          m[{a, b}] = true;  // a occurs first
        else
          m[{b, a}] = false;
      }
    }
    return m;
  };
  return order_map(s) == order_map(t);
}

Trace Trace::of(const Schedule& s, ConflictRelationPtr rel) {
  if (!rel && !s.empty()) throw UsageError("non-empty trace needs a conflict relation");
  Schedule canon = s.empty() ? s : normalize(s, *rel);
  return Trace(std::move(canon), std::move(rel));
}

Trace Trace::single(const Letter& l, ConflictRelationPtr rel) {
  return Trace::of(Schedule{l}, std::move(rel));
}

bool Trace::operator==(const Trace& o) const {
  merge_relation(rel_, o.rel_);  // reject cross-relation comparison
  return canon_ == o.canon_;
}

Trace concat(const Trace& a, const Trace& b) {
  ConflictRelationPtr rel = merge_relation(a.relation(), b.relation());
  Schedule s = a.canonical();
  s.insert(s.end(), b.canonical().begin(), b.canonical().end());
  return Trace::of(s, rel);
}

Trace append(const Trace& a, const Letter& l) {
  Schedule s = a.canonical();
  s.push_back(l);
  return Trace::of(s, a.relation());
}

OpsMultiset ops(const Schedule& s) {
  OpsMultiset m;
  for (const Letter& l : s) ++m[l];
  return m;
}

OpsMultiset ops(const Trace& t) { return ops(t.canonical()); }

bool contains(const OpsMultiset& m, const Letter& l) { return m.find(l) != m.end(); }

bool multiset_subset(const OpsMultiset& a, const OpsMultiset& b) {
  for (const auto& [l, n] : a) {
    auto it = b.find(l);
    if (it == b.end() || it->second < n) return false;
  }
  return true;
}

OpsMultiset multiset_union_max(const OpsMultiset& a, const OpsMultiset& b) {
  OpsMultiset m = a;
  for (const auto& [l, n] : b) {
    int& cur = m[l];
    cur = std::max(cur, n);
  }
  return m;
}

bool is_prefix(const Trace& t, const Trace& u) {
  if (t.empty_trace()) return true;
  ConflictRelationPtr rel = merge_relation(t.relation(), u.relation());
  if (t.size() > u.size()) return false;
  return consume_prefix(t.canonical(), u.canonical(), *rel).has_value();
}

Trace residual(const Trace& t, const Trace& u) {
  ConflictRelationPtr rel = merge_relation(t.relation(), u.relation());
  if (t.empty_trace()) return u;
  auto rest = consume_prefix(t.canonical(), u.canonical(), *rel);
  if (!rest) throw NotAPrefix("residual: first argument is not a prefix of the second");
  return Trace::of(*rest, rel);
}

Trace glb(std::span<const Trace> set) {
  if (set.empty()) throw UsageError("glb of an empty set");
  ConflictRelationPtr rel = merge_relation(set);
  if (!rel) return Trace();  // all members are the relation-less empty trace

  struct Member {
    const Schedule* s;
    std::vector<bool> used;
  };
  std::vector<Member> ms;
  ms.reserve(set.size());
  for (const Trace& t : set) ms.push_back({&t.canonical(), std::vector<bool>(t.size(), false)});

  // A letter is available in a member if its first unconsumed occurrence has
  // no unconsumed conflicting letter before it. Peel letters available in
  // every member, least first.
  auto available_in = [&rel](const Member& m, const Letter& a) {
    for (size_t p = 0; p < m.s->size(); ++p) {
      if (m.used[p]) continue;
      if ((*m.s)[p] == a) {
        for (size_t q = 0; q < p; ++q)
          if (!m.used[q] && rel->conflicts((*m.s)[q], a)) return false;
        return true;
      }
      // Positions before the first unconsumed occurrence keep scanning.
    }
    return false;
  };
  auto consume = [](Member& m, const Letter& a) {
    for (size_t p = 0; p < m.s->size(); ++p) {
      if (!m.used[p] && (*m.s)[p] == a) {
        m.used[p] = true;
        return;
      }
    }
    assert(false && "consume: letter not present");
  };

  Schedule out;
  for (;;) {
    std::optional<Letter> pick;
    // Candidate letters: the distinct remaining letters of the first member.
    const Member& m0 = ms.front();
    for (size_t p = 0; p < m0.s->size(); ++p) {
      if (m0.used[p]) continue;
      const Letter& a = (*m0.s)[p];
      if (pick && *pick <= a) continue;
      bool everywhere = true;
      for (const Member& m : ms)
        if (!available_in(m, a)) {
          everywhere = false;
          break;
        }
      if (everywhere) pick = a;
    }
    if (!pick) break;
    for (Member& m : ms) consume(m, *pick);
    out.push_back(*pick);
  }
  return Trace::of(out, rel);
}

Trace glb(std::initializer_list<Trace> set) {
  return glb(std::span<const Trace>(set.begin(), set.size()));
}

std::optional<Trace> try_lub(std::span<const Trace> set) {
  ConflictRelationPtr rel = merge_relation(set);
  if (!rel) return Trace();  // empty set or all relation-less empties
  const ConflictRelation& R = *rel;

  // Aligned occurrence universe: the k-th occurrence of a letter in any
  // member is the k-th occurrence in the bound.
  OpsMultiset counts;
  for (const Trace& t : set) counts = multiset_union_max(counts, ops(t));

  struct Node {
    Letter letter;
    int index;  // 1-based occurrence index
  };
  std::vector<Node> nodes;
  std::map<std::pair<Letter, int>, int> node_id;
  for (const auto& [l, n] : counts) {
    for (int k = 1; k <= n; ++k) {
      node_id[{l, k}] = static_cast<int>(nodes.size());
      nodes.push_back({l, k});
    }
  }

  std::vector<std::vector<bool>> edge(nodes.size(), std::vector<bool>(nodes.size(), false));
  auto add_edge = [&](int from, int to) {
    if (from != to) edge[from][to] = true;
  };

  // Occurrences of the same letter keep their index order.
  for (const auto& [l, n] : counts)
    for (int k = 1; k < n; ++k) add_edge(node_id[{l, k}], node_id[{l, k + 1}]);

  for (const Trace& t : set) {
    const Schedule& s = t.canonical();
    std::vector<int> idx = occurrence_indices(s);
    // Order constraints between conflicting occurrences the member contains.
    for (size_t p = 0; p < s.size(); ++p)
      for (size_t q = p + 1; q < s.size(); ++q)
        if (R.conflicts(s[p], s[q]))
          add_edge(node_id[{s[p], idx[p]}], node_id[{s[q], idx[q]}]);
    // Occurrences the member lacks must come after every conflicting
    // occurrence it has — otherwise the member could not be consumed from the
    // front of the bound.
    OpsMultiset mine = ops(s);
    for (size_t n = 0; n < nodes.size(); ++n) {
      auto it = mine.find(nodes[n].letter);
      int have = it == mine.end() ? 0 : it->second;
      if (nodes[n].index <= have) continue;  // member has this occurrence
      for (size_t p = 0; p < s.size(); ++p)
        if (R.conflicts(s[p], nodes[n].letter))
          add_edge(node_id[{s[p], idx[p]}], static_cast<int>(n));
    }
  }

  // Deterministic topological order, least node first. A cycle means the
  // members impose contradictory orders: no common extension.
  std::vector<int> indeg(nodes.size(), 0);
  for (size_t a = 0; a < nodes.size(); ++a)
    for (size_t b = 0; b < nodes.size(); ++b)
      if (edge[a][b]) ++indeg[b];
  std::vector<bool> emitted(nodes.size(), false);
  Schedule out;
  for (size_t step = 0; step < nodes.size(); ++step) {
    int pick = -1;
    for (size_t n = 0; n < nodes.size(); ++n)
      if (!emitted[n] && indeg[n] == 0 && (pick < 0 || nodes[n].letter < nodes[pick].letter))
        pick = static_cast<int>(n);
    if (pick < 0) return std::nullopt;
    emitted[pick] = true;
    out.push_back(nodes[pick].letter);
    for (size_t b = 0; b < nodes.size(); ++b)
      if (edge[pick][b]) --indeg[b];
  }

  Trace z = Trace::of(out, rel);
  for (const Trace& t : set) {
    if (!is_prefix(t, z))
      throw std::logic_error("lub: constructed bound does not extend every member");
  }
  return z;
}

Trace lub(std::span<const Trace> set) {
  auto z = try_lub(set);
  if (!z) throw Incompatible("lub of an incompatible set");
  return *z;
}

Trace lub(std::initializer_list<Trace> set) {
  return lub(std::span<const Trace>(set.begin(), set.size()));
}

bool compatible(std::span<const Trace> set) { return try_lub(set).has_value(); }

bool compatible(std::initializer_list<Trace> set) {
  return compatible(std::span<const Trace>(set.begin(), set.size()));
}

std::vector<std::pair<Value, Value>> sigma_star(const SequentialSpec& spec, const Trace& t,
                                                const Value& start) {
  std::vector<std::pair<Value, Value>> out;
  Value q = start;
  for (const Letter& l : t.canonical()) {
    auto [resp, next] = spec.apply(l.op, q);
    out.emplace_back(resp, next);
    q = std::move(next);
  }
  return out;
}

Value ret_star(const SequentialSpec& spec, const OccurrenceRef& occ, const Trace& t) {
  if (occ.index < 1) throw UsageError("ret_star: occurrence indices are 1-based");
  const Schedule& s = t.canonical();
  int seen = 0;
  size_t pos = s.size();
  for (size_t p = 0; p < s.size(); ++p) {
    if (s[p] == occ.letter && ++seen == occ.index) {
      pos = p;
      break;
    }
  }
  if (pos == s.size()) throw OccurrenceNotFound("ret_star: occurrence not in trace");
  auto evals = sigma_star(spec, t, spec.initial);
  return evals[pos].first;
}

std::vector<Schedule> oracle_representatives(const Schedule& s, const ConflictRelation& rel,
                                             size_t bound) {
  if (s.size() > bound) throw OracleBoundExceeded("oracle_representatives: trace too long");
  std::unordered_set<Schedule, ScheduleHash> seen;
  std::deque<Schedule> queue;
  seen.insert(s);
  queue.push_back(s);
  while (!queue.empty()) {
    Schedule cur = std::move(queue.front());
    queue.pop_front();
    for (size_t i = 0; i + 1 < cur.size(); ++i) {
      if (cur[i] == cur[i + 1] || rel.conflicts(cur[i], cur[i + 1])) continue;
      Schedule next = cur;
      std::swap(next[i], next[i + 1]);
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  std::vector<Schedule> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Schedule> oracle_representatives(const Trace& t, size_t bound) {
  if (t.empty_trace()) return {Schedule{}};
  return oracle_representatives(t.canonical(), *t.relation(), bound);
}

}  // namespace cfsim
