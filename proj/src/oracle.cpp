#include "cfsim/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <stdexcept>

#include "cfsim/seq_spec.hpp"

namespace cfsim {

AlphabetOracle::AlphabetOracle(int num_ops, ConflictRelationPtr rel, int max_len)
    : num_ops_(num_ops), rel_(std::move(rel)), max_len_(max_len) {
  if (num_ops < 1 || num_ops > 4 || max_len < 0 || max_len > 8)
    throw UsageError("AlphabetOracle: supports 1..4 operations and lengths 0..8");

  offset_.assign(max_len_ + 2, 0);
  uint32_t pow = 1;
  for (int l = 0; l <= max_len_; ++l) {
    offset_[l + 1] = offset_[l] + pow;
    pow *= num_ops_;
  }
  class_of_.assign(offset_[max_len_ + 1], -1);

  // Swap-closure flood fill, shortest schedules first; the numerically least
  // index inside a class is its lexicographically least member.
  std::vector<int8_t> buf;
  for (uint32_t idx = 0; idx < class_of_.size(); ++idx) {
    if (class_of_[idx] >= 0) continue;
    int c = static_cast<int>(member_lists_.size());
    member_lists_.emplace_back();
    std::deque<uint32_t> queue{idx};
    class_of_[idx] = c;
    Schedule probe = unpack(idx);
    len_of_class_.push_back(static_cast<int>(probe.size()));
    while (!queue.empty()) {
      uint32_t cur = queue.front();
      queue.pop_front();
      member_lists_[c].push_back(cur);
      Schedule s = unpack(cur);
      for (size_t i = 0; i + 1 < s.size(); ++i) {
        if (s[i] == s[i + 1] || rel_->conflicts(s[i], s[i + 1])) continue;
        std::swap(s[i], s[i + 1]);
        uint32_t nxt = pack(s);
        std::swap(s[i], s[i + 1]);
        if (class_of_[nxt] < 0) {
          class_of_[nxt] = c;
          queue.push_back(nxt);
        }
      }
    }
    std::sort(member_lists_[c].begin(), member_lists_[c].end());
  }
  prefix_memo_.assign(member_lists_.size(),
                      std::vector<int8_t>(member_lists_.size(), int8_t{-1}));
}

uint32_t AlphabetOracle::pack(const Schedule& s) const {
  if (static_cast<int>(s.size()) > max_len_) throw UsageError("AlphabetOracle: schedule too long");
  uint32_t v = 0;
  for (const Letter& l : s) {
    if (l.process != 0 || l.op < 0 || l.op >= num_ops_)
      throw UsageError("AlphabetOracle: letter outside the alphabet");
    v = v * num_ops_ + static_cast<uint32_t>(l.op);
  }
  return offset_[s.size()] + v;
}

Schedule AlphabetOracle::unpack(uint32_t idx) const {
  int len = 0;
  while (idx >= offset_[len + 1]) ++len;
  uint32_t v = idx - offset_[len];
  Schedule s(len);
  for (int i = len - 1; i >= 0; --i) {
    s[i] = Letter::op_only(static_cast<int>(v % num_ops_));
    v /= num_ops_;
  }
  return s;
}

std::vector<int> AlphabetOracle::classes_up_to(int len) const {
  std::vector<int> out;
  for (int c = 0; c < num_classes(); ++c)
    if (len_of_class_[c] <= len) out.push_back(c);
  return out;
}

bool AlphabetOracle::is_prefix(int t, int u) const {
  int8_t& memo = prefix_memo_[t][u];
  if (memo >= 0) return memo != 0;
  bool found = false;
  int tl = len_of_class_[t];
  if (tl <= len_of_class_[u]) {
    for (uint32_t m : member_lists_[u]) {
      Schedule s = unpack(m);
      s.resize(tl);
      if (class_of_[pack(s)] == t) {
        found = true;
        break;
      }
    }
  }
  memo = found ? 1 : 0;
  return found;
}

int AlphabetOracle::residual(int t, int u) const {
  int tl = len_of_class_[t];
  std::optional<int> result;
  for (uint32_t m : member_lists_[u]) {
    Schedule s = unpack(m);
    Schedule head(s.begin(), s.begin() + std::min<size_t>(tl, s.size()));
    if (static_cast<int>(head.size()) < tl || class_of_[pack(head)] != t) continue;
    Schedule tail(s.begin() + tl, s.end());
    int rc = class_of_[pack(tail)];
    if (result && *result != rc)
      throw std::logic_error("oracle residual: witnesses disagree (cancellativity broken)");
    result = rc;
  }
  if (!result) throw NotAPrefix("oracle residual: not a prefix");
  return *result;
}

int AlphabetOracle::concat(int a, int b) const {
  Schedule s = canonical(a);
  Schedule t = canonical(b);
  s.insert(s.end(), t.begin(), t.end());
  return class_of_[pack(s)];
}

int AlphabetOracle::glb(std::span<const int> classes) const {
  if (classes.empty()) throw UsageError("oracle glb: empty set");
  // Candidate common prefixes: prefixes of the members of the first class.
  std::vector<int> candidates;
  for (uint32_t m : member_lists_[classes.front()]) {
    Schedule s = unpack(m);
    for (size_t l = 0; l <= s.size(); ++l) {
      Schedule head(s.begin(), s.begin() + l);
      int c = class_of_[pack(head)];
      if (std::find(candidates.begin(), candidates.end(), c) == candidates.end())
        candidates.push_back(c);
    }
  }
  int best = -1;
  for (int cand : candidates) {
    bool common = true;
    for (int m : classes)
      if (!is_prefix(cand, m)) {
        common = false;
        break;
      }
    if (!common) continue;
    if (best < 0 || len_of_class_[cand] > len_of_class_[best]) {
      best = cand;
    } else if (len_of_class_[cand] == len_of_class_[best] && cand != best) {
      throw std::logic_error("oracle glb: two distinct maximal common prefixes");
    }
  }
  assert(best >= 0);  // the empty trace is always a candidate
  return best;
}

std::optional<int> AlphabetOracle::lub(std::span<const int> classes) const {
  // Aligned occurrence counts: per-operation maximum over the members.
  std::vector<int> want(num_ops_, 0);
  for (int c : classes) {
    std::vector<int> cnt(num_ops_, 0);
    for (const Letter& l : canonical(c)) ++cnt[l.op];
    for (int o = 0; o < num_ops_; ++o) want[o] = std::max(want[o], cnt[o]);
  }
  int total = 0;
  for (int o = 0; o < num_ops_; ++o) total += want[o];
  if (total > max_len_) throw OracleBoundExceeded("oracle lub: bound exceeds table length");

  // Every arrangement of that multiset, deduplicated by class; keep the ones
  // that extend all members.
  std::vector<int> bounds;
  Schedule cur;
  std::vector<int> left = want;
  std::function<void()> emit = [&]() {
    if (static_cast<int>(cur.size()) == total) {
      int c = class_of_[pack(cur)];
      if (std::find(bounds.begin(), bounds.end(), c) != bounds.end()) return;
      bool upper = true;
      for (int m : classes)
        if (!is_prefix(m, c)) {
          upper = false;
          break;
        }
      if (upper) bounds.push_back(c);
      return;
    }
    for (int o = 0; o < num_ops_; ++o) {
      if (left[o] == 0) continue;
      --left[o];
      cur.push_back(Letter::op_only(o));
      emit();
      cur.pop_back();
      ++left[o];
    }
  };
  emit();

  if (bounds.empty()) return std::nullopt;
  std::optional<int> least;
  for (int b : bounds) {
    bool below_all = true;
    for (int other : bounds)
      if (!is_prefix(b, other)) {
        below_all = false;
        break;
      }
    if (below_all) {
      if (least && *least != b)
        throw std::logic_error("oracle lub: two distinct least upper bounds");
      least = b;
    }
  }
  if (!least) throw std::logic_error("oracle lub: upper bounds exist but none is least");
  return least;
}

namespace {

std::string show(const Schedule& s, const SequentialSpec& spec) {
  std::string out = "[";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += ".";
    out += spec.op_name(s[i].op);
  }
  return out + "]";
}

}  // namespace

OracleSuiteReport oracle_suite(int single_len, int pair_total, const OracleHooks& hooks) {
  SequentialSpecPtr spec = counter_spec();
  ConflictRelationPtr rel = spec->conflicts;
  const int table_len = std::max(single_len, pair_total);
  AlphabetOracle oracle(static_cast<int>(spec->op_names.size()), rel, table_len);

  OracleSuiteReport report;
  report.single_len = single_len;
  report.pair_total = pair_total;
  auto mismatch = [&report](const std::string& what) {
    if (report.mismatches.size() < 16) report.mismatches.push_back(what);
  };

  auto prod_normalize = [&](const Schedule& s) {
    return hooks.normalize_override ? hooks.normalize_override(s, *rel) : normalize(s, *rel);
  };
  auto prod_glb = [&](std::span<const Trace> set) {
    return hooks.glb_override ? hooks.glb_override(set) : glb(set);
  };
  auto prod_lub = [&](std::span<const Trace> set) {
    return hooks.lub_override ? hooks.lub_override(set) : try_lub(set);
  };

  // --- unary: every schedule up to single_len ------------------------------
  std::vector<Schedule> singles;
  for (int c : oracle.classes_up_to(single_len))
    for (uint32_t m : oracle.members(c)) singles.push_back(oracle.unpack(m));
  report.schedules = static_cast<int64_t>(singles.size());
  report.classes = static_cast<int64_t>(oracle.classes_up_to(single_len).size());

  for (const Schedule& s : singles) {
    ++report.unary_checks;
    Schedule got = prod_normalize(s);
    Schedule want = oracle.canonical(oracle.cls(s));
    if (got != want)
      mismatch("normalize" + show(s, *spec) + ": got " + show(got, *spec) + " want " +
               show(want, *spec));
  }

  // --- schedule pairs: equivalence ----------------------------------------
  for (const Schedule& s : singles) {
    for (const Schedule& t : singles) {
      if (static_cast<int>(s.size() + t.size()) > pair_total) continue;
      ++report.pair_checks;
      bool got = equivalent(s, t, *rel);
      bool want = oracle.cls(s) == oracle.cls(t);
      if (got != want)
        mismatch("equivalent" + show(s, *spec) + show(t, *spec) + ": got " +
                 (got ? "true" : "false"));
    }
  }

  // --- class pairs: prefix / residual / concat / glb / lub / compatible ----
  std::vector<int> classes = oracle.classes_up_to(single_len);
  auto as_trace = [&](int c) { return Trace::of(oracle.canonical(c), rel); };
  for (int a : classes) {
    for (int b : classes) {
      if (oracle.cls_len(a) + oracle.cls_len(b) > pair_total) continue;
      ++report.pair_checks;
      Trace ta = as_trace(a), tb = as_trace(b);

      bool p_got = is_prefix(ta, tb);
      bool p_want = oracle.is_prefix(a, b);
      if (p_got != p_want)
        mismatch("is_prefix(" + show(ta.canonical(), *spec) + ", " + show(tb.canonical(), *spec) +
                 "): got " + (p_got ? "true" : "false"));
      if (p_want) {
        Trace r_got = residual(ta, tb);
        Schedule r_want = oracle.canonical(oracle.residual(a, b));
        if (r_got.canonical() != r_want)
          mismatch("residual(" + show(ta.canonical(), *spec) + ", " + show(tb.canonical(), *spec) +
                   "): got " + show(r_got.canonical(), *spec));
      }

      Trace c_got = concat(ta, tb);
      Schedule c_want = oracle.canonical(oracle.concat(a, b));
      if (c_got.canonical() != c_want)
        mismatch("concat(" + show(ta.canonical(), *spec) + ", " + show(tb.canonical(), *spec) +
                 "): got " + show(c_got.canonical(), *spec));

      std::vector<Trace> pair{ta, tb};
      std::vector<int> pair_cls{a, b};
      Trace g_got = prod_glb(pair);
      Schedule g_want = oracle.canonical(oracle.glb(pair_cls));
      if (g_got.canonical() != g_want)
        mismatch("glb(" + show(ta.canonical(), *spec) + ", " + show(tb.canonical(), *spec) +
                 "): got " + show(g_got.canonical(), *spec) + " want " + show(g_want, *spec));

      std::optional<Trace> l_got = prod_lub(pair);
      std::optional<int> l_want = oracle.lub(pair_cls);
      if (l_got.has_value() != l_want.has_value())
        mismatch("compatible(" + show(ta.canonical(), *spec) + ", " + show(tb.canonical(), *spec) +
                 "): got " + (l_got ? "true" : "false"));
      else if (l_got && l_got->canonical() != oracle.canonical(*l_want))
        mismatch("lub(" + show(ta.canonical(), *spec) + ", " + show(tb.canonical(), *spec) +
                 "): got " + show(l_got->canonical(), *spec) + " want " +
                 show(oracle.canonical(*l_want), *spec));
    }
  }

  // --- class triples (set operations), members capped at 4 letters ---------
  std::vector<int> small = oracle.classes_up_to(std::min(single_len, 4));
  for (int a : small) {
    for (int b : small) {
      if (oracle.cls_len(a) + oracle.cls_len(b) >= pair_total) continue;
      for (int c : small) {
        if (oracle.cls_len(a) + oracle.cls_len(b) + oracle.cls_len(c) > pair_total) continue;
        ++report.set_checks;
        std::vector<Trace> set{as_trace(a), as_trace(b), as_trace(c)};
        std::vector<int> set_cls{a, b, c};

        Trace g_got = prod_glb(set);
        Schedule g_want = oracle.canonical(oracle.glb(set_cls));
        if (g_got.canonical() != g_want) mismatch("glb(triple): mismatch");

        std::optional<Trace> l_got = prod_lub(set);
        std::optional<int> l_want = oracle.lub(set_cls);
        if (l_got.has_value() != l_want.has_value())
          mismatch("compatible(triple): mismatch");
        else if (l_got && l_got->canonical() != oracle.canonical(*l_want))
          mismatch("lub(triple): mismatch");
      }
    }
  }

  return report;
}

}  // namespace cfsim
