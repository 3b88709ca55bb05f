#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "cfsim/errors.hpp"

namespace cfsim {

// One alphabet symbol. A bare object operation has process == 0; a command —
// an operation tagged with the invoking process and a per-process sequence
// number — has process >= 1. The member order (process, seq, op) defines the
// total order used for canonicalization; it carries no semantics.
struct Letter {
  int32_t process = 0;
  int64_t seq = 0;
  int32_t op = 0;

  static Letter op_only(int32_t op) { return Letter{0, 0, op}; }
  static Letter command(int32_t op, int32_t process, int64_t seq) {
    return Letter{process, seq, op};
  }
  bool is_command() const { return process != 0; }

  friend auto operator<=>(const Letter&, const Letter&) = default;
};

// A plain finite sequence of letters; the raw, order-sensitive object that
// traces are quotients of.
using Schedule = std::vector<Letter>;

// Symmetric (possibly reflexive) relation over operation ids. Two letters
// conflict iff their operation ids do; commands inherit the conflicts of the
// operation they carry.
class ConflictRelation {
 public:
  explicit ConflictRelation(int num_ops) : n_(num_ops), m_(num_ops * num_ops, false) {
    if (num_ops < 0) throw UsageError("ConflictRelation: negative operation count");
  }

  void add(int a, int b) {
    check(a), check(b);
    m_[a * n_ + b] = m_[b * n_ + a] = true;
  }

  bool conflicts(int a, int b) const {
    check(a), check(b);
    return m_[a * n_ + b];
  }
  bool conflicts(const Letter& a, const Letter& b) const { return conflicts(a.op, b.op); }

  int num_ops() const { return n_; }

  bool operator==(const ConflictRelation& o) const = default;

  // Every conflicting op pair (a <= b), for reports.
  std::vector<std::pair<int, int>> pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < n_; ++a)
      for (int b = a; b < n_; ++b)
        if (m_[a * n_ + b]) out.emplace_back(a, b);
    return out;
  }

 private:
  void check(int x) const {
    if (x < 0 || x >= n_) throw UsageError("ConflictRelation: operation id out of range");
  }

  int n_;
  std::vector<bool> m_;
};

using ConflictRelationPtr = std::shared_ptr<const ConflictRelation>;

struct LetterHash {
  size_t operator()(const Letter& l) const {
    uint64_t h = static_cast<uint64_t>(l.process) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<uint64_t>(l.seq) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= static_cast<uint64_t>(l.op) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return static_cast<size_t>(h);
  }
};

struct ScheduleHash {
  size_t operator()(const Schedule& s) const {
    size_t h = 1469598103934665603ULL;
    LetterHash lh;
    for (const Letter& l : s) h = (h ^ lh(l)) * 1099511628211ULL;
    return h;
  }
};

}  // namespace cfsim
