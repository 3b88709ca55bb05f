#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfsim/trace.hpp"

namespace cfsim {

// Brute-force reference model of the trace algebra over a small operation
// alphabet: enumerates every schedule up to a length bound, groups them into
// equivalence classes by closing under adjacent non-conflicting swaps, and
// answers algebra queries purely from those tables. Shares no algorithm code
// with the production implementation it validates.
class AlphabetOracle {
 public:
  AlphabetOracle(int num_ops, ConflictRelationPtr rel, int max_len);

  int num_classes() const { return static_cast<int>(member_lists_.size()); }
  int max_len() const { return max_len_; }
  const ConflictRelationPtr& relation() const { return rel_; }

  uint32_t pack(const Schedule& s) const;
  Schedule unpack(uint32_t idx) const;

  int cls(const Schedule& s) const { return class_of_[pack(s)]; }
  int cls_len(int c) const { return len_of_class_[c]; }
  // Lexicographically least member.
  Schedule canonical(int c) const { return unpack(member_lists_[c].front()); }
  const std::vector<uint32_t>& members(int c) const { return member_lists_[c]; }

  // All class ids whose schedules have at most `len` letters.
  std::vector<int> classes_up_to(int len) const;

  bool is_prefix(int t, int u) const;
  int residual(int t, int u) const;            // asserts t <= u and uniqueness
  int concat(int a, int b) const;
  int glb(std::span<const int> classes) const; // asserts a unique longest common prefix
  std::optional<int> lub(std::span<const int> classes) const;
  bool compatible(std::span<const int> classes) const { return lub(classes).has_value(); }

 private:
  int num_ops_;
  ConflictRelationPtr rel_;
  int max_len_;
  std::vector<uint32_t> offset_;        // offset_[l] = first index of length-l block
  std::vector<int32_t> class_of_;       // schedule index -> class id
  std::vector<std::vector<uint32_t>> member_lists_;
  std::vector<int> len_of_class_;
  mutable std::vector<std::vector<int8_t>> prefix_memo_;  // -1 unknown, 0 no, 1 yes
};

// Production-side overrides so tests can inject a deliberately broken
// operation and watch the suite report the mismatch.
struct OracleHooks {
  std::function<Schedule(const Schedule&, const ConflictRelation&)> normalize_override;
  std::function<Trace(std::span<const Trace>)> glb_override;
  std::function<std::optional<Trace>(std::span<const Trace>)> lub_override;
};

struct OracleSuiteReport {
  int single_len = 0;
  int pair_total = 0;
  int64_t schedules = 0;
  int64_t classes = 0;
  int64_t unary_checks = 0;
  int64_t pair_checks = 0;
  int64_t set_checks = 0;
  std::vector<std::string> mismatches;  // capped; empty means full agreement
  bool ok() const { return mismatches.empty(); }
};

// Exhaustive agreement check between the production algebra and the oracle
// over the counter alphabet: every schedule up to `single_len` letters for
// the unary operations, every class pair (and triples, capped at 4 letters a
// member) up to `pair_total` letters in total for the binary/set operations.
OracleSuiteReport oracle_suite(int single_len, int pair_total, const OracleHooks& hooks = {});

}  // namespace cfsim
