#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "cfsim/letter.hpp"
#include "cfsim/trace.hpp"

namespace cfsim {

// Candidate entry written to the second snapshot object of a commit-adopt
// instance: a proposed merge plus whether the writer saw its view unchanged
// by the compatibility projection.
struct BEntry {
  Trace trace;
  bool flag = false;
  bool operator==(const BEntry& o) const { return flag == o.flag && trace == o.trace; }
};

// Announcement register cell: a committed trace tagged with its round.
struct CommittedEntry {
  int64_t round = 0;
  Trace trace;
  bool operator==(const CommittedEntry& o) const {
    return round == o.round && trace == o.trace;
  }
};

// One-shot commit-adopt outcome.
struct GcaResult {
  Trace trace;
  bool committed = false;
  bool operator==(const GcaResult& o) const {
    return committed == o.committed && trace == o.trace;
  }
};

// Anything a shared-memory cell can hold; monostate is the unwritten cell.
using CellValue = std::variant<std::monostate, Trace, BEntry, CommittedEntry, Letter>;

inline bool is_bottom(const CellValue& v) { return std::holds_alternative<std::monostate>(v); }

// One atomic shared-memory operation. Registers support read/write; snapshot
// objects support per-cell update and full scan. Each costs one step.
struct Action {
  enum class Kind { reg_read, reg_write, snap_update, snap_scan };
  Kind kind = Kind::reg_read;
  int obj = -1;
  int cell = 0;        // snap_update target
  CellValue value;     // written value for reg_write / snap_update
};

struct ActionResult {
  CellValue value;                  // reg_read
  std::vector<CellValue> view;      // snap_scan
  std::vector<uint64_t> versions;   // per-cell write counts at scan time
};

// The shared store: a flat pool of named registers and snapshot objects.
// perform() is the linearization point of every primitive.
class Memory {
 public:
  int create_register(const std::string& name, CellValue initial);
  int create_snapshot(const std::string& name, int cells);
  int find(const std::string& name) const;  // -1 if absent

  ActionResult perform(const Action& a);

  const std::string& name(int obj) const { return objects_.at(obj).name; }
  bool is_snapshot(int obj) const { return objects_.at(obj).snapshot; }
  int num_objects() const { return static_cast<int>(objects_.size()); }

 private:
  struct Object {
    std::string name;
    bool snapshot = false;
    std::vector<CellValue> cells;
    std::vector<uint64_t> versions;
  };
  std::vector<Object> objects_;
  std::unordered_map<std::string, int> by_name_;
};

}  // namespace cfsim
