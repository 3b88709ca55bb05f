#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace cfsim {

// State and response payload for sequential objects. monostate doubles as
// "no value" (e.g., the response of an update that only acknowledges).
using Value = std::variant<std::monostate, int64_t, std::string, std::vector<int64_t>>;

inline std::string to_string(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "()"; }
    std::string operator()(int64_t x) const { return std::to_string(x); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(const std::vector<int64_t>& xs) const {
      std::string out = "[";
      for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(xs[i]);
      }
      return out + "]";
    }
  };
  return std::visit(Visitor{}, v);
}

struct ValueHash {
  size_t operator()(const Value& v) const {
    struct Visitor {
      size_t operator()(std::monostate) const { return 0x51ed270b; }
      size_t operator()(int64_t x) const { return std::hash<int64_t>{}(x); }
      size_t operator()(const std::string& s) const { return std::hash<std::string>{}(s); }
      size_t operator()(const std::vector<int64_t>& xs) const {
        size_t h = 1469598103934665603ULL;
        for (int64_t x : xs) h = (h ^ std::hash<int64_t>{}(x)) * 1099511628211ULL;
        return h;
      }
    };
    return std::visit(Visitor{}, v) * 31 + v.index();
  }
};

}  // namespace cfsim
