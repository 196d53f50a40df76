#pragma once

#include <stdexcept>
#include <string>

namespace hier {

// Violated precondition on an operation's inputs (reward out of [0,1], bad constant, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed instance or run configuration. `key()` names the offending field when known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::string key = {})
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Internal bookkeeping went inconsistent; indicates a bug, never bad input.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw ContractError(msg);
}

inline void require_index(std::size_t idx, std::size_t bound, const char* what) {
  if (idx >= bound) {
    throw std::out_of_range(std::string(what) + " index " + std::to_string(idx) +
                            " out of range [0, " + std::to_string(bound) + ")");
  }
}

}  // namespace hier
