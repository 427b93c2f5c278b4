#pragma once

#include <stdexcept>
#include <string>

namespace entromet {

// Malformed or unsatisfiable scenario input (bad config field, unknown
// state, invalid reference pair, ...). CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A query asked about a composite the model cannot decide (not in the
// universe and not analytically decidable).
class QueryError : public std::runtime_error {
 public:
  explicit QueryError(const std::string& what) : std::runtime_error(what) {}
};

// An operation was called outside its contract (unclosed model, B1/B2
// precondition failure, generic part in an analytic query, ...).
class ContractError : public std::runtime_error {
 public:
  explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

// A configured resource budget (universe size, brute-force cap) would be
// exceeded. Never silently truncated.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace entromet
