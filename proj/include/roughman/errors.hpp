#pragma once

#include <stdexcept>
#include <string>

namespace roughman {

/// Raised when a caller breaks an operation's precondition (shape mismatch,
/// off-manifold point, non-antisymmetric area, ...).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Malformed or inconsistent user configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

}  // namespace roughman
