#pragma once

#include <stdexcept>
#include <string>

namespace qoco {

// Thrown when an experiment config file is missing, malformed, or
// semantically invalid. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Runtime failures of a correctly configured run (domain violations,
// memory-guard breaches, dimension mismatches). CLI exit code 3.
class RuntimeFault : public std::runtime_error {
 public:
  explicit RuntimeFault(const std::string& what) : std::runtime_error(what) {}
};

// An oracle was queried outside its declared domain. Signals a schedule
// bug, not a user error.
class DomainViolation : public RuntimeFault {
 public:
  explicit DomainViolation(const std::string& what) : RuntimeFault(what) {}
};

// The statevector would exceed the configured amplitude limit.
class MemoryGuardError : public RuntimeFault {
 public:
  MemoryGuardError(const std::string& what, int computed_b)
      : RuntimeFault(what), computed_b(computed_b) {}
  int computed_b;
};

class DimensionMismatch : public RuntimeFault {
 public:
  explicit DimensionMismatch(const std::string& what) : RuntimeFault(what) {}
};

}  // namespace qoco
