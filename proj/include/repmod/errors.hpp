#pragma once

#include <stdexcept>
#include <string>

namespace repmod {

/// Requested enumeration would exceed the configured candidate cap.
class EnumerationLimitError : public std::runtime_error {
 public:
  explicit EnumerationLimitError(const std::string& what)
      : std::runtime_error(what) {}
};

/// The requested object cannot exist (a divisibility obstruction failed).
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A numerical verification rejected its input.
class VerificationError : public std::runtime_error {
 public:
  explicit VerificationError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A spectrum straddles the decision tolerance; the result would be a guess.
class IllConditionedError : public std::runtime_error {
 public:
  explicit IllConditionedError(const std::string& what)
      : std::runtime_error(what) {}
};

/// An internal consistency check failed; indicates a bug, not bad input.
class InternalInvariantError : public std::logic_error {
 public:
  explicit InternalInvariantError(const std::string& what)
      : std::logic_error(what) {}
};

}  // namespace repmod
