#pragma once

#include <stdexcept>
#include <string>

namespace fermimap {

// Malformed input: files, flags, inconsistent headers. CLI exit code 2.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A constraint set admits no states, or an allowed value lies outside the
// operator's spectrum. CLI exit code 3.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical invariant failed beyond its pinned tolerance. CLI exit code 4.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fermimap
