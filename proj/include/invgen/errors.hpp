#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace invgen {

/// Malformed input: bad descriptor, non-bijective permutation, element not in a group.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A configured size limit was hit. The message always names the limit.
class CapExceeded : public std::runtime_error {
public:
  CapExceeded(const std::string& what_cap, std::size_t cap)
      : std::runtime_error(what_cap + " cap exceeded (cap = " + std::to_string(cap) + ")"),
        cap_(cap) {}

  std::size_t cap() const { return cap_; }

private:
  std::size_t cap_;
};

/// An operation was called outside its mathematical hypotheses.
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An internal consistency check failed. Indicates a defect, not bad input.
class InvariantBreach : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace invgen
