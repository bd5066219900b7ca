#pragma once

#include <stdexcept>
#include <string>

namespace k2 {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed documents, violated preconditions. CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A fuel, stage or probe budget ran out. CLI exit code 3.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// A finitely presented stream was read past the point where it is defined.
class HorizonError : public Error {
 public:
  using Error::Error;
};

/// An internal construction invariant failed; carries a diagnostic dump.
class InvariantError : public Error {
 public:
  InvariantError(const std::string& what, std::string dump) : Error(what), dump_(std::move(dump)) {}
  const std::string& dump() const { return dump_; }

 private:
  std::string dump_;
};

}  // namespace k2
