#pragma once

#include <stdexcept>
#include <string>

namespace dagdepth {

// Exit-code contract shared with the CLI:
//   1 domain / spec errors, 2 budget / capacity errors, 3 underpowered statistics.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

// Distribution specification rejected (invalid parameters, unbounded density
// where a bounded one is required, negative lattice support, ...).
class SpecError : public Error {
public:
  using Error::Error;
};

// Statistic of an empty range requested.
class EmptyError : public Error {
public:
  using Error::Error;
};

// Ancestor walk ran past the root.
class RootError : public Error {
public:
  using Error::Error;
};

// Root finder proved there is no root in its admissible bracket.
class NoRootError : public Error {
public:
  using Error::Error;
};

// Work or table size would exceed an enumeration budget.
class BudgetError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

// Requested allocation exceeds the configured memory budget.
class CapacityError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

// Too few hits to support the requested estimate. Carries the raw counts
// (serialized TailEstimate) so callers still see what was measured.
class UnderpoweredError : public Error {
public:
  explicit UnderpoweredError(const std::string& what, std::string payload_json = "")
      : Error(what), payload_json_(std::move(payload_json)) {}
  int exit_code() const noexcept override { return 3; }
  const std::string& payload_json() const noexcept { return payload_json_; }

private:
  std::string payload_json_;
};

}  // namespace dagdepth
