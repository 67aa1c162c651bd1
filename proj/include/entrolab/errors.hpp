#pragma once

#include <stdexcept>
#include <string>

namespace entrolab {

/// Root of the library's exception hierarchy. `kind()` is the stable tag
/// used in structured error reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "dimension_mismatch"; }
};

class ParentMismatch : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parent_mismatch"; }
};

class NotWellDefined : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "not_well_defined"; }
};

class NotInvariant : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "not_invariant"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_argument"; }
};

class Unsupported : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unsupported"; }
};

/// A set enumeration grew past the configured element cap.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::size_t budget, std::size_t reached_n)
      : Error("set-size budget of " + std::to_string(budget) + " exceeded at n = " +
              std::to_string(reached_n)),
        budget_(budget),
        reached_n_(reached_n) {}
  const char* kind() const noexcept override { return "budget_exceeded"; }
  std::size_t budget() const noexcept { return budget_; }
  std::size_t reached_n() const noexcept { return reached_n_; }

 private:
  std::size_t budget_;
  std::size_t reached_n_;
};

/// Root refinement did not certify within the precision ceiling.
class PrecisionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "precision_exhausted"; }
};

}  // namespace entrolab
