#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vrcov {

enum class ErrorCode {
  InvalidParameter,
  ContractViolation,
  BudgetExceeded,
  OracleRefused,
  DegenerateSimplex,
  NumericalError,
  MissingMoment,
  NearSingular,
  NotPositiveDefinite,
  StructureViolation,
  InsufficientData,
  Config,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Simplex enumeration stopped because the configured simplex budget ran out.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(int dimension, std::size_t budget);

  /// Highest dimension at which simplices had been stored when the budget ran out.
  int dimension() const noexcept { return dimension_; }
  std::size_t budget() const noexcept { return budget_; }

 private:
  int dimension_;
  std::size_t budget_;
};

/// A negative power was requested on a simplex of zero volume.
class DegenerateSimplex : public Error {
 public:
  DegenerateSimplex(std::vector<std::uint32_t> simplex, double alpha);

  const std::vector<std::uint32_t>& simplex() const noexcept { return simplex_; }

 private:
  std::vector<std::uint32_t> simplex_;
};

/// Cholesky failed; carries a vector x with x^T A x <= 0.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(const std::string& what, std::vector<double> witness)
      : Error(ErrorCode::NotPositiveDefinite, what), witness_(std::move(witness)) {}

  const std::vector<double>& witness() const noexcept { return witness_; }

 private:
  std::vector<double> witness_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace vrcov
