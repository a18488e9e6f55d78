#include "vrcov/error.hpp"

#include <sstream>

namespace vrcov {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::ContractViolation: return "contract-violation";
    case ErrorCode::BudgetExceeded: return "budget-exceeded";
    case ErrorCode::OracleRefused: return "oracle-refused";
    case ErrorCode::DegenerateSimplex: return "degenerate-simplex";
    case ErrorCode::NumericalError: return "numerical-error";
    case ErrorCode::MissingMoment: return "missing-moment";
    case ErrorCode::NearSingular: return "near-singular";
    case ErrorCode::NotPositiveDefinite: return "not-positive-definite";
    case ErrorCode::StructureViolation: return "structure-violation";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

namespace {

std::string budget_message(int dimension, std::size_t budget) {
  std::ostringstream os;
  os << "simplex budget of " << budget << " exceeded while enumerating dimension "
     << dimension;
  return os.str();
}

std::string degenerate_message(const std::vector<std::uint32_t>& simplex, double alpha) {
  std::ostringstream os;
  os << "power " << alpha << " of a zero-volume simplex {";
  for (std::size_t i = 0; i < simplex.size(); ++i) os << (i ? "," : "") << simplex[i];
  os << "} is infinite";
  return os.str();
}

}  // namespace

BudgetExceeded::BudgetExceeded(int dimension, std::size_t budget)
    : Error(ErrorCode::BudgetExceeded, budget_message(dimension, budget)),
      dimension_(dimension),
      budget_(budget) {}

DegenerateSimplex::DegenerateSimplex(std::vector<std::uint32_t> simplex, double alpha)
    : Error(ErrorCode::DegenerateSimplex, degenerate_message(simplex, alpha)),
      simplex_(std::move(simplex)) {}

void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace vrcov
