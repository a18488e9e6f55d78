#pragma once

#include <string>
#include <vector>

#include "vrcov/functionals.hpp"
#include "vrcov/linalg.hpp"
#include "vrcov/moments.hpp"

namespace vrcov {

inline constexpr std::size_t kMaxSequenceLength = 16;

/// Ordered (k_i, alpha_i) pairs in dimension d.
struct AdmissibleSequence {
  int d = 2;
  std::vector<FunctionalSpec> specs;

  std::size_t size() const noexcept { return specs.size(); }
  int max_k() const noexcept;
};

struct Violation {
  int condition = 0;  ///< 1..4 for the admissibility conditions, 0 for shape errors
  std::vector<std::size_t> indices;
  std::string message;
};

/// Every violated admissibility condition; empty when the sequence is valid.
std::vector<Violation> validate(const AdmissibleSequence& sequence);

/// Throws InvalidParameter listing all violations.
void require_admissible(const AdmissibleSequence& sequence);

struct Regime {
  enum class Kind { Sub, Critical, Super };
  enum class Branch { Low, High };

  Kind kind = Kind::Sub;
  double c = 1.0;
  Branch branch = Branch::Low;

  static Regime sub() { return {Kind::Sub, 1.0, Branch::Low}; }
  static Regime super() { return {Kind::Super, 1.0, Branch::High}; }
  /// Canonical branch: Low for c <= 1, High for c > 1.
  static Regime critical(double c);
  static Regime critical(double c, Branch branch);

  void validate() const;
  std::string to_string() const;
};

/// A matrix of moment combinations with propagated standard errors.
struct MomentMatrix {
  SymMatrix value;
  SymMatrix standard_error;
  bool uses_mu_zero = false;
};

/// A_m^{>1}[l,j] = mu_{k_l,k_j:m+1} 1(m <= min k) / ((m+1)! (k_l-m)! (k_j-m)!)
MomentMatrix build_a_gt1(int m, const AdmissibleSequence& sequence, const MomentTable& table);

/// A_m^{<1}[l,j] = mu_{k_l,k_j:o} / (o! ((m-k_l+k_j)/2)! ((m+k_l-k_j)/2)!) with
/// o = (k_l+k_j-m+2)/2, where m - |k_l-k_j| is even and in [0, 2 min k].
MomentMatrix build_a_lt1(int m, const AdmissibleSequence& sequence, const MomentTable& table);

struct CovarianceModel {
  AdmissibleSequence sequence;
  Regime regime;
  SymMatrix sigma;
  SymMatrix standard_error;
  std::string table_hash;
  bool uses_mu_zero = false;

  std::string to_text() const;
};

CovarianceModel assemble_sigma(const AdmissibleSequence& sequence, const Regime& regime,
                               const MomentTable& table);

/// sum_{m=0}^{2 k_n} A_m^{<1} c^{m/2}, available for every c > 0.
MomentMatrix critical_low_sum(const AdmissibleSequence& sequence, const MomentTable& table,
                              double c);
/// sum_{m=0}^{k_n} A_m^{>1} c^{-m}, available for every c > 0.
MomentMatrix critical_high_sum(const AdmissibleSequence& sequence, const MomentTable& table,
                               double c);

struct IdentityCheck {
  double max_abs_difference = 0.0;
  double max_abs_entry = 0.0;
  double relative() const noexcept {
    return max_abs_entry > 0.0 ? max_abs_difference / max_abs_entry : max_abs_difference;
  }
};

/// Compares the two regime sums at c = 1 on one table.
IdentityCheck check_sum_identity(const AdmissibleSequence& sequence, const MomentTable& table);

/// Exact n! as a double (exact for n <= 20, correctly rounded beyond).
double factorial(int n);

std::string format_matrix(const Matrix& a);

}  // namespace vrcov
