#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vrcov/covariance.hpp"
#include "vrcov/linalg.hpp"
#include "vrcov/moments.hpp"

namespace vrcov {

// ---------------------------------------------------------------- supercritical

/// a_i = k_i! / mu_{k_i}^(alpha_i), b = sum_k prod_{l != k} a_l^2.
struct SuperCoefficients {
  std::vector<double> a;
  double b = 0.0;

  static SuperCoefficients from_values(std::vector<double> a);
  static SuperCoefficients from_moments(const AdmissibleSequence& sequence,
                                        const MomentTable& table);

  std::size_t size() const noexcept { return a.size(); }
  /// Sigma_ij = 1/(a_i a_j).
  SymMatrix sigma() const;
  double product() const;
};

struct SuperEigen {
  std::vector<double> values;  ///< n-1 zeros, then sum 1/a_i^2
  Matrix vectors;              ///< columns v_1..v_n
};

SuperEigen super_eigen(const SuperCoefficients& c);

struct SchurForm {
  Matrix s;
  Matrix d;
  Matrix s_inv;

  double inverse_residual() const;  ///< ||S S^-1 - I||_inf
  Matrix reconstruct() const;       ///< S D S^-1
};

SchurForm super_schur(const SuperCoefficients& c);

enum class FactorKind { LU, Cholesky, Root };

struct Factorization {
  FactorKind kind = FactorKind::LU;
  Matrix first;   ///< L, G or B
  Matrix second;  ///< U, G^t or B
  double residual = 0.0;  ///< relative Frobenius distance of first*second to the target

  Matrix reconstruct() const { return first * second; }
};

std::string to_string(FactorKind kind);

Factorization super_lu(const SuperCoefficients& c);
Factorization super_cholesky(const SuperCoefficients& c);
Factorization super_root(const SuperCoefficients& c);

struct InvariantReport {
  int rank = 0;
  double determinant = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double trace = 0.0;
  bool positive_semidefinite = false;
  bool positive_definite = false;
};

InvariantReport matrix_invariants(const SymMatrix& sigma);

// ---------------------------------------------------------------- subcritical

struct Block {
  std::size_t start = 0;
  std::size_t length = 0;
  int k = 0;
  SymMatrix matrix;
  double min_eigenvalue = 0.0;
  bool positive_definite = false;
  bool hankel = false;
};

struct BlockStructure {
  std::vector<Block> blocks;
  std::size_t n = 0;
};

/// Runs of equal k; throws StructureViolation when an entry outside the
/// diagonal blocks is non-zero.
BlockStructure sub_block_structure(const SymMatrix& sigma, const AdmissibleSequence& sequence);

/// Constant anti-diagonals, compared exactly.
bool is_hankel(const SymMatrix& a);

/// Alphas within every run of equal k form an arithmetic progression, so
/// that the blocks are Hankel.
bool is_same_distance_vector(const AdmissibleSequence& sequence);

/// Block-diagonal inverse; 1x1 and 2x2 blocks use the reciprocal and
/// adjugate formulas, larger blocks LU. Throws NearSingular for a block
/// with min eigenvalue <= 1e-12 max eigenvalue.
Matrix sub_inverse(const BlockStructure& blocks);

struct BlockEigen {
  std::vector<double> values;  ///< ascending over the whole matrix
  std::vector<std::vector<double>> per_block;
  double determinant = 1.0;
};

/// Jacobi per block; 1x1 blocks contribute their entry directly.
BlockEigen sub_eigen(const BlockStructure& blocks);

struct SubDecompositions {
  Factorization cholesky;
  Factorization lu;
  Factorization root;
  /// Explicit G^{-1} for two equal-k entries; empty otherwise.
  std::optional<Matrix> cholesky_inverse;
  bool distinct_k = false;
};

SubDecompositions sub_decompositions(const SymMatrix& sigma, const AdmissibleSequence& sequence);

/// Explicit Cholesky factor of the 2x2 equal-k covariance from mu_k^(2a1),
/// mu_k^(a1+a2), mu_k^(2a2).
Matrix same_k_cholesky(int k, double mu11, double mu12, double mu22);
Matrix same_k_cholesky_inverse(int k, double mu11, double mu12, double mu22);

// ---------------------------------------------------------------- critical

struct CriticalBlocks {
  int m = 0;
  std::vector<std::size_t> active;  ///< indices with k_i >= m
  std::vector<double> a;            ///< a_{i,m} = sqrt((m+1)!) (k_i-m)! on active indices
  SymMatrix a_gt1;
  SymMatrix d;
  SymMatrix e;
  double s_bound = 0.0;
  double d_sum = 0.0;  ///< sum over active i of 1/a_{i,m}^2
};

CriticalBlocks critical_blocks(int m, const AdmissibleSequence& sequence, const MomentTable& table);

struct RequirementCheck {
  int m = 0;
  bool holds = false;
  bool a_psd = false;
  bool difference_psd = false;
  double a_min_eigenvalue = 0.0;
  double difference_min_eigenvalue = 0.0;
  std::vector<double> witness;  ///< eigenvector of the violating eigenvalue
  bool scalar_checked = false;  ///< 1x1 or 2x2 active block
  bool scalar_condition = false;
  bool scalar_agrees = true;
  double scale = 0.0;
};

RequirementCheck check_requirement(const CriticalBlocks& blocks);
RequirementCheck check_requirement(int m, const AdmissibleSequence& sequence,
                                   const MomentTable& table);

struct TheoremBound {
  int m = 0;
  bool applicable = false;
  double bound = 0.0;
  double max_eigenvalue = 0.0;
  bool holds = false;
};

/// Upper eigenvalue bound S_m sum 1/a_{i,m}^2 for A_m^{>1}, checked when the
/// Requirement holds.
TheoremBound theorem_bound(const CriticalBlocks& blocks, const RequirementCheck& requirement);

struct ConjectureReport {
  bool applicable = false;  ///< Requirement holds for every m
  double bound = 0.0;       ///< (k_n+1) max_m S_m sum_i 1/a_{i,m}^2
  double c = 0.0;
  std::vector<double> eigenvalues;
  bool within_bound = false;
  std::vector<RequirementCheck> requirements;
};

ConjectureReport conjecture_bound(const AdmissibleSequence& sequence, const MomentTable& table,
                                  std::optional<double> c = std::nullopt);

}  // namespace vrcov
