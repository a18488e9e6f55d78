#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace vrcov {

/// Dense row-major matrix for the small (n <= 16) systems used here.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Matrix transpose() const;

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  friend Matrix operator*(double s, const Matrix& a);
  friend bool operator==(const Matrix& a, const Matrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// Square matrix whose writes go through set(), which mirrors the entry, so
/// symmetry holds exactly.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n, double fill = 0.0) : m_(n, n, fill) {}

  /// Averages a and a^T; the input must be symmetric to `tolerance`.
  static SymMatrix from_dense(const Matrix& a, double tolerance = 1e-12);

  std::size_t size() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
  void set(std::size_t i, std::size_t j, double v) noexcept {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  void add(std::size_t i, std::size_t j, double v) noexcept { set(i, j, m_(i, j) + v); }

  const Matrix& dense() const noexcept { return m_; }

  SymMatrix& operator+=(const SymMatrix& o);
  friend SymMatrix operator*(double s, const SymMatrix& a);
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);

 private:
  Matrix m_;
};

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
/// max_i sum_j |a_ij|
double infinity_norm(const Matrix& a);
double trace(const Matrix& a);
double dot(std::span<const double> a, std::span<const double> b);
double quadratic_form(const SymMatrix& a, std::span<const double> x);

/// ||a - b||_F / ||b||_F (absolute when b is zero).
double relative_residual(const Matrix& a, const Matrix& b);

struct EigenDecomposition {
  std::vector<double> values;  ///< ascending
  Matrix vectors;              ///< column j pairs with values[j]
  int sweeps = 0;
  double off_diagonal = 0.0;   ///< Frobenius norm of the final off-diagonal part
};

/// Cyclic Jacobi rotations until the off-diagonal norm drops to
/// `tolerance * ||A||_F`.
EigenDecomposition jacobi_eigen(const SymMatrix& a, double tolerance = 1e-13,
                                int max_sweeps = 100);

struct LuDecomposition {
  Matrix lower;                    ///< unit lower triangular
  Matrix upper;
  std::vector<std::size_t> perm;   ///< row i of P*A is row perm[i] of A
  int sign = 1;
  bool singular = false;

  /// P^T L U, which reconstructs A.
  Matrix reconstruct() const;
};

/// Partial-pivoting LU. Zero pivots are recorded (singular = true), not thrown.
LuDecomposition lu(const Matrix& a);

/// Lower-triangular G with G G^T = A. Throws NotPositiveDefinite with a
/// witness eigenvector when a pivot is not positive.
Matrix cholesky(const SymMatrix& a);

double det(const Matrix& a);

/// LU-based inverse; throws NearSingular when a pivot falls below
/// `relative_pivot * max|a_ij|`.
Matrix inverse(const Matrix& a, double relative_pivot = 1e-14);

/// V diag(sqrt(max(lambda, 0))) V^T
SymMatrix sqrt_psd(const SymMatrix& a);

double spectral_norm(const SymMatrix& a);

/// A >= B in the Loewner order, i.e. lambda_min(A - B) >= -tolerance * scale.
bool loewner_geq(const SymMatrix& a, const SymMatrix& b, double tolerance = 1e-10);

struct SpectralSummary {
  int rank = 0;
  double determinant = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool positive_semidefinite = false;
  bool positive_definite = false;
  std::vector<double> eigenvalues;
};

/// Numerical rank uses |lambda_i| > rank_ratio * max|lambda|. PSD means
/// lambda_min >= -psd_ratio * max|lambda|.
SpectralSummary spectral_summary(const SymMatrix& a, double rank_ratio = 1e-10,
                                 double psd_ratio = 1e-10);

}  // namespace vrcov
