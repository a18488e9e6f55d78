#include "vrcov/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vrcov/error.hpp"

namespace vrcov {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, ErrorCode::InvalidParameter, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), ErrorCode::InvalidParameter, "matrix product shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::InvalidParameter,
          "matrix sum shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::InvalidParameter,
          "matrix difference shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (double& v : c.data()) v *= s;
  return c;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), ErrorCode::InvalidParameter, "matrix-vector shape mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

SymMatrix SymMatrix::from_dense(const Matrix& a, double tolerance) {
  require(a.square(), ErrorCode::InvalidParameter, "symmetric matrix must be square");
  const double scale = std::max(max_abs(a), 1.0);
  SymMatrix s(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j) {
      require(std::abs(a(i, j) - a(j, i)) <= tolerance * scale, ErrorCode::InvalidParameter,
              "matrix is not symmetric");
      s.set(i, j, 0.5 * (a(i, j) + a(j, i)));
    }
  return s;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  m_ = m_ + o.m_;
  return *this;
}

SymMatrix operator*(double s, const SymMatrix& a) {
  SymMatrix r = a;
  r.m_ = s * a.m_;
  return r;
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  SymMatrix r = a;
  r.m_ = a.m_ - b.m_;
  return r;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double infinity_norm(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
    m = std::max(m, s);
  }
  return m;
}

double trace(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) s += a(i, i);
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double quadratic_form(const SymMatrix& a, std::span<const double> x) {
  const auto ax = a.dense() * x;
  return dot(ax, x);
}

double relative_residual(const Matrix& a, const Matrix& b) {
  const double nb = frobenius_norm(b);
  const double diff = frobenius_norm(a - b);
  return nb > 0.0 ? diff / nb : diff;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition jacobi_eigen(const SymMatrix& sym, double tolerance, int max_sweeps) {
  const std::size_t n = sym.size();
  Matrix a = sym.dense();
  Matrix v = Matrix::identity(n);
  const double norm = frobenius_norm(a);
  EigenDecomposition out;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off <= tolerance * norm) break;
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150)
          t = 0.5 / theta;
        else
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = a(p, r) = c * arp - s * arq;
          a(r, q) = a(q, r) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
        rotated = true;
      }
    }
    ++out.sweeps;
    if (!rotated) break;
  }
  out.off_diagonal = off_diagonal_norm(a);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, j) = v(r, order[j]);
  }
  return out;
}

Matrix LuDecomposition::reconstruct() const {
  const Matrix prod = lower * upper;
  Matrix a(prod.rows(), prod.cols());
  for (std::size_t i = 0; i < prod.rows(); ++i)
    for (std::size_t j = 0; j < prod.cols(); ++j) a(perm[i], j) = prod(i, j);
  return a;
}

LuDecomposition lu(const Matrix& a) {
  require(a.square(), ErrorCode::InvalidParameter, "LU needs a square matrix");
  const std::size_t n = a.rows();
  Matrix w = a;
  LuDecomposition out;
  out.perm.resize(n);
  std::iota(out.perm.begin(), out.perm.end(), std::size_t{0});

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(w(r, col)) > std::abs(w(pivot, col))) pivot = r;
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(w(col, j), w(pivot, j));
      std::swap(out.perm[col], out.perm[pivot]);
      out.sign = -out.sign;
    }
    const double p = w(col, col);
    if (p == 0.0) {
      out.singular = true;
      continue;
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = w(r, col) / p;
      w(r, col) = f;
      if (f == 0.0) continue;
      for (std::size_t j = col + 1; j < n; ++j) w(r, j) -= f * w(col, j);
    }
  }

  out.lower = Matrix::identity(n);
  out.upper = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (j < i)
        out.lower(i, j) = w(i, j);
      else
        out.upper(i, j) = w(i, j);
    }
  return out;
}

Matrix cholesky(const SymMatrix& a) {
  const std::size_t n = a.size();
  Matrix g(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= g(j, k) * g(j, k);
    if (!(diag > 0.0)) {
      const auto eig = jacobi_eigen(a);
      std::vector<double> witness(n);
      for (std::size_t r = 0; r < n; ++r) witness[r] = eig.vectors(r, 0);
      throw NotPositiveDefinite("matrix is not positive definite (pivot " +
                                    std::to_string(j) + ", min eigenvalue " +
                                    std::to_string(eig.values.front()) + ")",
                                std::move(witness));
    }
    g(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= g(i, k) * g(j, k);
      g(i, j) = s / g(j, j);
    }
  }
  return g;
}

double det(const Matrix& a) {
  const auto f = lu(a);
  if (f.singular) return 0.0;
  double d = f.sign;
  for (std::size_t i = 0; i < a.rows(); ++i) d *= f.upper(i, i);
  return d;
}

Matrix inverse(const Matrix& a, double relative_pivot) {
  const auto f = lu(a);
  const std::size_t n = a.rows();
  const double scale = max_abs(a);
  for (std::size_t i = 0; i < n; ++i)
    if (f.singular || !(std::abs(f.upper(i, i)) > relative_pivot * scale))
      fail(ErrorCode::NearSingular, "matrix is singular to working precision");

  Matrix inv(n, n);
  std::vector<double> y(n);
  for (std::size_t col = 0; col < n; ++col) {
    // Solve L U x = P e_col.
    for (std::size_t i = 0; i < n; ++i) {
      double s = (f.perm[i] == col) ? 1.0 : 0.0;
      for (std::size_t k = 0; k < i; ++k) s -= f.lower(i, k) * y[k];
      y[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = y[i];
      for (std::size_t k = i + 1; k < n; ++k) s -= f.upper(i, k) * inv(k, col);
      inv(i, col) = s / f.upper(i, i);
    }
  }
  return inv;
}

SymMatrix sqrt_psd(const SymMatrix& a) {
  const auto eig = jacobi_eigen(a);
  const std::size_t n = a.size();
  SymMatrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += eig.vectors(i, k) * std::sqrt(std::max(eig.values[k], 0.0)) * eig.vectors(j, k);
      r.set(i, j, s);
    }
  return r;
}

double spectral_norm(const SymMatrix& a) {
  if (a.size() == 0) return 0.0;
  const auto eig = jacobi_eigen(a);
  return std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
}

bool loewner_geq(const SymMatrix& a, const SymMatrix& b, double tolerance) {
  if (a.size() == 0) return true;
  const double scale = std::max(spectral_norm(a), spectral_norm(b));
  const auto eig = jacobi_eigen(a - b);
  return eig.values.front() >= -tolerance * scale;
}

SpectralSummary spectral_summary(const SymMatrix& a, double rank_ratio, double psd_ratio) {
  SpectralSummary s;
  if (a.size() == 0) return s;
  const auto eig = jacobi_eigen(a);
  s.eigenvalues = eig.values;
  s.min_eigenvalue = eig.values.front();
  s.max_eigenvalue = eig.values.back();
  const double top = std::max(std::abs(s.min_eigenvalue), std::abs(s.max_eigenvalue));
  for (double v : eig.values)
    if (std::abs(v) > rank_ratio * top) ++s.rank;
  s.determinant = det(a.dense());
  s.positive_semidefinite = s.min_eigenvalue >= -psd_ratio * top;
  s.positive_definite = s.min_eigenvalue > psd_ratio * top;
  return s;
}

}  // namespace vrcov
