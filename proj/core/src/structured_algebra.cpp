#include "vrcov/structured_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vrcov/error.hpp"

namespace vrcov {

// ---------------------------------------------------------------- supercritical

SuperCoefficients SuperCoefficients::from_values(std::vector<double> a) {
  require(a.size() >= 2, ErrorCode::InvalidParameter, "supercritical algebra needs n >= 2");
  for (double x : a)
    require(std::isfinite(x) && x > 0.0, ErrorCode::InvalidParameter,
            "coefficients a_i must be positive");
  SuperCoefficients c;
  c.a = std::move(a);
  const std::size_t n = c.a.size();
  for (std::size_t k = 0; k < n; ++k) {
    double p = 1.0;
    for (std::size_t l = 0; l < n; ++l)
      if (l != k) p *= c.a[l] * c.a[l];
    c.b += p;
  }
  return c;
}

SuperCoefficients SuperCoefficients::from_moments(const AdmissibleSequence& sequence,
                                                  const MomentTable& table) {
  std::vector<double> a;
  for (const auto& s : sequence.specs)
    a.push_back(factorial(s.k) / resolve_single(table, s.k, s.alpha).value);
  return from_values(std::move(a));
}

SymMatrix SuperCoefficients::sigma() const {
  const std::size_t n = a.size();
  SymMatrix s(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) s.set(i, j, 1.0 / (a[i] * a[j]));
  return s;
}

double SuperCoefficients::product() const {
  return std::accumulate(a.begin(), a.end(), 1.0, std::multiplies<>());
}

SuperEigen super_eigen(const SuperCoefficients& c) {
  const std::size_t n = c.size();
  SuperEigen e;
  e.values.assign(n, 0.0);
  double lambda = 0.0;
  for (double x : c.a) lambda += 1.0 / (x * x);
  e.values[n - 1] = lambda;
  e.vectors = Matrix(n, n);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    e.vectors(0, j) = c.a[0] / c.a[j + 1];
    e.vectors(j + 1, j) = -1.0;
  }
  for (std::size_t i = 0; i < n; ++i) e.vectors(i, n - 1) = c.a[n - 1] / c.a[i];
  return e;
}

double SchurForm::inverse_residual() const {
  return infinity_norm(s * s_inv - Matrix::identity(s.rows()));
}

Matrix SchurForm::reconstruct() const { return s * d * s_inv; }

SchurForm super_schur(const SuperCoefficients& c) {
  const std::size_t n = c.size();
  const auto eig = super_eigen(c);
  SchurForm f;
  f.s = eig.vectors;
  f.d = Matrix::diagonal(eig.values);
  f.s_inv = Matrix(n, n);
  double prod_sq = 1.0;
  for (double x : c.a) prod_sq *= x * x;
  const auto& a = c.a;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == n - 1) {
        f.s_inv(i, j) = prod_sq / (a[j] * a[n - 1] * c.b);
      } else if (j == i + 1) {
        // -sum_{k != i+1} a_{i+1}^2 prod_{l != k, i+1} a_l^2 / b
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == i + 1) continue;
          double p = a[i + 1] * a[i + 1];
          for (std::size_t l = 0; l < n; ++l)
            if (l != k && l != i + 1) p *= a[l] * a[l];
          sum += p;
        }
        f.s_inv(i, j) = -sum / c.b;
      } else {
        f.s_inv(i, j) = prod_sq / (a[i + 1] * a[j] * c.b);
      }
    }
  return f;
}

std::string to_string(FactorKind kind) {
  switch (kind) {
    case FactorKind::LU: return "lu";
    case FactorKind::Cholesky: return "cholesky";
    case FactorKind::Root: return "root";
  }
  return "";
}

namespace {

Factorization make_factorization(FactorKind kind, Matrix first, Matrix second,
                                 const Matrix& target) {
  Factorization f;
  f.kind = kind;
  f.first = std::move(first);
  f.second = std::move(second);
  f.residual = relative_residual(f.first * f.second, target);
  return f;
}

}  // namespace

Factorization super_lu(const SuperCoefficients& c) {
  const std::size_t n = c.size();
  Matrix l = Matrix::identity(n);
  Matrix u(n, n);
  for (std::size_t i = 1; i < n; ++i) l(i, 0) = c.a[0] / c.a[i];
  for (std::size_t j = 0; j < n; ++j) u(0, j) = 1.0 / (c.a[0] * c.a[j]);
  return make_factorization(FactorKind::LU, std::move(l), std::move(u), c.sigma().dense());
}

Factorization super_cholesky(const SuperCoefficients& c) {
  const std::size_t n = c.size();
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) g(i, 0) = 1.0 / c.a[i];
  Matrix gt = g.transpose();
  return make_factorization(FactorKind::Cholesky, std::move(g), std::move(gt),
                            c.sigma().dense());
}

Factorization super_root(const SuperCoefficients& c) {
  const std::size_t n = c.size();
  const double prod = c.product();
  const double root_b = std::sqrt(c.b);
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = prod / (c.a[i] * c.a[j] * root_b);
  Matrix b2 = b;
  return make_factorization(FactorKind::Root, std::move(b), std::move(b2), c.sigma().dense());
}

InvariantReport matrix_invariants(const SymMatrix& sigma) {
  const auto s = spectral_summary(sigma);
  InvariantReport r;
  r.rank = s.rank;
  r.determinant = s.determinant;
  r.min_eigenvalue = s.min_eigenvalue;
  r.max_eigenvalue = s.max_eigenvalue;
  r.trace = trace(sigma.dense());
  r.positive_semidefinite = s.positive_semidefinite;
  r.positive_definite = s.positive_definite;
  return r;
}

// ---------------------------------------------------------------- subcritical

bool is_hankel(const SymMatrix& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i + 1 < n && j > 0 && a(i, j) != a(i + 1, j - 1)) return false;
  return true;
}

bool is_same_distance_vector(const AdmissibleSequence& sequence) {
  const auto& s = sequence.specs;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j + 1 < s.size() && s[j + 1].k == s[i].k) ++j;
    for (std::size_t r = i + 2; r <= j; ++r)
      if (std::abs((s[r].alpha - s[r - 1].alpha) - (s[i + 1].alpha - s[i].alpha)) > 1e-12)
        return false;
    i = j + 1;
  }
  return true;
}

BlockStructure sub_block_structure(const SymMatrix& sigma, const AdmissibleSequence& sequence) {
  const std::size_t n = sigma.size();
  require(n == sequence.size(), ErrorCode::ContractViolation,
          "covariance size does not match the sequence");
  BlockStructure out;
  out.n = n;
  std::vector<std::size_t> run(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && sequence.specs[j + 1].k == sequence.specs[i].k) ++j;
    Block b;
    b.start = i;
    b.length = j - i + 1;
    b.k = sequence.specs[i].k;
    b.matrix = SymMatrix(b.length);
    for (std::size_t r = 0; r < b.length; ++r)
      for (std::size_t c = r; c < b.length; ++c) b.matrix.set(r, c, sigma(i + r, i + c));
    for (std::size_t r = i; r <= j; ++r) run[r] = out.blocks.size();
    out.blocks.push_back(std::move(b));
    i = j + 1;
  }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (run[r] != run[c] && sigma(r, c) != 0.0)
        fail(ErrorCode::StructureViolation, "entry (" + std::to_string(r) + "," +
                                                std::to_string(c) +
                                                ") lies outside the diagonal blocks but is non-zero");
  for (auto& b : out.blocks) {
    if (b.length == 1) {
      b.min_eigenvalue = b.matrix(0, 0);
    } else {
      b.min_eigenvalue = jacobi_eigen(b.matrix).values.front();
    }
    b.positive_definite = b.min_eigenvalue > 0.0;
    b.hankel = is_hankel(b.matrix);
  }
  return out;
}

Matrix sub_inverse(const BlockStructure& blocks) {
  Matrix inv(blocks.n, blocks.n);
  for (const auto& b : blocks.blocks) {
    const auto& m = b.matrix;
    Matrix h;
    if (b.length == 1) {
      if (!(m(0, 0) > 0.0)) fail(ErrorCode::NearSingular, "1x1 block is not positive");
      h = Matrix{{1.0 / m(0, 0)}};
    } else {
      const auto eig = jacobi_eigen(m);
      const double top = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
      if (!(eig.values.front() > 1e-12 * top))
        fail(ErrorCode::NearSingular,
             "block starting at " + std::to_string(b.start) + " is numerically singular");
      if (b.length == 2) {
        const double det2 = m(0, 0) * m(1, 1) - m(0, 1) * m(0, 1);
        h = Matrix{{m(1, 1) / det2, -m(0, 1) / det2}, {-m(0, 1) / det2, m(0, 0) / det2}};
      } else {
        h = inverse(m.dense());
      }
    }
    for (std::size_t r = 0; r < b.length; ++r)
      for (std::size_t c = 0; c < b.length; ++c) inv(b.start + r, b.start + c) = h(r, c);
  }
  return inv;
}

BlockEigen sub_eigen(const BlockStructure& blocks) {
  BlockEigen out;
  for (const auto& b : blocks.blocks) {
    std::vector<double> v;
    if (b.length == 1) {
      v.push_back(b.matrix(0, 0));
      out.determinant *= b.matrix(0, 0);
    } else {
      v = jacobi_eigen(b.matrix).values;
      out.determinant *= b.length == 2 ? b.matrix(0, 0) * b.matrix(1, 1) -
                                             b.matrix(0, 1) * b.matrix(0, 1)
                                       : det(b.matrix.dense());
    }
    out.values.insert(out.values.end(), v.begin(), v.end());
    out.per_block.push_back(std::move(v));
  }
  std::sort(out.values.begin(), out.values.end());
  return out;
}

Matrix same_k_cholesky(int k, double mu11, double mu12, double mu22) {
  const double f = factorial(k + 1);
  const double gap = mu22 * mu11 - mu12 * mu12;
  require(mu11 > 0.0 && gap > 0.0, ErrorCode::NotPositiveDefinite,
          "equal-k 2x2 covariance is not positive definite");
  return Matrix{{std::sqrt(mu11 / f), 0.0},
                {mu12 / std::sqrt(f * mu11), std::sqrt(gap / (f * mu11))}};
}

Matrix same_k_cholesky_inverse(int k, double mu11, double mu12, double mu22) {
  const double f = factorial(k + 1);
  const double gap = mu22 * mu11 - mu12 * mu12;
  require(mu11 > 0.0 && gap > 0.0, ErrorCode::NotPositiveDefinite,
          "equal-k 2x2 covariance is not positive definite");
  return Matrix{{std::sqrt(f) / std::sqrt(mu11), 0.0},
                {-std::sqrt(f) * mu12 / std::sqrt(mu11 * gap), std::sqrt(f * mu11) / std::sqrt(gap)}};
}

SubDecompositions sub_decompositions(const SymMatrix& sigma, const AdmissibleSequence& sequence) {
  const std::size_t n = sigma.size();
  require(n == sequence.size(), ErrorCode::ContractViolation,
          "covariance size does not match the sequence");
  SubDecompositions out;
  const Matrix& target = sigma.dense();
  out.distinct_k = true;
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (sequence.specs[i].k == sequence.specs[i + 1].k) out.distinct_k = false;

  if (out.distinct_k) {
    std::vector<double> root(n);
    for (std::size_t i = 0; i < n; ++i) root[i] = std::sqrt(sigma(i, i));
    const Matrix g = Matrix::diagonal(root);
    out.cholesky = make_factorization(FactorKind::Cholesky, g, g, target);
    out.lu = make_factorization(FactorKind::LU, Matrix::identity(n), target, target);
    out.root = make_factorization(FactorKind::Root, g, g, target);
    return out;
  }

  if (n == 2) {
    const int k = sequence.specs[0].k;
    const double f = factorial(k + 1);
    const double mu11 = sigma(0, 0) * f;
    const double mu12 = sigma(0, 1) * f;
    const double mu22 = sigma(1, 1) * f;
    const Matrix g = same_k_cholesky(k, mu11, mu12, mu22);
    out.cholesky = make_factorization(FactorKind::Cholesky, g, g.transpose(), target);
    out.cholesky_inverse = same_k_cholesky_inverse(k, mu11, mu12, mu22);
  } else {
    const Matrix g = cholesky(sigma);
    out.cholesky = make_factorization(FactorKind::Cholesky, g, g.transpose(), target);
  }
  const auto lud = lu(target);
  Matrix pt(n, n);
  for (std::size_t i = 0; i < n; ++i) pt(lud.perm[i], i) = 1.0;
  out.lu = make_factorization(FactorKind::LU, pt * lud.lower, lud.upper, target);
  const Matrix r = sqrt_psd(sigma).dense();
  out.root = make_factorization(FactorKind::Root, r, r, target);
  return out;
}

// ---------------------------------------------------------------- critical

CriticalBlocks critical_blocks(int m, const AdmissibleSequence& sequence,
                               const MomentTable& table) {
  require(m >= 0 && m <= sequence.max_k(), ErrorCode::InvalidParameter,
          "critical blocks need 0 <= m <= k_n");
  const std::size_t n = sequence.size();
  CriticalBlocks out;
  out.m = m;
  out.a_gt1 = build_a_gt1(m, sequence, table).value;
  out.d = SymMatrix(n);
  out.e = SymMatrix(n);
  std::vector<FunctionalSpec> active_specs;
  std::vector<double> a_full(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int k = sequence.specs[i].k;
    if (k < m) continue;
    out.active.push_back(i);
    a_full[i] = std::sqrt(factorial(m + 1)) * factorial(k - m);
    out.a.push_back(a_full[i]);
    active_specs.push_back(sequence.specs[i]);
  }
  for (std::size_t x = 0; x < out.active.size(); ++x) {
    const std::size_t i = out.active[x];
    out.d_sum += 1.0 / (a_full[i] * a_full[i]);
    for (std::size_t y = x; y < out.active.size(); ++y) {
      const std::size_t j = out.active[y];
      out.d.set(i, j, 1.0 / (a_full[i] * a_full[j]));
    }
  }
  out.s_bound = active_specs.empty() ? 0.0 : upper_bound_s(sequence.d, m, active_specs);
  for (std::size_t i = 0; i < n; ++i) out.e.set(i, i, out.s_bound);
  return out;
}

namespace {

constexpr double kPsdTolerance = 1e-10;

}  // namespace

RequirementCheck check_requirement(const CriticalBlocks& blocks) {
  RequirementCheck r;
  r.m = blocks.m;
  const std::size_t n = blocks.a_gt1.size();
  const SymMatrix bound = blocks.s_bound * blocks.d;
  const SymMatrix diff = bound - blocks.a_gt1;
  const auto ea = jacobi_eigen(blocks.a_gt1);
  const auto ed = jacobi_eigen(diff);
  r.a_min_eigenvalue = ea.values.front();
  r.difference_min_eigenvalue = ed.values.front();
  r.scale = std::max({std::abs(ea.values.front()), std::abs(ea.values.back()),
                      blocks.s_bound * blocks.d_sum});
  const double tol = kPsdTolerance * (r.scale > 0.0 ? r.scale : 1.0);
  r.a_psd = r.a_min_eigenvalue >= -tol;
  r.difference_psd = r.difference_min_eigenvalue >= -tol;
  r.holds = r.a_psd && r.difference_psd;
  if (!r.a_psd) {
    r.witness.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.witness[i] = ea.vectors(i, 0);
  } else if (!r.difference_psd) {
    r.witness.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.witness[i] = ed.vectors(i, 0);
  }

  const auto& act = blocks.active;
  if (act.size() == 1 || act.size() == 2) {
    r.scalar_checked = true;
    const double s = blocks.s_bound;
    auto mu = [&](std::size_t x, std::size_t y) {
      return blocks.a_gt1(act[x], act[y]) * blocks.a[x] * blocks.a[y];
    };
    if (act.size() == 1) {
      r.scalar_condition = s - mu(0, 0) >= 0.0;
    } else {
      const double g11 = s - mu(0, 0);
      const double g22 = s - mu(1, 1);
      const double g12 = s - mu(0, 1);
      r.scalar_condition = g11 >= 0.0 && g22 >= 0.0 && g11 * g22 >= g12 * g12;
    }
    const bool in_band = std::abs(r.difference_min_eigenvalue) <= tol;
    r.scalar_agrees = in_band || r.scalar_condition == r.difference_psd;
  }
  return r;
}

RequirementCheck check_requirement(int m, const AdmissibleSequence& sequence,
                                   const MomentTable& table) {
  return check_requirement(critical_blocks(m, sequence, table));
}

TheoremBound theorem_bound(const CriticalBlocks& blocks, const RequirementCheck& requirement) {
  TheoremBound t;
  t.m = blocks.m;
  t.applicable = requirement.holds;
  t.bound = blocks.s_bound * blocks.d_sum;
  t.max_eigenvalue = jacobi_eigen(blocks.a_gt1).values.back();
  const double scale = requirement.scale > 0.0 ? requirement.scale : 1.0;
  t.holds = t.max_eigenvalue <= t.bound + kPsdTolerance * scale;
  return t;
}

ConjectureReport conjecture_bound(const AdmissibleSequence& sequence, const MomentTable& table,
                                  std::optional<double> c) {
  ConjectureReport r;
  r.applicable = true;
  double best = 0.0;
  for (int m = 0; m <= sequence.max_k(); ++m) {
    const auto blocks = critical_blocks(m, sequence, table);
    auto req = check_requirement(blocks);
    r.applicable = r.applicable && req.holds;
    best = std::max(best, blocks.s_bound * blocks.d_sum);
    r.requirements.push_back(std::move(req));
  }
  r.bound = (sequence.max_k() + 1) * best;
  if (c) {
    r.c = *c;
    const auto model = assemble_sigma(sequence, Regime::critical(*c), table);
    r.eigenvalues = jacobi_eigen(model.sigma).values;
    r.within_bound = r.eigenvalues.back() <= r.bound * (1.0 + kPsdTolerance);
  }
  return r;
}

}  // namespace vrcov
