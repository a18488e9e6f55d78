#include "vrcov/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vrcov/error.hpp"

namespace vrcov {

std::string to_string(const FunctionalSpec& spec) {
  std::ostringstream os;
  os << "(k=" << spec.k << ", alpha=" << spec.alpha << ")";
  return os.str();
}

namespace {

constexpr double kRoundoffFloor = -1e-10;

/// Determinant of a small matrix by partial-pivoting elimination (destroys a).
double small_det(std::vector<double>& a, int n) {
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[p * n + c])) p = r;
    if (a[p * n + c] == 0.0) return 0.0;
    if (p != c) {
      for (int j = 0; j < n; ++j) std::swap(a[c * n + j], a[p * n + j]);
      det = -det;
    }
    const double piv = a[c * n + c];
    det *= piv;
    for (int r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / piv;
      if (f == 0.0) continue;
      for (int j = c + 1; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
    }
  }
  return det;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

double simplex_volume_from_squared(std::span<const double> squared, int vertex_count) {
  const int k = vertex_count - 1;
  require(k >= 0 && squared.size() == static_cast<std::size_t>(vertex_count * vertex_count),
          ErrorCode::ContractViolation, "squared-distance matrix has the wrong size");
  if (k == 0) return 1.0;
  if (k == 1) return std::sqrt(squared[1]);

  double scale = 0.0;
  for (double v : squared) scale = std::max(scale, v);
  if (scale == 0.0) return 0.0;

  // Cayley-Menger matrix on distances rescaled to max 1; vol^2 scales by scale^k.
  const int m = vertex_count + 1;
  std::vector<double> cm(static_cast<std::size_t>(m * m), 1.0);
  cm[0] = 0.0;
  for (int i = 0; i < vertex_count; ++i)
    for (int j = 0; j < vertex_count; ++j)
      cm[(i + 1) * m + (j + 1)] = squared[i * vertex_count + j] / scale;

  const double sign = (k + 1) % 2 == 0 ? 1.0 : -1.0;
  const double denom = std::ldexp(1.0, k) * factorial(k) * factorial(k);
  const double vol2 = sign * small_det(cm, m) / denom;
  if (vol2 < 0.0) {
    if (vol2 < kRoundoffFloor)
      fail(ErrorCode::NumericalError,
           "Cayley-Menger determinant is negative beyond round-off: " + std::to_string(vol2));
    return 0.0;
  }
  return std::sqrt(vol2) * std::pow(scale, 0.5 * k);
}

double simplex_volume(std::span<const double> vertices, int dim) {
  require(dim >= 1 && vertices.size() % static_cast<std::size_t>(dim) == 0,
          ErrorCode::ContractViolation, "vertex array does not match the dimension");
  const int count = static_cast<int>(vertices.size() / dim);
  const int k = count - 1;
  require(k >= 1 && k <= dim, ErrorCode::ContractViolation,
          "simplex_volume needs 1 <= k <= d; use the indicator for k > d");
  for (double x : vertices)
    require(std::isfinite(x), ErrorCode::ContractViolation, "vertex coordinate is not finite");
  std::vector<double> sq(static_cast<std::size_t>(count * count), 0.0);
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j) {
      const double d2 = squared_distance(vertices.subspan(i * dim, dim),
                                         vertices.subspan(j * dim, dim), false);
      sq[i * count + j] = sq[j * count + i] = d2;
    }
  return simplex_volume_from_squared(sq, count);
}

double gated_volume(std::span<const double> vertices, int dim, double s) {
  require(s > 0.0, ErrorCode::InvalidParameter, "gate length must be positive");
  const int count = static_cast<int>(vertices.size() / dim);
  const double s2 = s * s;
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j)
      if (squared_distance(vertices.subspan(i * dim, dim), vertices.subspan(j * dim, dim),
                           false) > s2)
        return 0.0;
  if (count - 1 > dim) return 1.0;
  if (count == 1) return 1.0;
  return simplex_volume(vertices, dim);
}

namespace {

double power_of(double volume, double alpha) {
  if (alpha == 0.0) return 1.0;
  if (alpha == 1.0) return volume;
  if (alpha == 2.0) return volume * volume;
  return std::pow(volume, alpha);
}

}  // namespace

std::vector<double> evaluate_functionals(const RipsComplex& complex, const PointCloud& cloud,
                                         std::span<const FunctionalSpec> specs) {
  const int d = cloud.dimension();
  std::vector<double> out(specs.size(), 0.0);
  std::vector<double> sq;

  for (std::size_t s = 0; s < specs.size(); ++s) {
    const auto& spec = specs[s];
    require(spec.k >= 0 && spec.k <= complex.cap(), ErrorCode::InvalidParameter,
            "functional dimension " + std::to_string(spec.k) + " exceeds the complex cap");
    require(spec.k <= d || spec.alpha == 0.0, ErrorCode::InvalidParameter,
            "alpha must be 0 for k > d");
  }

  for (int k = 0; k <= complex.cap(); ++k) {
    std::vector<std::size_t> here;
    bool needs_volume = false;
    for (std::size_t s = 0; s < specs.size(); ++s)
      if (specs[s].k == k) {
        here.push_back(s);
        needs_volume = needs_volume || specs[s].alpha != 0.0;
      }
    if (here.empty()) continue;
    const std::size_t count = complex.count(k);
    if (!needs_volume || k == 0) {
      for (std::size_t s : here) out[s] = static_cast<double>(count);
      continue;
    }

    const int vc = k + 1;
    sq.assign(static_cast<std::size_t>(vc * vc), 0.0);
    for (std::size_t i = 0; i < count; ++i) {
      auto simplex = complex.simplex(k, i);
      double vol;
      if (k == 1) {
        vol = std::sqrt(cloud.squared_distance(simplex[0], simplex[1]));
      } else {
        for (int a = 0; a < vc; ++a)
          for (int b = a + 1; b < vc; ++b)
            sq[a * vc + b] = sq[b * vc + a] = cloud.squared_distance(simplex[a], simplex[b]);
        vol = simplex_volume_from_squared(sq, vc);
      }
      for (std::size_t s : here) {
        const double alpha = specs[s].alpha;
        if (alpha < 0.0 && vol == 0.0)
          throw DegenerateSimplex(std::vector<std::uint32_t>(simplex.begin(), simplex.end()),
                                  alpha);
        out[s] += power_of(vol, alpha);
      }
    }
  }
  return out;
}

double volume_power_functional(const RipsComplex& complex, const PointCloud& cloud,
                               const FunctionalSpec& spec) {
  return evaluate_functionals(complex, cloud, std::span<const FunctionalSpec>(&spec, 1))[0];
}

std::vector<std::uint64_t> f_vector(const RipsComplex& complex, int up_to) {
  std::vector<std::uint64_t> f(static_cast<std::size_t>(std::max(up_to + 1, 0)), 0);
  for (int k = 0; k <= up_to; ++k) f[k] = complex.count(k);
  return f;
}

std::int64_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

int h_length(const RipsComplex& complex, int d, HLengthRule rule) {
  const int dim = complex.dimension();
  require(complex.cap() >= d || complex.count(complex.cap()) == 0, ErrorCode::InvalidParameter,
          "h-vector needs a complex enumerated up to dimension d");
  const int truncated = std::min(dim, d);
  return rule == HLengthRule::MinOfDimensionPlusOne ? std::min(d, truncated + 1)
                                                    : std::min(d, truncated) + 1;
}

std::int64_t h_from_f(std::span<const std::uint64_t> f, int k, int l) {
  require(k >= 0 && k <= l, ErrorCode::InvalidParameter,
          "h index " + std::to_string(k) + " outside 0.." + std::to_string(l));
  std::int64_t h = ((k % 2 == 0) ? 1 : -1) * binomial(l, k);
  for (int i = 1; i <= k; ++i) {
    const std::int64_t fi =
        static_cast<std::size_t>(i - 1) < f.size() ? static_cast<std::int64_t>(f[i - 1]) : 0;
    h += (((k - i) % 2 == 0) ? 1 : -1) * binomial(l - i, k - i) * fi;
  }
  return h;
}

std::int64_t h_functional(const RipsComplex& complex, int k, int d, HLengthRule rule) {
  const int l = h_length(complex, d, rule);
  const auto f = f_vector(complex, std::min(complex.cap(), d));
  return h_from_f(f, k, l);
}

std::vector<double> h_coefficients(int k, int l) {
  std::vector<double> b(static_cast<std::size_t>(std::max(k, 0)));
  for (int i = 1; i <= k; ++i)
    b[i - 1] = static_cast<double>((((k - i) % 2 == 0) ? 1 : -1) * binomial(l - i, k - i));
  return b;
}

double normalization_q(double t, double delta, const FunctionalSpec& spec, int d) {
  require(t > 0.0 && delta > 0.0, ErrorCode::InvalidParameter,
          "normalisation needs t > 0 and delta > 0");
  const double density = t * std::pow(delta, d);
  double best = 0.0;
  for (int m = 1; m <= spec.k + 1; ++m)
    best = std::max(best, std::pow(density, spec.k - 0.5 * (m - 1)));
  return std::sqrt(t) * std::pow(delta, spec.alpha * spec.k) * best;
}

}  // namespace vrcov
