#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vrcov/geometry.hpp"

namespace vrcov {

/// One entry (k, alpha) of a functional vector: V_k^(alpha) sums the alpha-th
/// power of the k-volume over all k-simplices.
struct FunctionalSpec {
  int k = 1;
  double alpha = 0.0;

  friend bool operator==(const FunctionalSpec&, const FunctionalSpec&) = default;
};

std::string to_string(const FunctionalSpec& spec);

/// k-dimensional volume of the simplex spanned by the k+1 rows of `vertices`
/// (row-major, `dim` columns), via the Cayley-Menger determinant.
/// Requires 1 <= k <= dim.
double simplex_volume(std::span<const double> vertices, int dim);

/// Same, from the full (k+1)x(k+1) matrix of squared pairwise distances.
double simplex_volume_from_squared(std::span<const double> squared, int vertex_count);

/// Volume gated on every pairwise distance being <= s. For k > dim the
/// result is the indicator of that event.
double gated_volume(std::span<const double> vertices, int dim, double s);

/// V_k^(alpha) on a complex; 0^0 = 1, so alpha = 0 counts simplices.
/// Throws DegenerateSimplex for alpha < 0 on a zero-volume simplex.
double volume_power_functional(const RipsComplex& complex, const PointCloud& cloud,
                               const FunctionalSpec& spec);

/// Raw values for several specs in one pass per dimension.
std::vector<double> evaluate_functionals(const RipsComplex& complex, const PointCloud& cloud,
                                         std::span<const FunctionalSpec> specs);

std::vector<std::uint64_t> f_vector(const RipsComplex& complex, int up_to);

/// Exact binomial coefficient; zero when k < 0, k > n or n < 0.
std::int64_t binomial(int n, int k);

enum class HLengthRule {
  MinOfDimensionPlusOne,  ///< l = min(d, dim R + 1)
  MinThenPlusOne,         ///< l = min(d, dim R) + 1
};

/// The length l entering H_k. Needs complex.cap() >= d so that dim R is
/// known wherever it matters.
int h_length(const RipsComplex& complex, int d, HLengthRule rule = HLengthRule::MinOfDimensionPlusOne);

/// H_k = (-1)^k C(l,k) + sum_{i=1..k} (-1)^(k-i) C(l-i, k-i) f_{i-1}
std::int64_t h_from_f(std::span<const std::uint64_t> f, int k, int l);

std::int64_t h_functional(const RipsComplex& complex, int k, int d,
                          HLengthRule rule = HLengthRule::MinOfDimensionPlusOne);

/// Coefficients b_i = (-1)^(k-i) C(l-i, k-i), i = 1..k, of f_{i-1} in H_k.
std::vector<double> h_coefficients(int k, int l);

/// Q = sqrt(t) delta^(alpha k) max_{1<=m<=k+1} (t delta^d)^(k-(m-1)/2)
double normalization_q(double t, double delta, const FunctionalSpec& spec, int d);

}  // namespace vrcov
