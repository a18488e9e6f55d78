#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrcov/covariance.hpp"
#include "vrcov/linalg.hpp"
#include "vrcov/moments.hpp"

namespace vrcov {

enum class BoundSource { ExactEigenvalues, RegimeBound, ConjectureTagged };

std::string to_string(BoundSource source);

struct VarianceBounds {
  std::vector<double> b;
  double lower = 0.0;
  double upper = 0.0;
  double eigen_lower = 0.0;  ///< lower eigenvalue bound used
  double eigen_upper = 0.0;  ///< upper eigenvalue bound used
  BoundSource source = BoundSource::ExactEigenvalues;
  bool applicable = true;
  /// b^t Sigma b when a matrix was available.
  std::optional<double> variance;
  /// Literal lower bound as printed for the subcritical h-functional.
  std::optional<double> literal_lower;
};

double squared_norm(std::span<const double> b);

/// Rayleigh bounds from the exact extreme eigenvalues of sigma.
VarianceBounds variance_bounds(std::span<const double> b, const SymMatrix& sigma);

/// Bounds from given eigenvalue bounds.
VarianceBounds variance_bounds(std::span<const double> b, double eigen_lower, double eigen_upper,
                               BoundSource source);

/// The sequence (0,0), (1,0), ..., (k-1,0) whose linear combination with
/// h_coefficients(k, l) is H_k up to a constant.
AdmissibleSequence h_sequence(int k, int d);

/// Variance bounds for H_k from the regime's eigenvalue information. For
/// the critical regime the bound is tagged inapplicable when the
/// Requirement fails for some m.
VarianceBounds h_variance_bounds(int k, int l, const Regime& regime, const MomentTable& table);

struct PartialCorrelation {
  double from_inverse = 0.0;     ///< -s12 / sqrt(s11 s22)
  double from_regression = 0.0;  ///< correlation of the regression residuals on the third entry
  double difference = 0.0;
  bool agree = false;            ///< |difference| <= 1e-10
};

/// Throws NearSingular when min eigenvalue <= 1e-12 max eigenvalue.
PartialCorrelation partial_correlation(const SymMatrix& sigma3);

/// Per-trial normalised vectors at one intensity.
struct SampleSet {
  double t = 0.0;
  double delta = 0.0;
  Matrix values;  ///< trials x n
};

struct ResidualPoint {
  double t = 0.0;
  std::size_t trials = 0;
  double mean = 0.0;
  double variance = 0.0;
  double correlation = 0.0;  ///< of the two functionals (super) or of Z with the first (sub)
};

enum class ResidualKind { Supercritical, Subcritical };

struct ResidualSeries {
  ResidualKind kind = ResidualKind::Supercritical;
  std::vector<ResidualPoint> points;
  double trend = 0.0;  ///< Spearman correlation of variance against t
};

/// D_t = a_1 V_1 - a_2 V_2 over the trials of each sample set.
ResidualSeries supercritical_residual(std::span<const SampleSet> samples, std::size_t first,
                                      std::size_t second, double a1, double a2);

struct ZCoefficients {
  double g21 = 0.0;
  double g22 = 0.0;
};

/// Second row of the explicit inverse Cholesky factor for (k, alpha1), (k, alpha2).
ZCoefficients z_coefficients(int k, const MomentTable& table, double alpha1, double alpha2);

struct ZStatistic {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ZReport {
  ResidualPoint point;
  std::vector<ZStatistic> statistics;  ///< mean, variance, |correlation|
  std::vector<double> z;
};

/// Z = g21 (V_1 - c_1) + g22 (V_2 - c_2) per trial, with centres from
/// `centres` or the sample means. Bands: mean +-3/sqrt(N), variance
/// 1 +- variance_band_factor*3/sqrt(N), |corr| <= 3/sqrt(N).
ZReport subcritical_residual(const SampleSet& samples, std::size_t first, std::size_t second,
                             const ZCoefficients& g,
                             std::optional<std::pair<double, double>> centres = std::nullopt,
                             double variance_band_factor = 1.0);

/// E V_k^(alpha) on the flat torus, t^{k+1} delta^{k(alpha+d)} mu / (k+1)!.
double torus_expectation(double t, double delta, int d, const FunctionalSpec& spec, double mu);

struct OrderReport {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log variance against log t; needs >= 4 points.
OrderReport residual_order_report(const ResidualSeries& series);

}  // namespace vrcov
