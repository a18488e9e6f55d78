#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vrcov/linalg.hpp"

namespace vrcov {

/// Streaming mean and second central moment (Welford, Chan merge).
struct RunningMoments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept;
  void merge(const RunningMoments& other) noexcept;

  /// Unbiased sample variance; 0 when count < 2.
  double variance() const noexcept;
  double standard_error() const noexcept;
};

/// Mergeable sufficient statistics for the covariance of n-vectors: count,
/// running mean, and the matrix of centred cross-products.
class EmpiricalCovariance {
 public:
  EmpiricalCovariance() = default;
  explicit EmpiricalCovariance(std::size_t n);

  std::size_t dimension() const noexcept { return mean_.size(); }
  std::uint64_t count() const noexcept { return count_; }

  void add(std::span<const double> x);
  void merge(const EmpiricalCovariance& other);

  const std::vector<double>& means() const noexcept { return mean_; }

  /// Unbiased covariance. Throws InsufficientData when count < 2.
  SymMatrix covariance() const;
  SymMatrix correlation() const;

  /// Normal-theory standard error of each covariance entry,
  /// sqrt((s_ii s_jj + s_ij^2) / (N - 1)), evaluated at `reference`.
  SymMatrix covariance_standard_errors(const SymMatrix& reference) const;

 private:
  std::uint64_t count_ = 0;
  std::vector<double> mean_;
  Matrix comoment_;
};

double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of mid-ranks.
double spearman(std::span<const double> x, std::span<const double> y);

std::vector<double> mid_ranks(std::span<const double> x);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace vrcov
