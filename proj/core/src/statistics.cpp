#include "vrcov/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vrcov/error.hpp"

namespace vrcov {

void RunningMoments::add(double x) noexcept {
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
}

void RunningMoments::merge(const RunningMoments& other) noexcept {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count);
  const double nb = static_cast<double>(other.count);
  const double n = na + nb;
  const double delta = other.mean - mean;
  mean += delta * nb / n;
  m2 += other.m2 + delta * delta * na * nb / n;
  count += other.count;
}

double RunningMoments::variance() const noexcept {
  return count < 2 ? 0.0 : m2 / static_cast<double>(count - 1);
}

double RunningMoments::standard_error() const noexcept {
  return count < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(count));
}

EmpiricalCovariance::EmpiricalCovariance(std::size_t n) : mean_(n, 0.0), comoment_(n, n) {}

void EmpiricalCovariance::add(std::span<const double> x) {
  require(x.size() == mean_.size(), ErrorCode::ContractViolation,
          "observation length does not match the accumulator");
  ++count_;
  const double inv = 1.0 / static_cast<double>(count_);
  const std::size_t n = mean_.size();
  std::vector<double> before(n);
  for (std::size_t i = 0; i < n; ++i) {
    before[i] = x[i] - mean_[i];
    mean_[i] += before[i] * inv;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double after_i = x[i] - mean_[i];
    for (std::size_t j = 0; j < n; ++j) comoment_(i, j) += after_i * before[j];
  }
}

void EmpiricalCovariance::merge(const EmpiricalCovariance& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  require(other.mean_.size() == mean_.size(), ErrorCode::ContractViolation,
          "cannot merge accumulators of different dimension");
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const std::size_t dim = mean_.size();
  std::vector<double> delta(dim);
  for (std::size_t i = 0; i < dim; ++i) delta[i] = other.mean_[i] - mean_[i];
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      comoment_(i, j) += other.comoment_(i, j) + delta[i] * delta[j] * na * nb / n;
  for (std::size_t i = 0; i < dim; ++i) mean_[i] += delta[i] * nb / n;
  count_ += other.count_;
}

SymMatrix EmpiricalCovariance::covariance() const {
  if (count_ < 2)
    fail(ErrorCode::InsufficientData,
         "covariance needs at least 2 trials, have " + std::to_string(count_));
  const std::size_t n = mean_.size();
  SymMatrix c(n);
  const double denom = static_cast<double>(count_ - 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      c.set(i, j, 0.5 * (comoment_(i, j) + comoment_(j, i)) / denom);
  return c;
}

SymMatrix EmpiricalCovariance::correlation() const {
  const SymMatrix c = covariance();
  const std::size_t n = c.size();
  SymMatrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double s = std::sqrt(c(i, i) * c(j, j));
      r.set(i, j, s > 0.0 ? c(i, j) / s : 0.0);
    }
  return r;
}

SymMatrix EmpiricalCovariance::covariance_standard_errors(const SymMatrix& reference) const {
  if (count_ < 2) fail(ErrorCode::InsufficientData, "standard errors need at least 2 trials");
  const std::size_t n = mean_.size();
  require(reference.size() == n, ErrorCode::ContractViolation,
          "reference matrix has the wrong size");
  SymMatrix se(n);
  const double denom = static_cast<double>(count_ - 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = reference(i, i) * reference(j, j) + reference(i, j) * reference(i, j);
      se.set(i, j, std::sqrt(std::max(v, 0.0) / denom));
    }
  return se;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::InsufficientData,
          "correlation needs two equally long series of length >= 2");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> mid_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = mid_ranks(x);
  const auto ry = mid_ranks(y);
  return pearson(rx, ry);
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::InsufficientData,
          "least squares needs at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorCode::InsufficientData, "least squares needs distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace vrcov
