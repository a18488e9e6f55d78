#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrcov/functionals.hpp"

namespace vrcov {

/// Volume of the d-dimensional unit ball.
double unit_ball_volume(int d);

enum class MomentKind { Single, Cross };

/// Identifies mu_k^(alpha) (Single) or mu_{k1,k2:m}^(alpha1,alpha2) (Cross).
/// Powers are compared after rounding to 1e-9 so that keys built from the
/// same sequence entry always coincide.
struct MomentKey {
  int d = 2;
  MomentKind kind = MomentKind::Single;
  int k1 = 1;
  int k2 = 0;
  int m = 0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;

  static MomentKey single(int d, int k, double alpha);
  /// Cross keys are stored with (k1, alpha1) <= (k2, alpha2); the integral
  /// is symmetric in the two blocks.
  static MomentKey cross(int d, int k1, int k2, int m, double alpha1, double alpha2);

  std::string to_string() const;

  friend std::strong_ordering operator<=>(const MomentKey& a, const MomentKey& b);
  friend bool operator==(const MomentKey& a, const MomentKey& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }
};

enum class MomentMethod { MonteCarlo, ClosedForm };

struct MomentEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  MomentMethod method = MomentMethod::MonteCarlo;
};

/// Persistent map of moment estimates for one dimension d.
class MomentTable {
 public:
  MomentTable() = default;
  explicit MomentTable(int d) : d_(d) {}

  int dimension() const noexcept { return d_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<MomentKey, MomentEstimate>& entries() const noexcept { return entries_; }

  void insert(const MomentKey& key, const MomentEstimate& estimate);
  bool contains(const MomentKey& key) const { return entries_.contains(key); }
  const MomentEstimate* find(const MomentKey& key) const;
  /// Throws MissingMoment when absent.
  const MomentEstimate& at(const MomentKey& key) const;

  std::string to_text() const;
  static MomentTable from_text(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static MomentTable load(const std::filesystem::path& path);

  /// FNV-1a hash of the serialised table, as 16 hex digits.
  std::string hash() const;

 private:
  int d_ = 2;
  std::map<MomentKey, MomentEstimate> entries_;
};

/// Integrability of |x|^alpha-type integrands: alpha > -d + k - 1 for k <= d.
/// For k > d only alpha = 0 (the indicator) is accepted.
bool integrable_power(int d, int k, double alpha) noexcept;

inline constexpr std::uint64_t kMinMomentSamples = 1000;

/// mu_k^(alpha) by Monte Carlo over k uniform points in the unit ball,
/// gated on all pairwise distances (including the origin) being <= 1.
/// Results are identical for every worker count.
MomentEstimate estimate_mu_single(int d, int k, double alpha, std::uint64_t samples,
                                  std::uint64_t seed, unsigned workers = 1);

/// mu_{k1,k2:m}^(alpha1,alpha2) by Monte Carlo; two gated simplices sharing
/// the origin and m-1 further points.
MomentEstimate estimate_mu_cross(int d, int k1, int k2, int m, double alpha1, double alpha2,
                                 std::uint64_t samples, std::uint64_t seed,
                                 unsigned workers = 1);

/// mu_1^(alpha) = kappa_d d / (alpha + d).
double mu_one_closed_form(int d, double alpha);

/// max over pairs (i, j) of (d kappa_d / (min{alpha_i, alpha_j, alpha_i+alpha_j} + d))^(k_i+k_j-m)
double upper_bound_s(int d, int m, std::span<const FunctionalSpec> specs);

/// A moment value as used by the covariance formulas, after the reductions
/// m = 1 (product of single moments), full overlap (single moment of the
/// summed power) and k = 0 (mu_0 = 1).
struct ResolvedMoment {
  double value = 0.0;
  double standard_error = 0.0;
  bool uses_mu_zero = false;
};

ResolvedMoment resolve_single(const MomentTable& table, int k, double alpha);
ResolvedMoment resolve_cross(const MomentTable& table, int k1, int k2, int m, double alpha1,
                             double alpha2);

/// Table keys (after reduction) needed to assemble every regime for `specs`.
std::vector<MomentKey> required_keys(int d, std::span<const FunctionalSpec> specs);

struct MomentOptions {
  std::uint64_t samples = 200'000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  /// Use mu_1^(alpha) in closed form instead of Monte Carlo.
  bool closed_form_k1 = true;
};

/// Adds every missing key from required_keys(); existing entries are kept.
/// Returns the number of keys added.
std::size_t ensure_moments(MomentTable& table, std::span<const FunctionalSpec> specs,
                           const MomentOptions& options);

/// Estimate for one key with its per-key seed derived from options.seed.
MomentEstimate estimate_key(const MomentKey& key, const MomentOptions& options);

}  // namespace vrcov
