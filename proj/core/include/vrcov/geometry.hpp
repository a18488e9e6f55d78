#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vrcov/rng.hpp"

namespace vrcov {

using Index = std::uint32_t;

/// The unit cube [0,1]^d. Volume is 1 for every d. With `periodic` set,
/// distances use the minimum-image convention of the flat torus.
struct Window {
  int dimension = 2;
  bool periodic = false;

  void validate() const;
};

/// A realisation of a homogeneous Poisson process on a Window, stored
/// row-major (point i occupies coords[i*d .. i*d+d)).
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(Window window, std::vector<double> coords, std::uint64_t seed = 0,
             std::uint64_t trial = 0);

  const Window& window() const noexcept { return window_; }
  int dimension() const noexcept { return window_.dimension; }
  std::size_t size() const noexcept { return coords_.size() / window_.dimension; }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> point(std::size_t i) const noexcept {
    return {coords_.data() + i * window_.dimension,
            static_cast<std::size_t>(window_.dimension)};
  }
  std::span<const double> coords() const noexcept { return coords_; }

  /// Euclidean (or minimum-image) squared distance between points i and j.
  double squared_distance(std::size_t i, std::size_t j) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t trial() const noexcept { return trial_; }

 private:
  Window window_;
  std::vector<double> coords_;
  std::uint64_t seed_ = 0;
  std::uint64_t trial_ = 0;
};

double squared_distance(std::span<const double> a, std::span<const double> b,
                        bool periodic) noexcept;

/// N ~ Poisson(t), then N i.i.d. uniform points in the window.
PointCloud sample_poisson(const Window& window, double intensity, Engine& rng);

/// Deterministic variant: the stream is keyed by (seed, trial).
PointCloud sample_poisson(const Window& window, double intensity, std::uint64_t seed,
                          std::uint64_t trial);

/// Threshold graph: i ~ j iff i != j and |p_i - p_j| <= delta. Adjacency is
/// stored in CSR form with each row sorted ascending.
class NeighborGraph {
 public:
  NeighborGraph() = default;
  NeighborGraph(std::size_t vertices, double delta, std::vector<std::size_t> offsets,
                std::vector<Index> adjacency);

  std::size_t vertex_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return adjacency_.size() / 2; }
  double delta() const noexcept { return delta_; }

  std::span<const Index> neighbors(std::size_t v) const noexcept {
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  /// Neighbours of v with index greater than v.
  std::span<const Index> upper_neighbors(std::size_t v) const noexcept;

  bool has_edge(std::size_t i, std::size_t j) const noexcept;

 private:
  double delta_ = 0.0;
  std::vector<std::size_t> offsets_{0};
  std::vector<Index> adjacency_;
};

/// Uniform-grid construction: cells have side >= delta and each point scans
/// the 3^d surrounding cells. Comparisons are on squared distances.
NeighborGraph build_neighbor_graph(const PointCloud& cloud, double delta);

/// All simplices of the Vietoris-Rips complex up to a dimension cap. Dimension
/// k holds sorted (k+1)-tuples, flattened, in lexicographic order.
class RipsComplex {
 public:
  RipsComplex() = default;
  RipsComplex(double delta, int cap);

  double delta() const noexcept { return delta_; }
  int cap() const noexcept { return cap_; }

  std::size_t count(int k) const noexcept;
  std::span<const Index> simplex(int k, std::size_t i) const noexcept {
    const auto width = static_cast<std::size_t>(k + 1);
    return {simplices_[k].data() + i * width, width};
  }
  std::span<const Index> flat(int k) const noexcept { return simplices_[k]; }

  /// Largest k <= cap with at least one simplex; -1 for the empty complex.
  int dimension() const noexcept;

  bool contains(std::span<const Index> sorted_tuple) const;

  void append(int k, std::span<const Index> sorted_tuple);
  std::size_t total() const noexcept;

 private:
  double delta_ = 0.0;
  int cap_ = 0;
  std::vector<std::vector<Index>> simplices_;
};

inline constexpr std::size_t kDefaultSimplexBudget = 50'000'000;

/// Clique expansion: each k-simplex is extended by common neighbours with a
/// larger index. Throws BudgetExceeded when more than `budget` simplices
/// would be stored.
RipsComplex enumerate_simplices(const NeighborGraph& graph, int cap,
                                std::size_t budget = kDefaultSimplexBudget);

/// Test oracle: checks every (k+1)-subset directly. Refuses clouds with more
/// than 200 points.
RipsComplex brute_force_simplices(const PointCloud& cloud, double delta, int cap);

inline constexpr std::size_t kBruteForceLimit = 200;

}  // namespace vrcov
