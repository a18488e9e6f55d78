#include "vrcov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vrcov/error.hpp"

namespace vrcov {

void Window::validate() const {
  require(dimension >= 1, ErrorCode::InvalidParameter, "window dimension must be >= 1");
}

PointCloud::PointCloud(Window window, std::vector<double> coords, std::uint64_t seed,
                       std::uint64_t trial)
    : window_(window), coords_(std::move(coords)), seed_(seed), trial_(trial) {
  window_.validate();
  require(coords_.size() % static_cast<std::size_t>(window_.dimension) == 0,
          ErrorCode::InvalidParameter, "coordinate count is not a multiple of the dimension");
  for (double x : coords_)
    require(x >= 0.0 && x <= 1.0, ErrorCode::InvalidParameter,
            "point coordinate outside the unit cube");
}

double squared_distance(std::span<const double> a, std::span<const double> b,
                        bool periodic) noexcept {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    double diff = std::abs(a[c] - b[c]);
    if (periodic && diff > 0.5) diff = 1.0 - diff;
    s += diff * diff;
  }
  return s;
}

double PointCloud::squared_distance(std::size_t i, std::size_t j) const noexcept {
  return vrcov::squared_distance(point(i), point(j), window_.periodic);
}

PointCloud sample_poisson(const Window& window, double intensity, Engine& rng) {
  window.validate();
  require(std::isfinite(intensity) && intensity > 0.0, ErrorCode::InvalidParameter,
          "intensity must be positive and finite");
  std::poisson_distribution<long long> count_dist(intensity);
  const auto n = static_cast<std::size_t>(count_dist(rng));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> coords(n * static_cast<std::size_t>(window.dimension));
  for (double& x : coords) x = unif(rng);
  return PointCloud(window, std::move(coords));
}

PointCloud sample_poisson(const Window& window, double intensity, std::uint64_t seed,
                          std::uint64_t trial) {
  Engine rng = make_engine(seed, {trial});
  PointCloud cloud = sample_poisson(window, intensity, rng);
  return PointCloud(cloud.window(), std::vector<double>(cloud.coords().begin(), cloud.coords().end()),
                    seed, trial);
}

NeighborGraph::NeighborGraph(std::size_t vertices, double delta,
                             std::vector<std::size_t> offsets, std::vector<Index> adjacency)
    : delta_(delta), offsets_(std::move(offsets)), adjacency_(std::move(adjacency)) {
  require(offsets_.size() == vertices + 1, ErrorCode::InvalidParameter,
          "CSR offsets do not match the vertex count");
}

std::span<const Index> NeighborGraph::upper_neighbors(std::size_t v) const noexcept {
  auto row = neighbors(v);
  auto it = std::upper_bound(row.begin(), row.end(), static_cast<Index>(v));
  return row.subspan(static_cast<std::size_t>(it - row.begin()));
}

bool NeighborGraph::has_edge(std::size_t i, std::size_t j) const noexcept {
  if (i >= vertex_count() || j >= vertex_count()) return false;
  auto row = neighbors(i);
  return std::binary_search(row.begin(), row.end(), static_cast<Index>(j));
}

namespace {

std::size_t cells_per_axis(double delta, std::size_t points, int d) {
  // Side length 1/n >= delta keeps every neighbour inside the 3^d stencil.
  const double by_delta = std::floor(1.0 / delta);
  const double by_count = std::floor(std::pow(2.0 * static_cast<double>(points) + 1.0, 1.0 / d));
  const double n = std::max(1.0, std::min({by_delta, by_count, 1048576.0}));
  return static_cast<std::size_t>(n);
}

}  // namespace

NeighborGraph build_neighbor_graph(const PointCloud& cloud, double delta) {
  require(std::isfinite(delta) && delta > 0.0, ErrorCode::InvalidParameter,
          "delta must be positive and finite");
  const bool periodic = cloud.window().periodic;
  require(!periodic || delta < 0.5, ErrorCode::InvalidParameter,
          "periodic windows need delta < 1/2");
  const std::size_t n = cloud.size();
  const int d = cloud.dimension();
  if (n == 0) return NeighborGraph(0, delta, {0}, {});

  const std::size_t side = cells_per_axis(delta, n, d);
  std::size_t cell_total = 1;
  for (int a = 0; a < d; ++a) cell_total *= side;

  std::vector<std::size_t> cell_of(n);
  std::vector<std::size_t> coord(static_cast<std::size_t>(d) * n);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = cloud.point(i);
    std::size_t id = 0, stride = 1;
    for (int a = 0; a < d; ++a) {
      auto c = static_cast<std::size_t>(p[a] * static_cast<double>(side));
      c = std::min(c, side - 1);
      coord[i * d + a] = c;
      id += c * stride;
      stride *= side;
    }
    cell_of[i] = id;
  }

  std::vector<std::size_t> start(cell_total + 1, 0);
  for (std::size_t i = 0; i < n; ++i) ++start[cell_of[i] + 1];
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<Index> members(n);
  {
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (std::size_t i = 0; i < n; ++i) members[fill[cell_of[i]]++] = static_cast<Index>(i);
  }

  std::size_t stencil_size = 1;
  for (int a = 0; a < d; ++a) stencil_size *= 3;

  const double delta2 = delta * delta;
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<Index> adjacency;
  std::vector<std::size_t> cells;
  cells.reserve(stencil_size);
  std::vector<Index> row;

  for (std::size_t i = 0; i < n; ++i) {
    cells.clear();
    for (std::size_t s = 0; s < stencil_size; ++s) {
      std::size_t id = 0, stride = 1, code = s;
      bool inside = true;
      for (int a = 0; a < d; ++a) {
        const long long off = static_cast<long long>(code % 3) - 1;
        code /= 3;
        long long c = static_cast<long long>(coord[i * d + a]) + off;
        const auto m = static_cast<long long>(side);
        if (c < 0 || c >= m) {
          if (!periodic) {
            inside = false;
            break;
          }
          c = (c + m) % m;
        }
        id += static_cast<std::size_t>(c) * stride;
        stride *= side;
      }
      if (inside) cells.push_back(id);
    }
    if (side < 3) {
      std::sort(cells.begin(), cells.end());
      cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    }

    row.clear();
    auto pi = cloud.point(i);
    for (std::size_t id : cells) {
      for (std::size_t q = start[id]; q < start[id + 1]; ++q) {
        const Index j = members[q];
        if (j == i) continue;
        if (squared_distance(pi, cloud.point(j), periodic) <= delta2) row.push_back(j);
      }
    }
    std::sort(row.begin(), row.end());
    adjacency.insert(adjacency.end(), row.begin(), row.end());
    offsets[i + 1] = adjacency.size();
  }
  return NeighborGraph(n, delta, std::move(offsets), std::move(adjacency));
}

RipsComplex::RipsComplex(double delta, int cap)
    : delta_(delta), cap_(cap), simplices_(static_cast<std::size_t>(cap) + 1) {
  require(cap >= 0, ErrorCode::InvalidParameter, "dimension cap must be >= 0");
}

std::size_t RipsComplex::count(int k) const noexcept {
  if (k < 0 || k > cap_) return 0;
  return simplices_[k].size() / static_cast<std::size_t>(k + 1);
}

int RipsComplex::dimension() const noexcept {
  for (int k = cap_; k >= 0; --k)
    if (!simplices_[k].empty()) return k;
  return -1;
}

std::size_t RipsComplex::total() const noexcept {
  std::size_t s = 0;
  for (int k = 0; k <= cap_; ++k) s += count(k);
  return s;
}

void RipsComplex::append(int k, std::span<const Index> sorted_tuple) {
  simplices_[k].insert(simplices_[k].end(), sorted_tuple.begin(), sorted_tuple.end());
}

bool RipsComplex::contains(std::span<const Index> sorted_tuple) const {
  const int k = static_cast<int>(sorted_tuple.size()) - 1;
  if (k < 0 || k > cap_) return false;
  std::size_t lo = 0, hi = count(k);
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    auto s = simplex(k, mid);
    if (std::lexicographical_compare(s.begin(), s.end(), sorted_tuple.begin(),
                                     sorted_tuple.end()))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo == count(k)) return false;
  auto s = simplex(k, lo);
  return std::equal(s.begin(), s.end(), sorted_tuple.begin());
}

RipsComplex enumerate_simplices(const NeighborGraph& graph, int cap, std::size_t budget) {
  RipsComplex out(graph.delta(), cap);
  const std::size_t n = graph.vertex_count();
  std::size_t stored = 0;
  auto store = [&](int k, std::span<const Index> tuple) {
    if (stored >= budget) throw BudgetExceeded(k, budget);
    out.append(k, tuple);
    ++stored;
  };

  std::vector<Index> tuple(static_cast<std::size_t>(cap) + 1);
  // levels[k] holds the common upper neighbours of tuple[0..k].
  std::vector<std::vector<Index>> levels(static_cast<std::size_t>(cap) + 1);

  auto expand = [&](auto&& self, int k) -> void {
    const auto& cand = levels[k];
    for (std::size_t idx = 0; idx < cand.size(); ++idx) {
      const Index w = cand[idx];
      tuple[k + 1] = w;
      store(k + 1, std::span<const Index>(tuple.data(), static_cast<std::size_t>(k + 2)));
      if (k + 1 < cap) {
        auto& next = levels[k + 1];
        next.clear();
        auto up = graph.upper_neighbors(w);
        std::set_intersection(cand.begin() + static_cast<std::ptrdiff_t>(idx) + 1, cand.end(),
                              up.begin(), up.end(), std::back_inserter(next));
        if (!next.empty()) self(self, k + 1);
      }
    }
  };

  for (std::size_t v = 0; v < n; ++v) {
    tuple[0] = static_cast<Index>(v);
    store(0, std::span<const Index>(tuple.data(), 1));
  }
  if (cap == 0) return out;

  // Dimension 0 must be complete before any edge is stored so that each
  // dimension stays lexicographically sorted.
  for (std::size_t v = 0; v < n; ++v) {
    tuple[0] = static_cast<Index>(v);
    auto up = graph.upper_neighbors(v);
    levels[0].assign(up.begin(), up.end());
    if (!levels[0].empty()) expand(expand, 0);
  }
  return out;
}

RipsComplex brute_force_simplices(const PointCloud& cloud, double delta, int cap) {
  const std::size_t n = cloud.size();
  if (n > kBruteForceLimit)
    fail(ErrorCode::OracleRefused, "brute-force enumeration refuses clouds with " +
                                       std::to_string(n) + " > " +
                                       std::to_string(kBruteForceLimit) + " points");
  require(delta > 0.0, ErrorCode::InvalidParameter, "delta must be positive");
  RipsComplex out(delta, cap);
  const double delta2 = delta * delta;

  std::vector<char> close(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      close[i * n + j] = (i != j && cloud.squared_distance(i, j) <= delta2) ? 1 : 0;

  for (int k = 0; k <= cap; ++k) {
    const auto size = static_cast<std::size_t>(k + 1);
    if (size > n) break;
    std::vector<Index> idx(size);
    std::iota(idx.begin(), idx.end(), Index{0});
    for (;;) {
      bool clique = true;
      for (std::size_t a = 0; a < size && clique; ++a)
        for (std::size_t b = a + 1; b < size; ++b)
          if (!close[idx[a] * n + idx[b]]) {
            clique = false;
            break;
          }
      if (clique) out.append(k, idx);

      // next combination in lexicographic order
      std::size_t pos = size;
      while (pos > 0 && idx[pos - 1] == n - size + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t q = pos; q < size; ++q) idx[q] = idx[q - 1] + 1;
    }
  }
  return out;
}

}  // namespace vrcov
