// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "vrcov/applications.hpp"
#include "vrcov/covariance.hpp"
#include "vrcov/error.hpp"
#include "vrcov/experiments.hpp"
#include "vrcov/geometry.hpp"
#include "vrcov/linalg.hpp"
#include "vrcov/moments.hpp"
#include "vrcov/rng.hpp"
#include "vrcov/statistics.hpp"
#include "vrcov/structured_algebra.hpp"

using namespace vrcov;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

Eigen::MatrixXd to_eigen(const Matrix& a) {
  Eigen::MatrixXd e(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) e(i, j) = a(i, j);
  return e;
}

double max_eigenvalue(const SymMatrix& a) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(to_eigen(a.dense())).eigenvalues().maxCoeff();
}

// Random sorted admissible sequence with distinct (k, alpha) and k <= kmax.
AdmissibleSequence random_sequence(int d, int max_n, int kmax, Engine& rng) {
  std::uniform_int_distribution<int> nd(1, max_n);
  std::uniform_int_distribution<int> kd(0, kmax);
  std::uniform_int_distribution<int> ad(0, 2);
  for (;;) {
    AdmissibleSequence s{d, {}};
    const int n = nd(rng);
    for (int tries = 0; static_cast<int>(s.specs.size()) < n && tries < 100; ++tries) {
      FunctionalSpec f{kd(rng), 0.5 * ad(rng)};
      if (f.k == 0 || f.k > d) f.alpha = 0.0;
      if (std::find(s.specs.begin(), s.specs.end(), f) == s.specs.end()) s.specs.push_back(f);
    }
    std::sort(s.specs.begin(), s.specs.end(), [](const auto& a, const auto& b) {
      return std::pair(a.k, a.alpha) < std::pair(b.k, b.alpha);
    });
    if (validate(s).empty()) return s;
  }
}

// ---------------------------------------------------------------- 1

void moment_oracle(Outcome& out) {
  double worst = 0.0;
  for (int d : {2, 3})
    for (double alpha : {0.0, 1.0, 2.0}) {
      const auto start = Clock::now();
      const auto e = estimate_mu_single(d, 1, alpha, 1'000'000, 2024, workers());
      const double secs = seconds_since(start);
      const double exact = d * unit_ball_volume(d) / (alpha + d);
      // alpha = 0 has a constant integrand: zero variance, exact up to rounding.
      const double diff = std::abs(e.value - exact);
      const double z = e.standard_error > 0.0 ? diff / e.standard_error : 0.0;
      worst = std::max(worst, z);
      std::ostringstream key;
      key << "d=" << d << " alpha=" << alpha;
      out.check(diff <= 3.0 * e.standard_error + 1e-13 * exact, key.str() + " outside 3 SE");
      out.check(secs < 10.0, key.str() + " slower than 10 s");
    }
  out.detail << "max |z| " << worst;
}

// ---------------------------------------------------------------- 2

void check_super(Outcome& out, const SuperCoefficients& c, double& worst_res, double& worst_eig) {
  const auto sigma = c.sigma();
  for (const auto& f : {super_lu(c), super_cholesky(c), super_root(c)}) {
    worst_res = std::max(worst_res, f.residual);
    out.check(f.residual <= 1e-10, to_string(f.kind) + " residual");
  }
  const double schur = relative_residual(super_schur(c).reconstruct(), sigma.dense());
  worst_res = std::max(worst_res, schur);
  out.check(schur <= 1e-10, "Schur reconstruction residual");
  out.check(matrix_invariants(sigma).rank == 1, "numerical rank");
  double expect = 0.0;
  for (double a : c.a) expect += 1.0 / (a * a);
  const double rel = std::abs(max_eigenvalue(sigma) - expect) / expect;
  worst_eig = std::max(worst_eig, rel);
  out.check(rel <= 1e-12, "largest eigenvalue");
}

void supercritical_algebra(Outcome& out) {
  const auto start = Clock::now();
  auto rng = make_engine(5, {});
  std::uniform_int_distribution<int> nd(2, 6);
  std::uniform_real_distribution<double> ad(0.05, 5.0);
  double worst_res = 0.0, worst_eig = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(nd(rng));
    for (double& x : a) x = ad(rng);
    check_super(out, SuperCoefficients::from_values(a), worst_res, worst_eig);
  }
  const AdmissibleSequence example{3, {{1, 1.0}, {2, 1.0}, {3, 1.0}}};
  MomentTable table(3);
  for (const auto& s : example.specs)
    table.insert(MomentKey::single(3, s.k, s.alpha),
                 estimate_mu_single(3, s.k, s.alpha, 200000, 55, workers()));
  check_super(out, SuperCoefficients::from_moments(example, table), worst_res, worst_eig);
  const double secs = seconds_since(start);
  out.check(secs < 5.0, "runtime over 5 s");
  out.detail << "max residual " << worst_res << ", max eigenvalue error " << worst_eig << ", "
             << secs << " s";
}

// ---------------------------------------------------------------- 3

void critical_identity(Outcome& out) {
  const auto start = Clock::now();
  auto rng = make_engine(3, {});
  MomentTable table(3);
  MomentOptions options;
  options.samples = 2000;
  options.seed = 3;
  options.workers = workers();
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_sequence(3, 5, 4, rng);
    ensure_moments(table, s.specs, options);
    const double rel = check_sum_identity(s, table).relative();
    worst = std::max(worst, rel);
    out.check(rel <= 1e-12, "identity discrepancy");
  }
  const double secs = seconds_since(start);
  out.check(secs < 30.0, "runtime over 30 s");
  out.detail << "max discrepancy " << worst << ", " << table.size() << " shared keys, " << secs
             << " s";
}

// ---------------------------------------------------------------- 4

void subcritical_structure(Outcome& out) {
  auto rng = make_engine(4, {});
  MomentTable table(3);
  MomentOptions options;
  options.samples = 4000;
  options.workers = workers();
  double worst_eig = 0.0, worst_inv = 0.0;
  std::size_t distinct = 0, blocks = 0, hankel = 0;

  std::uniform_int_distribution<int> ad(0, 4);
  for (int trial = 0; trial < 20; ++trial) {
    AdmissibleSequence s{3, {}};
    for (int k = 0; k <= 4; ++k)
      if (rng() % 2) s.specs.push_back({k, (k == 0 || k > 3) ? 0.0 : 0.25 * ad(rng)});
    if (s.specs.empty() || !validate(s).empty()) continue;
    ensure_moments(table, s.specs, options);
    const auto sigma = assemble_sigma(s, Regime::sub(), table).sigma;
    const std::size_t n = s.size();
    std::vector<double> expect;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) out.check(sigma(i, j) == 0.0, "off-diagonal entry of a distinct-k matrix");
      const auto& f = s.specs[i];
      expect.push_back(resolve_single(table, f.k, 2.0 * f.alpha).value / factorial(f.k + 1));
    }
    std::sort(expect.begin(), expect.end());
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(to_eigen(sigma.dense())).eigenvalues();
    double product = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double rel = std::abs(ev(i) - expect[i]) / expect[i];
      worst_eig = std::max(worst_eig, rel);
      out.check(rel <= 1e-12, "distinct-k eigenvalue");
      product *= expect[i];
    }
    const double d = to_eigen(sigma.dense()).determinant();
    out.check(std::abs(d - product) <= 1e-12 * std::abs(product), "distinct-k determinant");
    ++distinct;
  }

  // Equal-k blocks are Gram matrices of volume powers and become ill-conditioned
  // as the alphas crowd together. Blocks with Monte Carlo entries are kept short
  // so that estimation noise cannot make them indefinite; k = 1 is exact.
  options.samples = 200000;
  for (int trial = 0; trial < 20; ++trial) {
    AdmissibleSequence s{3, {}};
    for (int k = 1; k <= 3; ++k) {
      const int count = 1 + static_cast<int>(rng() % (k == 1 ? 3 : 2));
      for (int c = 0; c < count; ++c) s.specs.push_back({k, 1.0 * c});
    }
    ensure_moments(table, s.specs, options);
    const auto sigma = assemble_sigma(s, Regime::sub(), table).sigma;
    const Matrix inv = sub_inverse(sub_block_structure(sigma, s));
    const double res = infinity_norm(sigma.dense() * inv - Matrix::identity(s.size()));
    worst_inv = std::max(worst_inv, res);
    out.check(res <= 1e-8, "block inverse residual");
    ++blocks;
  }

  options.samples = 4000;
  for (int k : {1, 2, 3})
    for (double a0 : {0.0, 0.25})
      for (double h : {0.25, 0.5})
        for (int n : {3, 4}) {
          AdmissibleSequence s{3, {}};
          for (int i = 0; i < n; ++i) s.specs.push_back({k, a0 + h * i});
          out.check(is_same_distance_vector(s), "same-distance detection");
          ensure_moments(table, s.specs, options);
          const auto sigma = assemble_sigma(s, Regime::sub(), table).sigma;
          for (std::size_t i = 1; i < s.size(); ++i)
            for (std::size_t j = 0; j + 1 < s.size(); ++j)
              out.check(sigma(i, j) == sigma(i - 1, j + 1), "anti-diagonal constancy");
          ++hankel;
        }
  out.detail << distinct << " distinct-k, " << blocks << " block, " << hankel
             << " same-distance sequences; max eigenvalue error " << worst_eig
             << ", max inverse residual " << worst_inv;
}

// ---------------------------------------------------------------- 5

void critical_bounds(Outcome& out) {
  auto rng = make_engine(6, {});
  MomentTable table(3);
  MomentOptions options;
  options.samples = 4000;
  options.workers = workers();
  std::vector<AdmissibleSequence> sequences{{3, {{1, 1.0}, {2, 1.0}, {3, 1.0}}}};
  while (sequences.size() < 30) sequences.push_back(random_sequence(3, 4, 3, rng));
  std::size_t checked = 0, reports = 0, crashes = 0, within = 0;
  for (const auto& s : sequences) {
    ensure_moments(table, s.specs, options);
    for (int m = 0; m <= s.max_k(); ++m) {
      if (!check_requirement(m, s, table).holds) continue;
      std::vector<FunctionalSpec> active;
      double sum = 0.0;
      for (const auto& f : s.specs) {
        if (f.k < m) continue;
        active.push_back(f);
        const double a = std::sqrt(factorial(m + 1)) * factorial(f.k - m);
        sum += 1.0 / (a * a);
      }
      const double bound = upper_bound_s(s.d, m, active) * sum;
      const auto a = build_a_gt1(m, s, table).value;
      const double scale = std::max({1.0, bound, max_abs(a.dense())});
      out.check(max_eigenvalue(a) <= bound + 1e-10 * scale, "eigenvalue above the bound");
      ++checked;
    }
    for (double c : {0.5, 1.0, 2.0}) {
      try {
        const auto r = conjecture_bound(s, table, c);
        within += r.within_bound;
        ++reports;
      } catch (const Error& e) {
        ++crashes;
        std::printf("  conjecture report raised: %s\n", e.what());
      }
    }
  }
  out.check(crashes == 0, "conjecture reports raised");
  out.detail << checked << " (sequence, m) pairs satisfy the requirement and respect the bound; "
             << reports << " conjecture reports, " << within << " within their bound, "
             << crashes << " crashes";
}

// ---------------------------------------------------------------- 6

void subcritical_variance(Outcome& out) {
  const auto start = Clock::now();
  ExperimentConfig c;
  c.d = 2;
  c.sequence = {{1, 0.0}};
  c.rule.kind = Regime::Kind::Sub;
  c.rule.beta = 0.8;
  c.t_grid = {2000.0};
  c.trials = 5000;
  c.seed = 6;
  c.periodic = true;
  const auto sim = run_trials(c, {workers(), false});
  const double var = sim.intensities[0].accumulator.covariance()(0, 0);
  const double target = std::numbers::pi / 2.0;
  const double rel = std::abs(var - target) / target;
  const double secs = seconds_since(start);
  out.check(rel <= 0.15, "variance off by more than 15%");
  out.check(secs < 120.0, "runtime over 2 min");
  out.detail << "Var " << var << " vs " << target << " (" << 100.0 * rel << "%), " << secs << " s";
}

// ---------------------------------------------------------------- 7

void supercritical_simulation(Outcome& out) {
  const auto start = Clock::now();
  ExperimentConfig c;
  c.d = 2;
  c.sequence = {{1, 0.0}, {1, 1.0}};
  c.rule.kind = Regime::Kind::Super;
  c.rule.beta = 0.25;
  c.t_grid = {1000.0, 3000.0, 10000.0};
  c.trials = 500;
  c.seed = 7;
  const auto sim = run_trials(c, {workers(), true});
  std::vector<SampleSet> sets;
  for (const auto& it : sim.intensities) sets.push_back({it.t, it.delta, *it.raw});
  const double a1 = 1.0 / std::numbers::pi;
  const double a2 = 3.0 / (2.0 * std::numbers::pi);
  const auto series = supercritical_residual(sets, 0, 1, a1, a2);
  const double corr = series.points.back().correlation;
  const double secs = seconds_since(start);
  out.check(corr >= 0.9, "correlation below 0.9");
  out.check(series.trend < 0.0, "residual variance not decreasing");
  out.check(secs < 300.0, "runtime over 5 min");
  out.detail << "corr " << corr << "; Var(D_t)";
  for (const auto& p : series.points) out.detail << " " << p.variance;
  out.detail << " (Spearman " << series.trend << "), " << secs << " s";
}

// ---------------------------------------------------------------- 8

void subcritical_residual_law(Outcome& out) {
  const auto start = Clock::now();
  ExperimentConfig c;
  c.d = 2;
  c.sequence = {{1, 0.0}, {1, 1.0}};
  c.rule.kind = Regime::Kind::Sub;
  c.rule.beta = 0.8;
  c.t_grid = {2000.0};
  c.trials = 5000;
  c.periodic = true;
  MomentTable table(2);
  MomentOptions options;
  options.workers = workers();
  ensure_moments(table, c.sequence, options);
  const auto g = z_coefficients(1, table, 0.0, 1.0);
  const double t = c.t_grid[0];
  const double delta = c.rule.delta(t, c.d);
  std::pair<double, double> centres;
  {
    const auto& s0 = c.sequence[0];
    const auto& s1 = c.sequence[1];
    centres.first = torus_expectation(t, delta, 2, s0, resolve_single(table, 1, s0.alpha).value) /
                    normalization_q(t, delta, s0, 2);
    centres.second = torus_expectation(t, delta, 2, s1, resolve_single(table, 1, s1.alpha).value) /
                     normalization_q(t, delta, s1, 2);
  }
  int passed = 0;
  double worst_var = 0.0, worst_corr = 0.0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    c.seed = seed;
    const auto sim = run_trials(c, {workers(), true});
    const auto& it = sim.intensities[0];
    const auto r = subcritical_residual({it.t, it.delta, *it.raw}, 0, 1, g, centres, std::sqrt(2.0));
    const bool ok = r.statistics[1].pass && r.statistics[2].pass;
    passed += ok;
    worst_var = std::max(worst_var, std::abs(r.point.variance - 1.0));
    worst_corr = std::max(worst_corr, std::abs(r.point.correlation));
  }
  const double secs = seconds_since(start);
  out.check(passed >= 38, "fewer than 95% of seeds inside the bands");
  out.detail << passed << "/40 seeds pass; max |Var(Z)-1| " << worst_var << " (band "
             << std::sqrt(2.0) * 3.0 / std::sqrt(5000.0) << "), max |corr| " << worst_corr
             << " (band " << 3.0 / std::sqrt(5000.0) << "), " << secs << " s";
}

// ---------------------------------------------------------------- 9

void partial_correlation_routes(Outcome& out) {
  auto rng = make_engine(9, {});
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Matrix b(3, 3);
    for (double& x : b.data()) x = u(rng);
    auto s = SymMatrix::from_dense(b * b.transpose(), 1e-12);
    for (std::size_t i = 0; i < 3; ++i) s.add(i, i, 0.01);
    const auto r = partial_correlation(s);
    worst = std::max(worst, std::abs(r.difference));
    out.check(std::abs(r.difference) <= 1e-10, "routes disagree");
  }
  SymMatrix diag(3);
  diag.set(0, 0, 1.5);
  diag.set(1, 1, 0.2);
  diag.set(2, 2, 7.0);
  const auto r = partial_correlation(diag);
  out.check(r.from_inverse == 0.0 && r.from_regression == 0.0, "diagonal matrix not exactly 0");
  out.detail << "max route difference " << worst;
}

// ---------------------------------------------------------------- 10

void enumeration_oracle(Outcome& out) {
  const auto start = Clock::now();
  auto rng = make_engine(10, {});
  std::uniform_int_distribution<int> nd(5, 60);
  std::uniform_int_distribution<int> dd(1, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> rd(0.05, 0.45);
  std::size_t simplices = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Window w{dd(rng), trial % 2 == 1};
    std::vector<double> coords(static_cast<std::size_t>(nd(rng)) * w.dimension);
    for (double& x : coords) x = u(rng);
    const PointCloud cloud(w, coords);
    const double delta = rd(rng);
    const auto fast = enumerate_simplices(build_neighbor_graph(cloud, delta), 3);
    const auto slow = brute_force_simplices(cloud, delta, 3);
    for (int k = 0; k <= 3; ++k) {
      const auto a = fast.flat(k);
      const auto b = slow.flat(k);
      out.check(std::equal(a.begin(), a.end(), b.begin(), b.end()), "simplex sets differ");
      simplices += fast.count(k);
    }
  }
  const double secs = seconds_since(start);
  out.check(secs < 10.0, "runtime over 10 s");
  out.detail << simplices << " simplices matched, " << secs << " s";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"moment oracle", moment_oracle},
      {"supercritical algebra", supercritical_algebra},
      {"critical identity", critical_identity},
      {"subcritical structure", subcritical_structure},
      {"critical bounds", critical_bounds},
      {"subcritical variance", subcritical_variance},
      {"supercritical simulation", supercritical_simulation},
      {"subcritical residual law", subcritical_residual_law},
      {"partial correlation", partial_correlation_routes},
      {"enumeration oracle", enumeration_oracle},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      criteria[i].second(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "exception: " << e.what();
    }
    failures += !out.pass;
    std::printf("%s %2zu %s: %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                out.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
