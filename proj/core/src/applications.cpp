#include "vrcov/applications.hpp"

#include <algorithm>
#include <cmath>

#include "vrcov/error.hpp"
#include "vrcov/functionals.hpp"
#include "vrcov/statistics.hpp"
#include "vrcov/structured_algebra.hpp"

namespace vrcov {

std::string to_string(BoundSource source) {
  switch (source) {
    case BoundSource::ExactEigenvalues: return "exact-eigenvalues";
    case BoundSource::RegimeBound: return "regime-bound";
    case BoundSource::ConjectureTagged: return "conjecture";
  }
  return "";
}

double squared_norm(std::span<const double> b) { return dot(b, b); }

VarianceBounds variance_bounds(std::span<const double> b, const SymMatrix& sigma) {
  require(b.size() == sigma.size(), ErrorCode::InvalidParameter,
          "coefficient vector length does not match the covariance");
  const auto eig = jacobi_eigen(sigma);
  auto out = variance_bounds(b, eig.values.front(), eig.values.back(),
                             BoundSource::ExactEigenvalues);
  out.variance = quadratic_form(sigma, b);
  return out;
}

VarianceBounds variance_bounds(std::span<const double> b, double eigen_lower, double eigen_upper,
                               BoundSource source) {
  require(eigen_lower <= eigen_upper, ErrorCode::InvalidParameter,
          "lower eigenvalue bound exceeds the upper one");
  VarianceBounds out;
  out.b.assign(b.begin(), b.end());
  const double nb = squared_norm(b);
  out.eigen_lower = eigen_lower;
  out.eigen_upper = eigen_upper;
  out.lower = std::max(0.0, nb * eigen_lower);
  out.upper = std::max(out.lower, nb * eigen_upper);
  out.source = source;
  return out;
}

AdmissibleSequence h_sequence(int k, int d) {
  AdmissibleSequence s;
  s.d = d;
  for (int i = 0; i < k; ++i) s.specs.push_back({i, 0.0});
  return s;
}

VarianceBounds h_variance_bounds(int k, int l, const Regime& regime, const MomentTable& table) {
  require(k >= 1 && k <= l, ErrorCode::InvalidParameter, "h-variance needs 1 <= k <= l");
  const int d = table.dimension();
  const auto b = h_coefficients(k, l);
  const auto seq = h_sequence(k, d);
  const double nb = squared_norm(b);
  const auto model = assemble_sigma(seq, regime, table);
  VarianceBounds out;

  switch (regime.kind) {
    case Regime::Kind::Super: {
      double sum = 0.0;
      for (int i = 1; i <= k; ++i) {
        const double a = factorial(i - 1) / resolve_single(table, i - 1, 0.0).value;
        sum += 1.0 / (a * a);
      }
      out = variance_bounds(b, 0.0, sum, BoundSource::RegimeBound);
      break;
    }
    case Regime::Kind::Sub: {
      double lo = 0.0, hi = 0.0;
      for (int i = 1; i <= k; ++i) {
        const double lambda = resolve_single(table, i - 1, 0.0).value / factorial(i);
        lo = i == 1 ? lambda : std::min(lo, lambda);
        hi = i == 1 ? lambda : std::max(hi, lambda);
      }
      out = variance_bounds(b, lo, hi, BoundSource::ExactEigenvalues);
      out.literal_lower = nb * resolve_single(table, 0, 0.0).value;
      break;
    }
    case Regime::Kind::Critical: {
      const double kd = unit_ball_volume(d);
      double best = 0.0;
      bool requirement = true;
      for (int m = 0; m <= k; ++m) {
        double sum = 0.0;
        for (int i = 1; i <= k; ++i) {
          if (i - 1 < m) continue;
          const double a = std::sqrt(factorial(m + 1)) * factorial(i - 1 - m);
          sum += 1.0 / (a * a);
        }
        best = std::max(best, std::pow(kd, 2 * k - m) * sum);
      }
      for (int m = 0; m <= seq.max_k(); ++m)
        requirement = requirement && check_requirement(m, seq, table).holds;
      out = variance_bounds(b, 0.0, (k + 1) * best, BoundSource::ConjectureTagged);
      out.applicable = requirement;
      break;
    }
  }
  out.variance = quadratic_form(model.sigma, b);
  return out;
}

PartialCorrelation partial_correlation(const SymMatrix& s) {
  require(s.size() == 3, ErrorCode::InvalidParameter, "partial correlation needs a 3x3 matrix");
  const auto eig = jacobi_eigen(s);
  const double top = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  if (!(eig.values.front() > 1e-12 * top))
    fail(ErrorCode::NearSingular, "covariance matrix is numerically singular");
  const Matrix inv = inverse(s.dense());
  PartialCorrelation r;
  r.from_inverse = -inv(0, 1) / std::sqrt(inv(0, 0) * inv(1, 1));
  const double x0 = s(2, 0) / s(2, 2);
  const double y0 = s(2, 1) / s(2, 2);
  const double c12 = s(0, 1) - x0 * s(2, 1) - y0 * s(2, 0) + x0 * y0 * s(2, 2);
  const double c11 = s(0, 0) - 2.0 * x0 * s(2, 0) + x0 * x0 * s(2, 2);
  const double c22 = s(1, 1) - 2.0 * y0 * s(2, 1) + y0 * y0 * s(2, 2);
  r.from_regression = c12 / std::sqrt(c11 * c22);
  r.difference = r.from_inverse - r.from_regression;
  r.agree = std::abs(r.difference) <= 1e-10;
  return r;
}

ResidualSeries supercritical_residual(std::span<const SampleSet> samples, std::size_t first,
                                      std::size_t second, double a1, double a2) {
  ResidualSeries series;
  series.kind = ResidualKind::Supercritical;
  std::vector<double> ts, vars;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& set = samples[s];
    require(s == 0 || set.t > samples[s - 1].t, ErrorCode::InvalidParameter,
            "t grid must be strictly increasing");
    const std::size_t n = set.values.rows();
    require(n >= 2, ErrorCode::InsufficientData, "residual series needs >= 2 trials per t");
    std::vector<double> v1(n), v2(n);
    RunningMoments dm;
    for (std::size_t i = 0; i < n; ++i) {
      v1[i] = set.values(i, first);
      v2[i] = set.values(i, second);
      dm.add(a1 * v1[i] - a2 * v2[i]);
    }
    ResidualPoint p;
    p.t = set.t;
    p.trials = n;
    p.mean = dm.mean;
    p.variance = dm.variance();
    p.correlation = pearson(v1, v2);
    series.points.push_back(p);
    ts.push_back(p.t);
    vars.push_back(p.variance);
  }
  series.trend = ts.size() >= 2 ? spearman(ts, vars) : 0.0;
  return series;
}

ZCoefficients z_coefficients(int k, const MomentTable& table, double alpha1, double alpha2) {
  const double mu11 = resolve_single(table, k, 2.0 * alpha1).value;
  const double mu12 = resolve_single(table, k, alpha1 + alpha2).value;
  const double mu22 = resolve_single(table, k, 2.0 * alpha2).value;
  const Matrix ginv = same_k_cholesky_inverse(k, mu11, mu12, mu22);
  return {ginv(1, 0), ginv(1, 1)};
}

ZReport subcritical_residual(const SampleSet& samples, std::size_t first, std::size_t second,
                             const ZCoefficients& g,
                             std::optional<std::pair<double, double>> centres,
                             double variance_band_factor) {
  const std::size_t n = samples.values.rows();
  require(n >= 2, ErrorCode::InsufficientData, "Z residual needs >= 2 trials");
  std::vector<double> v1(n), v2(n);
  for (std::size_t i = 0; i < n; ++i) {
    v1[i] = samples.values(i, first);
    v2[i] = samples.values(i, second);
  }
  double c1, c2;
  if (centres) {
    c1 = centres->first;
    c2 = centres->second;
  } else {
    c1 = 0.0;
    c2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      c1 += v1[i];
      c2 += v2[i];
    }
    c1 /= static_cast<double>(n);
    c2 /= static_cast<double>(n);
  }
  ZReport r;
  r.z.resize(n);
  RunningMoments zm;
  for (std::size_t i = 0; i < n; ++i) {
    r.z[i] = g.g21 * (v1[i] - c1) + g.g22 * (v2[i] - c2);
    zm.add(r.z[i]);
  }
  r.point.t = samples.t;
  r.point.trials = n;
  r.point.mean = zm.mean;
  r.point.variance = zm.variance();
  r.point.correlation = pearson(r.z, v1);
  const double band = 3.0 / std::sqrt(static_cast<double>(n));
  auto stat = [](std::string name, double value, double target, double tol) {
    return ZStatistic{std::move(name), value, target, tol, std::abs(value - target) <= tol};
  };
  r.statistics.push_back(stat("mean", r.point.mean, 0.0, band));
  r.statistics.push_back(stat("variance", r.point.variance, 1.0, variance_band_factor * band));
  r.statistics.push_back(stat("abs_correlation", std::abs(r.point.correlation), 0.0, band));
  return r;
}

double torus_expectation(double t, double delta, int d, const FunctionalSpec& spec, double mu) {
  return std::pow(t, spec.k + 1) * std::pow(delta, spec.k * (spec.alpha + d)) * mu /
         factorial(spec.k + 1);
}

OrderReport residual_order_report(const ResidualSeries& series) {
  require(series.points.size() >= 4, ErrorCode::InsufficientData,
          "order report needs at least 4 grid points");
  std::vector<double> x, y;
  for (const auto& p : series.points) {
    require(p.variance > 0.0, ErrorCode::InsufficientData,
            "order report needs positive variances");
    x.push_back(std::log(p.t));
    y.push_back(std::log(p.variance));
  }
  const auto fit = least_squares(x, y);
  return {fit.slope, fit.intercept, series.points.size()};
}

}  // namespace vrcov
