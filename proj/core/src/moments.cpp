#include "vrcov/moments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <tuple>

#include "vrcov/error.hpp"
#include "vrcov/parallel.hpp"
#include "vrcov/rng.hpp"
#include "vrcov/statistics.hpp"

namespace vrcov {

double unit_ball_volume(int d) {
  require(d >= 1, ErrorCode::InvalidParameter, "dimension must be >= 1");
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

namespace {

std::int64_t quantize(double alpha) { return std::llround(alpha * 1e9); }

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

MomentKey MomentKey::single(int d, int k, double alpha) {
  MomentKey key;
  key.d = d;
  key.kind = MomentKind::Single;
  key.k1 = k;
  key.alpha1 = alpha;
  return key;
}

MomentKey MomentKey::cross(int d, int k1, int k2, int m, double alpha1, double alpha2) {
  require(m >= 1 && m <= std::min(k1, k2) + 1, ErrorCode::InvalidParameter,
          "cross moment needs 1 <= m <= min(k1,k2)+1");
  if (std::make_pair(k2, quantize(alpha2)) < std::make_pair(k1, quantize(alpha1))) {
    std::swap(k1, k2);
    std::swap(alpha1, alpha2);
  }
  MomentKey key;
  key.d = d;
  key.kind = MomentKind::Cross;
  key.k1 = k1;
  key.k2 = k2;
  key.m = m;
  key.alpha1 = alpha1;
  key.alpha2 = alpha2;
  return key;
}

std::strong_ordering operator<=>(const MomentKey& a, const MomentKey& b) {
  auto tie = [](const MomentKey& k) {
    return std::make_tuple(k.d, static_cast<int>(k.kind), k.k1, k.k2, k.m, quantize(k.alpha1),
                           quantize(k.alpha2));
  };
  return tie(a) <=> tie(b);
}

std::string MomentKey::to_string() const {
  std::ostringstream os;
  if (kind == MomentKind::Single)
    os << "mu[d=" << d << ", k=" << k1 << ", alpha=" << format_double(alpha1) << "]";
  else
    os << "mu[d=" << d << ", k1=" << k1 << ", k2=" << k2 << ", m=" << m
       << ", alpha1=" << format_double(alpha1) << ", alpha2=" << format_double(alpha2) << "]";
  return os.str();
}

void MomentTable::insert(const MomentKey& key, const MomentEstimate& estimate) {
  require(key.d == d_, ErrorCode::ContractViolation,
          "moment key dimension " + std::to_string(key.d) + " does not match table dimension " +
              std::to_string(d_));
  require(estimate.standard_error >= 0.0, ErrorCode::ContractViolation,
          "standard error must be non-negative");
  entries_[key] = estimate;
}

const MomentEstimate* MomentTable::find(const MomentKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

const MomentEstimate& MomentTable::at(const MomentKey& key) const {
  const MomentEstimate* e = find(key);
  if (e == nullptr) fail(ErrorCode::MissingMoment, "moment table has no entry " + key.to_string());
  return *e;
}

std::string MomentTable::to_text() const {
  std::ostringstream os;
  os << "# vrcov moment table\n";
  os << "# d kind k1 k2 m alpha1 alpha2 value stderr samples seed method\n";
  for (const auto& [key, e] : entries_) {
    os << key.d << ' ' << (key.kind == MomentKind::Single ? "single" : "cross") << ' ' << key.k1
       << ' ' << key.k2 << ' ' << key.m << ' ' << format_double(key.alpha1) << ' '
       << format_double(key.alpha2) << ' ' << format_double(e.value) << ' '
       << format_double(e.standard_error) << ' ' << e.samples << ' ' << e.seed << ' '
       << (e.method == MomentMethod::MonteCarlo ? "mc" : "closed") << '\n';
  }
  return os.str();
}

namespace {

template <class T>
T parse_field(const std::string& token, std::size_t line) {
  T value{};
  auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
    fail(ErrorCode::Io, "moment table line " + std::to_string(line) + ": cannot parse '" +
                            token + "'");
  return value;
}

}  // namespace

MomentTable MomentTable::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  std::optional<MomentTable> table;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.size() != 12)
      fail(ErrorCode::Io, "moment table line " + std::to_string(line_no) + ": expected 12 fields");
    const int d = parse_field<int>(tok[0], line_no);
    if (!table) table.emplace(d);
    const int k1 = parse_field<int>(tok[2], line_no);
    const int k2 = parse_field<int>(tok[3], line_no);
    const int m = parse_field<int>(tok[4], line_no);
    const double a1 = parse_field<double>(tok[5], line_no);
    const double a2 = parse_field<double>(tok[6], line_no);
    MomentKey key;
    if (tok[1] == "single")
      key = MomentKey::single(d, k1, a1);
    else if (tok[1] == "cross")
      key = MomentKey::cross(d, k1, k2, m, a1, a2);
    else
      fail(ErrorCode::Io, "moment table line " + std::to_string(line_no) + ": unknown kind");
    MomentEstimate e;
    e.value = parse_field<double>(tok[7], line_no);
    e.standard_error = parse_field<double>(tok[8], line_no);
    e.samples = parse_field<std::uint64_t>(tok[9], line_no);
    e.seed = parse_field<std::uint64_t>(tok[10], line_no);
    if (tok[11] == "mc")
      e.method = MomentMethod::MonteCarlo;
    else if (tok[11] == "closed")
      e.method = MomentMethod::ClosedForm;
    else
      fail(ErrorCode::Io, "moment table line " + std::to_string(line_no) + ": unknown method");
    table->insert(key, e);
  }
  if (!table) fail(ErrorCode::Io, "moment table is empty");
  return *table;
}

void MomentTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write moment table " + path.string());
  out << to_text();
  if (!out) fail(ErrorCode::Io, "failed writing moment table " + path.string());
}

MomentTable MomentTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read moment table " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

std::string MomentTable::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_text())));
  return buf;
}

bool integrable_power(int d, int k, double alpha) noexcept {
  // Above the ambient dimension the factor is the bounded indicator, defined for alpha = 0 only.
  if (k > d) return alpha == 0.0;
  return std::isfinite(alpha) && alpha > -d + k - 1;
}

namespace {

/// One gated volume-power factor: the simplex on the origin and the listed
/// sample points.
struct Factor {
  std::vector<int> points;
  double alpha = 0.0;
};

constexpr std::uint64_t kBlockSize = 8192;

void sample_ball(Engine& rng, int d, double* out) {
  if (d < 4) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) {
        out[i] = u(rng);
        r2 += out[i] * out[i];
      }
      if (r2 <= 1.0) return;
    }
  }
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double r2 = 0.0;
  do {
    r2 = 0.0;
    for (int i = 0; i < d; ++i) {
      out[i] = g(rng);
      r2 += out[i] * out[i];
    }
  } while (r2 == 0.0);
  const double scale = std::pow(u(rng), 1.0 / d) / std::sqrt(r2);
  for (int i = 0; i < d; ++i) out[i] *= scale;
}

double factor_value(const Factor& f, int d, int npoints, const std::vector<double>& pair_sq,
                    const std::vector<double>& norm_sq, std::vector<double>& scratch) {
  const int k = static_cast<int>(f.points.size());
  for (int a = 0; a < k; ++a) {
    if (norm_sq[f.points[a]] > 1.0) return 0.0;
    for (int b = a + 1; b < k; ++b)
      if (pair_sq[f.points[a] * npoints + f.points[b]] > 1.0) return 0.0;
  }
  if (k == 0 || f.alpha == 0.0 || k > d) return 1.0;
  double vol;
  if (k == 1) {
    vol = std::sqrt(norm_sq[f.points[0]]);
  } else {
    const int vc = k + 1;
    scratch.assign(static_cast<std::size_t>(vc * vc), 0.0);
    for (int a = 0; a < k; ++a) {
      scratch[(a + 1)] = scratch[(a + 1) * vc] = norm_sq[f.points[a]];
      for (int b = a + 1; b < k; ++b) {
        const double v = pair_sq[f.points[a] * npoints + f.points[b]];
        scratch[(a + 1) * vc + (b + 1)] = scratch[(b + 1) * vc + (a + 1)] = v;
      }
    }
    vol = simplex_volume_from_squared(scratch, vc);
  }
  if (f.alpha == 1.0) return vol;
  if (f.alpha == 2.0) return vol * vol;
  return std::pow(vol, f.alpha);
}

MomentEstimate monte_carlo(int d, int npoints, const std::vector<Factor>& factors,
                           std::uint64_t samples, std::uint64_t seed, unsigned workers) {
  require(samples >= kMinMomentSamples, ErrorCode::InvalidParameter,
          "moment estimation needs at least 1000 samples");
  const std::uint64_t blocks = (samples + kBlockSize - 1) / kBlockSize;
  std::vector<RunningMoments> partial(blocks);
  parallel_for(blocks, workers, [&](std::size_t b) {
    Engine rng = make_engine(seed, {0x6d6f6d656e7473ULL, b});
    const std::uint64_t begin = b * kBlockSize;
    const std::uint64_t end = std::min(samples, begin + kBlockSize);
    std::vector<double> pts(static_cast<std::size_t>(npoints * d));
    std::vector<double> pair_sq(static_cast<std::size_t>(npoints * npoints));
    std::vector<double> norm_sq(npoints);
    std::vector<double> scratch;
    RunningMoments acc;
    for (std::uint64_t s = begin; s < end; ++s) {
      for (int p = 0; p < npoints; ++p) sample_ball(rng, d, pts.data() + p * d);
      for (int p = 0; p < npoints; ++p) {
        double n2 = 0.0;
        for (int c = 0; c < d; ++c) n2 += pts[p * d + c] * pts[p * d + c];
        norm_sq[p] = n2;
        for (int q = p + 1; q < npoints; ++q) {
          double s2 = 0.0;
          for (int c = 0; c < d; ++c) {
            const double diff = pts[p * d + c] - pts[q * d + c];
            s2 += diff * diff;
          }
          pair_sq[p * npoints + q] = pair_sq[q * npoints + p] = s2;
        }
      }
      double value = 1.0;
      for (const auto& f : factors) {
        value *= factor_value(f, d, npoints, pair_sq, norm_sq, scratch);
        if (value == 0.0) break;
      }
      acc.add(value);
    }
    partial[b] = acc;
  });
  RunningMoments total;
  for (const auto& p : partial) total.merge(p);

  const double domain = std::pow(unit_ball_volume(d), npoints);
  MomentEstimate e;
  e.value = domain * total.mean;
  e.standard_error = domain * total.standard_error();
  e.samples = samples;
  e.seed = seed;
  e.method = MomentMethod::MonteCarlo;
  if (!std::isfinite(e.value))
    fail(ErrorCode::NumericalError, "moment estimate is not finite");
  return e;
}

}  // namespace

MomentEstimate estimate_mu_single(int d, int k, double alpha, std::uint64_t samples,
                                  std::uint64_t seed, unsigned workers) {
  require(d >= 1, ErrorCode::InvalidParameter, "dimension must be >= 1");
  require(k >= 1, ErrorCode::InvalidParameter, "single moment needs k >= 1");
  require(integrable_power(d, k, alpha), ErrorCode::InvalidParameter,
          "power " + format_double(alpha) + " is not integrable for k=" + std::to_string(k) +
              ", d=" + std::to_string(d));
  require(k <= d || alpha == 0.0, ErrorCode::InvalidParameter, "alpha must be 0 for k > d");
  Factor f;
  for (int i = 0; i < k; ++i) f.points.push_back(i);
  f.alpha = alpha;
  return monte_carlo(d, k, {f}, samples, seed, workers);
}

MomentEstimate estimate_mu_cross(int d, int k1, int k2, int m, double alpha1, double alpha2,
                                 std::uint64_t samples, std::uint64_t seed, unsigned workers) {
  require(d >= 1, ErrorCode::InvalidParameter, "dimension must be >= 1");
  require(m >= 1 && m <= std::min(k1, k2) + 1, ErrorCode::InvalidParameter,
          "cross moment needs 1 <= m <= min(k1,k2)+1");
  require(k1 >= 0 && k2 >= 0, ErrorCode::InvalidParameter, "simplex dimensions must be >= 0");
  for (auto [k, a] : {std::pair{k1, alpha1}, std::pair{k2, alpha2}}) {
    require(k == 0 || integrable_power(d, k, a), ErrorCode::InvalidParameter,
            "power " + format_double(a) + " is not integrable");
    require(k <= d || a == 0.0, ErrorCode::InvalidParameter, "alpha must be 0 for k > d");
  }
  const int npoints = k1 + k2 + 1 - m;
  require(npoints >= 1, ErrorCode::InvalidParameter, "cross moment without sample points");
  // Points are 0-based here: x_1..x_{k1} -> 0..k1-1, x_{k1-m+2}..x_{k1+k2-m+1} -> k1-m+1..npoints-1.
  Factor f1, f2;
  for (int i = 0; i < k1; ++i) f1.points.push_back(i);
  for (int i = k1 - m + 1; i < npoints; ++i) f2.points.push_back(i);
  f1.alpha = alpha1;
  f2.alpha = alpha2;
  return monte_carlo(d, npoints, {f1, f2}, samples, seed, workers);
}

double mu_one_closed_form(int d, double alpha) {
  require(integrable_power(d, 1, alpha), ErrorCode::InvalidParameter,
          "power is not integrable for k=1");
  return unit_ball_volume(d) * (d / (alpha + d));
}

double upper_bound_s(int d, int m, std::span<const FunctionalSpec> specs) {
  const double kd = unit_ball_volume(d);
  double best = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < specs.size(); ++i)
    for (std::size_t j = i; j < specs.size(); ++j) {
      const double ai = specs[i].alpha;
      const double aj = specs[j].alpha;
      const double amin = std::min({ai, aj, ai + aj});
      const double base = d * kd / (amin + d);
      const double v = std::pow(base, specs[i].k + specs[j].k - m);
      best = any ? std::max(best, v) : v;
      any = true;
    }
  return best;
}

ResolvedMoment resolve_single(const MomentTable& table, int k, double alpha) {
  if (k == 0) return {1.0, 0.0, true};
  const auto& e = table.at(MomentKey::single(table.dimension(), k, alpha));
  return {e.value, e.standard_error, false};
}

ResolvedMoment resolve_cross(const MomentTable& table, int k1, int k2, int m, double alpha1,
                             double alpha2) {
  require(m >= 1 && m <= std::min(k1, k2) + 1, ErrorCode::InvalidParameter,
          "cross moment needs 1 <= m <= min(k1,k2)+1");
  if (m == 1) {
    const auto a = resolve_single(table, k1, alpha1);
    const auto b = resolve_single(table, k2, alpha2);
    const double se = std::hypot(a.standard_error * b.value, a.value * b.standard_error);
    return {a.value * b.value, se, a.uses_mu_zero || b.uses_mu_zero};
  }
  if (k1 == k2 && m == k1 + 1) return resolve_single(table, k1, alpha1 + alpha2);
  const auto& e = table.at(MomentKey::cross(table.dimension(), k1, k2, m, alpha1, alpha2));
  return {e.value, e.standard_error, false};
}

std::vector<MomentKey> required_keys(int d, std::span<const FunctionalSpec> specs) {
  std::vector<MomentKey> keys;
  auto add = [&](const MomentKey& key) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  };
  auto add_single = [&](int k, double alpha) {
    if (k >= 1) add(MomentKey::single(d, k, alpha));
  };
  for (std::size_t i = 0; i < specs.size(); ++i)
    for (std::size_t j = i; j < specs.size(); ++j) {
      const auto& a = specs[i];
      const auto& b = specs[j];
      const int kmin = std::min(a.k, b.k);
      for (int o = 1; o <= kmin + 1; ++o) {
        if (o == 1) {
          add_single(a.k, a.alpha);
          add_single(b.k, b.alpha);
        } else if (a.k == b.k && o == a.k + 1) {
          add_single(a.k, a.alpha + b.alpha);
        } else {
          add(MomentKey::cross(d, a.k, b.k, o, a.alpha, b.alpha));
        }
      }
    }
  return keys;
}

MomentEstimate estimate_key(const MomentKey& key, const MomentOptions& options) {
  const std::uint64_t seed = mix_seed(options.seed, fnv1a(key.to_string()));
  if (key.kind == MomentKind::Single) {
    if (key.k1 == 1 && options.closed_form_k1) {
      MomentEstimate e;
      e.value = mu_one_closed_form(key.d, key.alpha1);
      e.method = MomentMethod::ClosedForm;
      return e;
    }
    return estimate_mu_single(key.d, key.k1, key.alpha1, options.samples, seed, options.workers);
  }
  return estimate_mu_cross(key.d, key.k1, key.k2, key.m, key.alpha1, key.alpha2, options.samples,
                           seed, options.workers);
}

std::size_t ensure_moments(MomentTable& table, std::span<const FunctionalSpec> specs,
                           const MomentOptions& options) {
  std::size_t added = 0;
  for (const auto& key : required_keys(table.dimension(), specs)) {
    if (table.contains(key)) continue;
    table.insert(key, estimate_key(key, options));
    ++added;
  }
  return added;
}

}  // namespace vrcov
