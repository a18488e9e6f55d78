#include "vrcov/covariance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "vrcov/error.hpp"

namespace vrcov {

int AdmissibleSequence::max_k() const noexcept {
  int k = 0;
  for (const auto& s : specs) k = std::max(k, s.k);
  return k;
}

std::vector<Violation> validate(const AdmissibleSequence& sequence) {
  std::vector<Violation> out;
  const int d = sequence.d;
  const auto& s = sequence.specs;
  if (d < 1) out.push_back({0, {}, "dimension d must be >= 1"});
  if (s.empty()) out.push_back({0, {}, "sequence is empty"});
  if (s.size() > kMaxSequenceLength)
    out.push_back({0, {}, "sequence longer than " + std::to_string(kMaxSequenceLength)});
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].k < 0) out.push_back({0, {i}, "k must be >= 0 at index " + std::to_string(i)});
    if (!std::isfinite(s[i].alpha))
      out.push_back({0, {i}, "alpha is not finite at index " + std::to_string(i)});
  }
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i].k > s[i + 1].k)
      out.push_back({1, {i, i + 1},
                     "k must be non-decreasing: k_" + std::to_string(i) + " > k_" +
                         std::to_string(i + 1)});
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (s[i] == s[j])
        out.push_back({2, {i, j},
                       "pairs are not distinct: indices " + std::to_string(i) + " and " +
                           std::to_string(j)});
  // Integrability only constrains volume powers; for k > d the factor is an indicator.
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].k <= d && !(s[i].alpha > -d + s[i].k - 1))
      out.push_back({3, {i}, "alpha_" + std::to_string(i) + " must exceed -d+k-1"});
    for (std::size_t j = i; j < s.size(); ++j)
      if (std::min(s[i].k, s[j].k) <= d &&
          !(s[i].alpha + s[j].alpha > -d + std::min(s[i].k, s[j].k) - 1))
        out.push_back({3, {i, j},
                       "alpha_" + std::to_string(i) + " + alpha_" + std::to_string(j) +
                           " must exceed -d+min(k_i,k_j)-1"});
  }
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i].k > d && s[i].alpha != 0.0)
      out.push_back({4, {i}, "alpha_" + std::to_string(i) + " must be 0 because k > d"});
  return out;
}

void require_admissible(const AdmissibleSequence& sequence) {
  const auto v = validate(sequence);
  if (v.empty()) return;
  std::string msg = "sequence is not admissible:";
  for (const auto& x : v) msg += " [" + x.message + "]";
  fail(ErrorCode::InvalidParameter, msg);
}

Regime Regime::critical(double c) { return critical(c, c <= 1.0 ? Branch::Low : Branch::High); }

Regime Regime::critical(double c, Branch branch) {
  Regime r{Kind::Critical, c, branch};
  r.validate();
  return r;
}

void Regime::validate() const {
  if (kind != Kind::Critical) return;
  require(std::isfinite(c) && c > 0.0, ErrorCode::InvalidParameter,
          "critical constant c must be positive");
  require(branch == Branch::Low ? c <= 1.0 : c >= 1.0, ErrorCode::InvalidParameter,
          "critical branch does not match c (low needs c <= 1, high needs c >= 1)");
}

std::string Regime::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Sub: return "sub";
    case Kind::Super: return "super";
    case Kind::Critical:
      os.precision(17);
      os << "critical(c=" << c << ", branch=" << (branch == Branch::Low ? "low" : "high") << ")";
      return os.str();
  }
  return "";
}

double factorial(int n) {
  if (n < 0) fail(ErrorCode::ContractViolation, "factorial of a negative number");
  if (n <= 20) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return static_cast<double>(f);
  }
  return std::tgamma(n + 1.0);
}

namespace {

MomentMatrix empty_matrix(std::size_t n) { return {SymMatrix(n), SymMatrix(n), false}; }

void set_entry(MomentMatrix& out, std::size_t l, std::size_t j, const ResolvedMoment& mu,
               double denom) {
  out.value.set(l, j, mu.value / denom);
  out.standard_error.set(l, j, mu.standard_error / denom);
  out.uses_mu_zero = out.uses_mu_zero || mu.uses_mu_zero;
}

}  // namespace

MomentMatrix build_a_gt1(int m, const AdmissibleSequence& sequence, const MomentTable& table) {
  require(m >= 0 && m <= sequence.max_k(), ErrorCode::InvalidParameter,
          "A_m^{>1} needs 0 <= m <= k_n");
  const auto& s = sequence.specs;
  MomentMatrix out = empty_matrix(s.size());
  for (std::size_t l = 0; l < s.size(); ++l)
    for (std::size_t j = l; j < s.size(); ++j) {
      if (m > std::min(s[l].k, s[j].k)) continue;
      const auto mu = resolve_cross(table, s[l].k, s[j].k, m + 1, s[l].alpha, s[j].alpha);
      set_entry(out, l, j, mu, factorial(m + 1) * factorial(s[l].k - m) * factorial(s[j].k - m));
    }
  return out;
}

MomentMatrix build_a_lt1(int m, const AdmissibleSequence& sequence, const MomentTable& table) {
  require(m >= 0 && m <= 2 * sequence.max_k(), ErrorCode::InvalidParameter,
          "A_m^{<1} needs 0 <= m <= 2 k_n");
  const auto& s = sequence.specs;
  MomentMatrix out = empty_matrix(s.size());
  for (std::size_t l = 0; l < s.size(); ++l)
    for (std::size_t j = l; j < s.size(); ++j) {
      const int kl = s[l].k;
      const int kj = s[j].k;
      const int excess = m - std::abs(kl - kj);
      if (excess < 0 || excess % 2 != 0 || excess > 2 * std::min(kl, kj)) continue;
      const int overlap = (kl + kj - m + 2) / 2;
      const auto mu = resolve_cross(table, kl, kj, overlap, s[l].alpha, s[j].alpha);
      set_entry(out, l, j, mu,
                factorial(overlap) * factorial((m - kl + kj) / 2) * factorial((m + kl - kj) / 2));
    }
  return out;
}

namespace {

void accumulate(MomentMatrix& sum, std::vector<double>& var, const MomentMatrix& term,
                double weight) {
  const std::size_t n = sum.value.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      sum.value.add(i, j, weight * term.value(i, j));
      const double se = weight * term.standard_error(i, j);
      var[i * n + j] += se * se;
    }
  sum.uses_mu_zero = sum.uses_mu_zero || term.uses_mu_zero;
}

void finish(MomentMatrix& sum, const std::vector<double>& var) {
  const std::size_t n = sum.value.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) sum.standard_error.set(i, j, std::sqrt(var[i * n + j]));
}

}  // namespace

MomentMatrix critical_low_sum(const AdmissibleSequence& sequence, const MomentTable& table,
                              double c) {
  const std::size_t n = sequence.size();
  MomentMatrix sum = empty_matrix(n);
  std::vector<double> var(n * n, 0.0);
  for (int m = 0; m <= 2 * sequence.max_k(); ++m)
    accumulate(sum, var, build_a_lt1(m, sequence, table), std::pow(c, 0.5 * m));
  finish(sum, var);
  return sum;
}

MomentMatrix critical_high_sum(const AdmissibleSequence& sequence, const MomentTable& table,
                               double c) {
  const std::size_t n = sequence.size();
  MomentMatrix sum = empty_matrix(n);
  std::vector<double> var(n * n, 0.0);
  for (int m = 0; m <= sequence.max_k(); ++m)
    accumulate(sum, var, build_a_gt1(m, sequence, table), std::pow(c, -static_cast<double>(m)));
  finish(sum, var);
  return sum;
}

CovarianceModel assemble_sigma(const AdmissibleSequence& sequence, const Regime& regime,
                               const MomentTable& table) {
  require_admissible(sequence);
  regime.validate();
  require(table.dimension() == sequence.d, ErrorCode::InvalidParameter,
          "moment table dimension does not match the sequence");
  MomentMatrix m;
  switch (regime.kind) {
    case Regime::Kind::Sub: m = build_a_lt1(0, sequence, table); break;
    case Regime::Kind::Super: m = build_a_gt1(0, sequence, table); break;
    case Regime::Kind::Critical:
      m = regime.branch == Regime::Branch::Low ? critical_low_sum(sequence, table, regime.c)
                                               : critical_high_sum(sequence, table, regime.c);
      break;
  }
  CovarianceModel model;
  model.sequence = sequence;
  model.regime = regime;
  model.sigma = m.value;
  model.standard_error = m.standard_error;
  model.table_hash = table.hash();
  model.uses_mu_zero = m.uses_mu_zero;
  return model;
}

IdentityCheck check_sum_identity(const AdmissibleSequence& sequence, const MomentTable& table) {
  const auto low = critical_low_sum(sequence, table, 1.0);
  const auto high = critical_high_sum(sequence, table, 1.0);
  IdentityCheck r;
  const std::size_t n = sequence.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      r.max_abs_difference =
          std::max(r.max_abs_difference, std::abs(low.value(i, j) - high.value(i, j)));
      r.max_abs_entry = std::max(r.max_abs_entry, std::abs(high.value(i, j)));
    }
  return r;
}

std::string format_matrix(const Matrix& a) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      auto res = std::to_chars(buf, buf + sizeof buf, a(i, j), std::chars_format::general, 17);
      if (j) out += ' ';
      out.append(buf, res.ptr);
    }
    out += '\n';
  }
  return out;
}

std::string CovarianceModel::to_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "# vrcov covariance model\n";
  os << "d " << sequence.d << '\n';
  os << "sequence";
  for (const auto& s : sequence.specs) os << ' ' << s.k << ':' << s.alpha;
  os << '\n';
  os << "regime " << regime.to_string() << '\n';
  os << "moment_table " << table_hash << '\n';
  os << "uses_mu_zero " << (uses_mu_zero ? "true" : "false") << '\n';
  os << "sigma " << sigma.size() << '\n' << format_matrix(sigma.dense());
  os << "standard_error " << standard_error.size() << '\n' << format_matrix(standard_error.dense());
  return os.str();
}

}  // namespace vrcov
