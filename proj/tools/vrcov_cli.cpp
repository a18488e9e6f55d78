#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vrcov/applications.hpp"
#include "vrcov/covariance.hpp"
#include "vrcov/error.hpp"
#include "vrcov/experiments.hpp"
#include "vrcov/functionals.hpp"
#include "vrcov/moments.hpp"
#include "vrcov/report.hpp"
#include "vrcov/structured_algebra.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace vrcov;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitUsage = 1;
constexpr int kExitTolerance = 2;

constexpr double kResidualTolerance = 1e-10;
constexpr double kIdentityTolerance = 1e-12;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::optional<std::string> out;
  std::optional<std::string> table;
  bool keep_raw = false;
};

struct Run {
  ExperimentConfig config;
  unsigned workers = 1;
  bool keep_raw = false;
  fs::path out;
};

Run load_run(const Common& c) {
  Run r;
  r.config = ExperimentConfig::load(c.config);
  if (c.seed) r.config.seed = *c.seed;
  if (c.table) r.config.moment_table = *c.table;
  if (c.out) r.config.output_dir = *c.out;
  r.config.validate();
  r.workers = c.workers;
  r.keep_raw = c.keep_raw;
  r.out = r.config.output_dir;
  return r;
}

MomentTable table_for(const Run& r) {
  auto table = prepare_moments(r.config, r.workers);
  if (r.config.moment_table) table.save(*r.config.moment_table);
  return table;
}

std::string entry_name(const char* what, std::size_t i, std::size_t j) {
  return std::string(what) + "[" + std::to_string(i) + "," + std::to_string(j) + "]";
}

ReportRow row(double t, std::string statistic, double value, double tolerance, bool pass) {
  return {t, std::move(statistic), value, tolerance, pass};
}

bool all_pass(const std::vector<ReportRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

void write_summary(const fs::path& out, const std::string& command, const Run& r, bool pass,
                   json extra = json::object()) {
  json j = std::move(extra);
  j["command"] = command;
  j["seed"] = r.config.seed;
  j["pass"] = pass;
  j["config"] = json::parse(r.config.to_json());
  write_text(out / "summary.json", j.dump(2) + "\n");
}

std::vector<std::string> spec_header(const ExperimentConfig& c) {
  std::vector<std::string> h;
  for (const auto& s : c.sequence) h.push_back("V" + std::to_string(s.k) + "_" + format_number(s.alpha));
  return h;
}

void print_rows(const std::vector<ReportRow>& rows) {
  for (const auto& r : rows)
    std::printf("%-28s %s %s\n", r.statistic.c_str(), format_number(r.value).c_str(),
                r.pass ? "ok" : "FAIL");
}

// ---------------------------------------------------------------- commands

int cmd_moments(const Common& c) {
  auto r = load_run(c);
  if (!r.config.moment_table) r.config.moment_table = r.out / "moments.txt";
  MomentTable table(r.config.d);
  if (fs::exists(*r.config.moment_table)) table = MomentTable::load(*r.config.moment_table);
  const std::size_t before = table.size();
  table = prepare_moments(r.config, r.workers);
  table.save(*r.config.moment_table);
  std::printf("moment table %s: %zu entries (%zu added), hash %s\n",
              r.config.moment_table->string().c_str(), table.size(), table.size() - before,
              table.hash().c_str());
  return kExitPass;
}

int cmd_asymptotic(const Common& c) {
  const auto r = load_run(c);
  const auto seq = r.config.admissible();
  require_admissible(seq);
  const auto table = table_for(r);
  const auto regime = r.config.rule.regime();
  const auto model = assemble_sigma(seq, regime, table);
  const auto header = spec_header(r.config);
  write_text(r.out / "sigma.csv", matrix_csv(model.sigma.dense(), header));
  write_text(r.out / "sigma_se.csv", matrix_csv(model.standard_error.dense(), header));
  write_text(r.out / "model.txt", model.to_text());
  std::printf("%s", model.to_text().c_str());

  bool pass = true;
  json extra;
  extra["regime"] = regime.to_string();
  extra["table_hash"] = model.table_hash;
  extra["uses_mu_zero"] = model.uses_mu_zero;
  if (regime.kind == Regime::Kind::Critical && regime.c == 1.0) {
    const auto id = check_sum_identity(seq, table);
    pass = id.relative() <= kIdentityTolerance;
    std::printf("identity discrepancy %s (tolerance %s) %s\n", format_number(id.relative()).c_str(),
                format_number(kIdentityTolerance).c_str(), pass ? "ok" : "FAIL");
    extra["identity_discrepancy"] = id.relative();
  }
  write_summary(r.out, "asymptotic build", r, pass, extra);
  return pass ? kExitPass : kExitTolerance;
}

void decomposition_rows(const ExperimentConfig& config, const MomentTable& table,
                        std::vector<ReportRow>& rows) {
  const auto seq = config.admissible();
  const auto regime = config.rule.regime();
  switch (regime.kind) {
    case Regime::Kind::Super: {
      const auto co = SuperCoefficients::from_moments(seq, table);
      for (const auto& f : {super_lu(co), super_cholesky(co), super_root(co)})
        rows.push_back(row(0, "residual_" + to_string(f.kind), f.residual, kResidualTolerance,
                           f.residual <= kResidualTolerance));
      const auto schur = super_schur(co);
      const auto sigma = co.sigma().dense();
      const double res = frobenius_norm(schur.reconstruct() - sigma) / frobenius_norm(sigma);
      rows.push_back(row(0, "residual_schur", res, kResidualTolerance, res <= kResidualTolerance));
      rows.push_back(row(0, "residual_schur_inverse", schur.inverse_residual(), kResidualTolerance,
                         schur.inverse_residual() <= kResidualTolerance));
      const auto inv = matrix_invariants(co.sigma());
      rows.push_back(row(0, "rank", inv.rank, 1, inv.rank == 1));
      double expected = 0.0;
      for (double a : co.a) expected += 1.0 / (a * a);
      const double rel = std::abs(inv.max_eigenvalue - expected) / expected;
      rows.push_back(row(0, "max_eigenvalue_relative_error", rel, 1e-12, rel <= 1e-12));
      break;
    }
    case Regime::Kind::Sub: {
      const auto model = assemble_sigma(seq, regime, table);
      const auto dec = sub_decompositions(model.sigma, seq);
      for (const auto* f : {&dec.cholesky, &dec.lu, &dec.root})
        rows.push_back(row(0, "residual_" + to_string(f->kind), f->residual, kResidualTolerance,
                           f->residual <= kResidualTolerance));
      const auto blocks = sub_block_structure(model.sigma, seq);
      const Matrix inv = sub_inverse(blocks);
      const double res =
          infinity_norm(model.sigma.dense() * inv - Matrix::identity(model.sigma.size()));
      rows.push_back(row(0, "inverse_residual", res, 1e-8, res <= 1e-8));
      const auto inv_report = matrix_invariants(model.sigma);
      rows.push_back(row(0, "min_eigenvalue", inv_report.min_eigenvalue, 0,
                         inv_report.positive_definite));
      break;
    }
    case Regime::Kind::Critical: {
      const auto model = assemble_sigma(seq, regime, table);
      const auto inv = matrix_invariants(model.sigma);
      rows.push_back(row(0, "min_eigenvalue", inv.min_eigenvalue, 0, inv.positive_semidefinite));
      rows.push_back(row(0, "rank", inv.rank, static_cast<double>(seq.size()), true));
      break;
    }
  }
}

int cmd_decompose(const Common& c) {
  const auto r = load_run(c);
  require_admissible(r.config.admissible());
  const auto table = table_for(r);
  std::vector<ReportRow> rows;
  decomposition_rows(r.config, table, rows);
  write_text(r.out / "decompose.csv", report_csv(rows));
  print_rows(rows);
  const bool pass = all_pass(rows);
  write_summary(r.out, "decompose", r, pass);
  return pass ? kExitPass : kExitTolerance;
}

json simulation_outputs(const Run& r, const SimulationResult& sim) {
  json per_t = json::array();
  const auto header = spec_header(r.config);
  for (std::size_t ti = 0; ti < sim.intensities.size(); ++ti) {
    const auto& it = sim.intensities[ti];
    const std::string tag = "t" + std::to_string(ti);
    const auto cov = it.accumulator.covariance();
    write_text(r.out / (tag + "_covariance.csv"), matrix_csv(cov.dense(), header));
    Matrix means(1, it.accumulator.dimension());
    for (std::size_t i = 0; i < means.cols(); ++i) means(0, i) = it.accumulator.means()[i];
    write_text(r.out / (tag + "_means.csv"), matrix_csv(means, header));
    if (it.raw) write_text(r.out / (tag + "_raw.csv"), matrix_csv(*it.raw, header));
    if (it.f_raw) write_text(r.out / (tag + "_f.csv"), matrix_csv(*it.f_raw));
    per_t.push_back({{"t", it.t},
                     {"delta", it.delta},
                     {"trials", it.accumulator.count()},
                     {"points", it.points_total}});
  }
  return per_t;
}

int cmd_simulate(const Common& c) {
  const auto r = load_run(c);
  require(r.config.trials >= 2, ErrorCode::InsufficientData,
          "covariance needs at least 2 trials per intensity");
  const auto sim = run_trials(r.config, {r.workers, r.keep_raw});
  json extra;
  extra["intensities"] = simulation_outputs(r, sim);
  write_summary(r.out, "simulate", r, true, extra);
  for (const auto& it : sim.intensities)
    std::printf("t=%s delta=%s trials=%llu\n", format_number(it.t).c_str(),
                format_number(it.delta).c_str(),
                static_cast<unsigned long long>(it.accumulator.count()));
  return kExitPass;
}

int cmd_compare(const Common& c) {
  const auto r = load_run(c);
  require(r.config.trials >= 2, ErrorCode::InsufficientData,
          "comparison needs at least 2 trials per intensity");
  const auto seq = r.config.admissible();
  require_admissible(seq);
  const auto table = table_for(r);
  const auto model = assemble_sigma(seq, r.config.rule.regime(), table);
  const auto sim = run_trials(r.config, {r.workers, r.keep_raw});
  std::vector<ReportRow> rows;
  for (const auto& it : sim.intensities) {
    const auto rep =
        compare(it.accumulator, model, r.config.z_tolerance, r.config.relative_tolerance);
    for (const auto& e : rep.entries) {
      rows.push_back(row(it.t, entry_name("empirical", e.i, e.j), e.empirical, 0, true));
      rows.push_back(row(it.t, entry_name("model", e.i, e.j), e.model, 0, true));
      rows.push_back(row(it.t, entry_name("z", e.i, e.j), e.z, r.config.z_tolerance, e.pass));
      rows.push_back(row(it.t, entry_name("relative", e.i, e.j), e.relative,
                         r.config.relative_tolerance, e.pass));
    }
  }
  json extra;
  extra["intensities"] = simulation_outputs(r, sim);
  extra["table_hash"] = model.table_hash;
  write_text(r.out / "compare.csv", report_csv(rows));
  const bool pass = all_pass(rows);
  write_summary(r.out, "compare", r, pass, extra);
  for (const auto& row : rows)
    if (row.statistic.starts_with("z") || row.statistic.starts_with("relative"))
      std::printf("t=%-10s %-18s %s %s\n", format_number(row.t).c_str(), row.statistic.c_str(),
                  format_number(row.value).c_str(), row.pass ? "ok" : "FAIL");
  return pass ? kExitPass : kExitTolerance;
}

int cmd_verify(const Common& c) {
  const auto r = load_run(c);
  const auto seq = r.config.admissible();
  require_admissible(seq);
  const auto table = table_for(r);
  std::vector<ReportRow> rows;

  const auto id = check_sum_identity(seq, table);
  rows.push_back(row(0, "identity_discrepancy", id.relative(), kIdentityTolerance,
                     id.relative() <= kIdentityTolerance));

  for (int m = 0; m <= seq.max_k(); ++m) {
    const auto blocks = critical_blocks(m, seq, table);
    if (blocks.active.empty()) continue;
    const auto req = check_requirement(blocks);
    const std::string tag = "m" + std::to_string(m);
    rows.push_back(row(0, "requirement_" + tag, req.holds ? 1 : 0, 0, req.scalar_agrees));
    const auto tb = theorem_bound(blocks, req);
    if (tb.applicable)
      rows.push_back(row(0, "theorem_bound_" + tag, tb.max_eigenvalue, tb.bound, tb.holds));
  }
  for (double cc : {0.5, 1.0, 2.0}) {
    const auto conj = conjecture_bound(seq, table, cc);
    const double top = conj.eigenvalues.empty() ? 0.0 : conj.eigenvalues.back();
    rows.push_back(row(0, "conjecture_c" + format_number(cc), top, conj.bound, true));
  }
  decomposition_rows(r.config, table, rows);

  write_text(r.out / "verify.csv", report_csv(rows));
  print_rows(rows);
  const bool pass = all_pass(rows);
  write_summary(r.out, "verify", r, pass);
  return pass ? kExitPass : kExitTolerance;
}

int cmd_hvector(const Common& c) {
  auto r = load_run(c);
  const int k = r.config.h_k;
  if (k < 1) fail(ErrorCode::Config, "hvector.k must be set to at least 1");
  const int d = r.config.d;
  // In the dense limit dim R >= d - 1, so both length rules give l = d.
  const int l = d;
  require(k <= l, ErrorCode::Config, "hvector.k must not exceed d");
  const auto table = table_for(r);
  const auto regime = r.config.rule.regime();
  const auto bounds = h_variance_bounds(k, l, regime, table);
  std::vector<ReportRow> rows;
  const double v = bounds.variance.value_or(0.0);
  const bool asserted = regime.kind != Regime::Kind::Critical;
  const double slack = 1e-12 * std::max(1.0, std::abs(bounds.upper));
  const bool inside = v >= bounds.lower - slack && v <= bounds.upper + slack;
  rows.push_back(row(0, "variance", v, 0, !asserted || inside));
  rows.push_back(row(0, "lower_bound", bounds.lower, 0, true));
  rows.push_back(row(0, "upper_bound", bounds.upper, 0, true));
  if (bounds.literal_lower) rows.push_back(row(0, "literal_lower_bound", *bounds.literal_lower, 0, true));
  rows.push_back(row(0, "applicable", bounds.applicable ? 1 : 0, 0, true));
  write_text(r.out / "hvector.csv", report_csv(rows));
  print_rows(rows);
  const bool pass = all_pass(rows);
  json extra;
  extra["k"] = k;
  extra["l"] = l;
  extra["source"] = to_string(bounds.source);
  write_summary(r.out, "hvector", r, pass, extra);
  return pass ? kExitPass : kExitTolerance;
}

void add_common(CLI::App* app, Common& c, bool raw) {
  app->add_option("config", c.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "Override the master seed");
  app->add_option("--workers", c.workers, "Worker threads (0 = hardware concurrency)");
  app->add_option("--out", c.out, "Output directory");
  app->add_option("--table", c.table, "Moment table file");
  if (raw) app->add_flag("--keep-raw", c.keep_raw, "Store per-trial vectors");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariance structure of Vietoris-Rips volume functionals"};
  app.require_subcommand(1);
  Common common;
  int (*handler)(const Common&) = nullptr;

  auto* moments = app.add_subcommand("moments", "Moment tables");
  moments->require_subcommand(1);
  auto* estimate = moments->add_subcommand("estimate", "Build or extend a moment table");
  add_common(estimate, common, false);
  estimate->callback([&] { handler = cmd_moments; });

  auto* asymptotic = app.add_subcommand("asymptotic", "Asymptotic covariance");
  asymptotic->require_subcommand(1);
  auto* build = asymptotic->add_subcommand("build", "Assemble the covariance matrix and its errors");
  add_common(build, common, false);
  build->callback([&] { handler = cmd_asymptotic; });

  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const Common&);
    bool raw;
  };
  for (const Entry& e : {Entry{"decompose", "Regime decompositions and invariants", cmd_decompose, false},
                         Entry{"simulate", "Run the Monte Carlo experiment", cmd_simulate, true},
                         Entry{"compare", "Compare empirical and asymptotic covariance", cmd_compare, true},
                         Entry{"verify", "Run the structural property checks", cmd_verify, false},
                         Entry{"hvector", "h-functional variance bounds", cmd_hvector, false}}) {
    auto* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, common, e.raw);
    sub->callback([&handler, fn = e.fn] { handler = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    return handler(common);
  } catch (const Error& e) {
    std::fprintf(stderr, "vrcov: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "vrcov: %s\n", e.what());
    return kExitUsage;
  }
}
