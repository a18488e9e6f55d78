#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vrcov/applications.hpp"
#include "vrcov/covariance.hpp"
#include "vrcov/functionals.hpp"
#include "vrcov/geometry.hpp"
#include "vrcov/moments.hpp"
#include "vrcov/statistics.hpp"

namespace vrcov {

/// delta(t) = C t^(-beta). The critical rule is delta = (c/t)^(1/d).
struct RegimeRule {
  Regime::Kind kind = Regime::Kind::Sub;
  double scale = 1.0;  ///< C
  double beta = 0.8;
  double c = 1.0;
  std::optional<Regime::Branch> branch;

  double delta(double t, int d) const;
  /// The limiting regime the rule belongs to.
  Regime regime() const;
  void validate(int d) const;
};

struct ExperimentConfig {
  int d = 2;
  std::vector<FunctionalSpec> sequence;
  RegimeRule rule;
  std::vector<double> t_grid;
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  MomentOptions moments;
  std::optional<std::filesystem::path> moment_table;
  std::optional<int> dimension_cap;
  bool periodic = false;
  std::size_t enumeration_budget = kDefaultSimplexBudget;
  std::filesystem::path output_dir = "out";
  double z_tolerance = 3.0;
  double relative_tolerance = 0.15;
  int h_k = 0;  ///< 0: no h-functional requested
  HLengthRule h_rule = HLengthRule::MinOfDimensionPlusOne;

  AdmissibleSequence admissible() const { return {d, sequence}; }
  /// The cap used for enumeration: explicit value, else max k_i
  /// (and at least d when an h-functional is requested).
  int cap() const;

  /// Checks everything except admissibility of the sequence.
  void validate() const;

  /// Strict parse: unknown keys and type mismatches are Config errors.
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);
  std::string to_json() const;
};

struct IntensityResult {
  double t = 0.0;
  double delta = 0.0;
  EmpiricalCovariance accumulator;
  std::vector<double> q;          ///< normalisation per functional
  std::optional<Matrix> raw;      ///< trials x n normalised values
  std::optional<Matrix> f_raw;    ///< trials x (cap+1) simplex counts
  std::vector<int> dimensions;    ///< complex dimension per trial (raw mode)
  std::uint64_t points_total = 0;
};

struct SimulationResult {
  std::vector<IntensityResult> intensities;
};

struct RunOptions {
  unsigned workers = 1;
  bool keep_raw = false;
};

/// One trial: sample, enumerate, evaluate raw functionals. Deterministic in
/// (seed, t_index, trial).
struct TrialOutcome {
  std::vector<double> raw;
  std::vector<std::uint64_t> f;
  int dimension = -1;
  std::size_t points = 0;
};

TrialOutcome run_trial(const ExperimentConfig& config, std::size_t t_index, std::uint64_t trial);

SimulationResult run_trials(const ExperimentConfig& config, const RunOptions& options = {});

struct CompareEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double empirical = 0.0;
  double model = 0.0;
  double standard_error = 0.0;
  double z = 0.0;
  double relative = 0.0;
  bool pass = false;
};

struct CompareReport {
  std::vector<CompareEntry> entries;  ///< upper triangle, row-major
  double max_abs_z = 0.0;
  double max_abs_relative = 0.0;
  bool pass = false;
};

/// Entry-wise z-scores (empirical - model) / sqrt(se_emp^2 + se_model^2),
/// where se_emp uses the normal-theory formula at the model matrix. An entry
/// passes when |z| <= z_tolerance or |relative| <= relative_tolerance.
CompareReport compare(const SymMatrix& empirical, std::uint64_t trials, const SymMatrix& model,
                      const SymMatrix& model_standard_error, double z_tolerance,
                      double relative_tolerance);

CompareReport compare(const EmpiricalCovariance& empirical, const CovarianceModel& model,
                      double z_tolerance, double relative_tolerance);

/// Table from config (loaded if present, extended to cover the sequence).
MomentTable prepare_moments(const ExperimentConfig& config, unsigned workers);

}  // namespace vrcov
