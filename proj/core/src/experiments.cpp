#include "vrcov/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vrcov/error.hpp"
#include "vrcov/parallel.hpp"
#include "vrcov/rng.hpp"

namespace vrcov {

namespace {

using json = nlohmann::json;

// Trials per accumulation chunk. Fixed so results do not depend on workers.
constexpr std::uint64_t kTrialChunk = 16;

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(ErrorCode::Config, where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.contains(key)) fail(ErrorCode::Config, "unknown key '" + key + "' in " + where);
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::Config, where + "." + key + ": " + e.what());
  }
  return T{};
}

template <class T>
void get_opt(const json& j, const std::string& key, const std::string& where, T& out) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

std::uint64_t get_count(const json& j, const std::string& key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    fail(ErrorCode::Config, where + "." + key + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

Regime::Kind parse_kind(const std::string& s) {
  if (s == "sub") return Regime::Kind::Sub;
  if (s == "critical") return Regime::Kind::Critical;
  if (s == "super") return Regime::Kind::Super;
  fail(ErrorCode::Config, "regime.kind must be sub, critical or super, got '" + s + "'");
  return Regime::Kind::Sub;
}

const char* kind_name(Regime::Kind k) {
  switch (k) {
    case Regime::Kind::Sub: return "sub";
    case Regime::Kind::Critical: return "critical";
    case Regime::Kind::Super: return "super";
  }
  return "";
}

}  // namespace

double RegimeRule::delta(double t, int d) const {
  require(t > 0.0, ErrorCode::InvalidParameter, "intensity must be positive");
  if (kind == Regime::Kind::Critical) return std::pow(c / t, 1.0 / d);
  return scale * std::pow(t, -beta);
}

Regime RegimeRule::regime() const {
  switch (kind) {
    case Regime::Kind::Sub: return Regime::sub();
    case Regime::Kind::Super: return Regime::super();
    case Regime::Kind::Critical:
      return branch ? Regime::critical(c, *branch) : Regime::critical(c);
  }
  return Regime::sub();
}

void RegimeRule::validate(int d) const {
  const double inv = 1.0 / d;
  switch (kind) {
    case Regime::Kind::Sub:
      require(std::isfinite(scale) && scale > 0.0, ErrorCode::Config, "regime.C must be positive");
      require(beta > inv, ErrorCode::Config, "subcritical rule needs beta > 1/d");
      break;
    case Regime::Kind::Super:
      require(std::isfinite(scale) && scale > 0.0, ErrorCode::Config, "regime.C must be positive");
      require(beta >= 0.0 && beta < inv, ErrorCode::Config,
              "supercritical rule needs 0 <= beta < 1/d");
      break;
    case Regime::Kind::Critical:
      require(std::isfinite(c) && c > 0.0, ErrorCode::Config, "regime.c must be positive");
      try {
        regime();
      } catch (const Error& e) {
        fail(ErrorCode::Config, e.what());
      }
      break;
  }
}

int ExperimentConfig::cap() const {
  if (dimension_cap) return *dimension_cap;
  int k = 0;
  for (const auto& s : sequence) k = std::max(k, s.k);
  if (h_k > 0) k = std::max({k, h_k - 1, d});
  return k;
}

void ExperimentConfig::validate() const {
  require(d >= 1 && d <= 8, ErrorCode::Config, "d must be in 1..8");
  require(!sequence.empty(), ErrorCode::Config, "sequence must not be empty");
  require(trials >= 1, ErrorCode::InsufficientData, "trials must be >= 1");
  require(!t_grid.empty(), ErrorCode::Config, "t_grid must not be empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    require(std::isfinite(t_grid[i]) && t_grid[i] > 0.0, ErrorCode::Config,
            "t_grid entries must be positive");
    require(i == 0 || t_grid[i] > t_grid[i - 1], ErrorCode::Config,
            "t_grid must be strictly increasing");
  }
  rule.validate(d);
  int max_k = 0;
  for (const auto& s : sequence) max_k = std::max(max_k, s.k);
  require(cap() >= max_k, ErrorCode::Config, "dimension_cap is below the largest k");
  require(cap() >= 0, ErrorCode::Config, "dimension_cap must be non-negative");
  require(h_k >= 0, ErrorCode::Config, "hvector.k must be non-negative");
  if (h_k > 0)
    require(cap() >= d, ErrorCode::Config, "the h-functional needs dimension_cap >= d");
  require(enumeration_budget > 0, ErrorCode::Config, "enumeration_budget must be positive");
  require(moments.samples >= 1000, ErrorCode::Config, "moments.samples must be >= 1000");
  require(z_tolerance > 0.0 && relative_tolerance >= 0.0, ErrorCode::Config,
          "tolerances must be positive");
  if (periodic) {
    for (double t : t_grid)
      require(rule.delta(t, d) < 0.5, ErrorCode::Config,
              "periodic windows need delta < 1/2 at every t");
  }
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::Config, std::string("invalid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"d", "sequence", "regime", "t_grid", "trials", "seed", "moments", "dimension_cap",
              "periodic", "enumeration_budget", "output_dir", "tolerances", "hvector"});
  for (const char* key : {"d", "sequence", "regime", "t_grid"})
    if (!j.contains(key)) fail(ErrorCode::Config, std::string("missing required key '") + key + "'");

  ExperimentConfig c;
  c.d = get<int>(j, "d", "config");

  const auto& seq = j.at("sequence");
  if (!seq.is_array()) fail(ErrorCode::Config, "sequence must be an array of [k, alpha] pairs");
  for (const auto& e : seq) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number())
      fail(ErrorCode::Config, "sequence entries must be [k, alpha] with integer k");
    c.sequence.push_back({e[0].get<int>(), e[1].get<double>()});
  }

  const auto& r = j.at("regime");
  check_keys(r, "regime", {"kind", "C", "beta", "c", "branch"});
  c.rule.kind = parse_kind(get<std::string>(r, "kind", "regime"));
  get_opt(r, "C", "regime", c.rule.scale);
  get_opt(r, "beta", "regime", c.rule.beta);
  get_opt(r, "c", "regime", c.rule.c);
  if (r.contains("branch")) {
    const auto b = get<std::string>(r, "branch", "regime");
    if (b == "low") c.rule.branch = Regime::Branch::Low;
    else if (b == "high") c.rule.branch = Regime::Branch::High;
    else fail(ErrorCode::Config, "regime.branch must be low or high");
  }

  c.t_grid = get<std::vector<double>>(j, "t_grid", "config");
  if (j.contains("trials")) c.trials = get_count(j, "trials", "config");
  if (j.contains("seed")) c.seed = get_count(j, "seed", "config");

  if (j.contains("moments")) {
    const auto& m = j.at("moments");
    check_keys(m, "moments", {"samples", "seed", "table", "closed_form_k1"});
    if (m.contains("samples")) c.moments.samples = get_count(m, "samples", "moments");
    if (m.contains("seed")) c.moments.seed = get_count(m, "seed", "moments");
    if (m.contains("table")) c.moment_table = get<std::string>(m, "table", "moments");
    get_opt(m, "closed_form_k1", "moments", c.moments.closed_form_k1);
  }
  if (j.contains("dimension_cap") && !j.at("dimension_cap").is_null())
    c.dimension_cap = get<int>(j, "dimension_cap", "config");
  get_opt(j, "periodic", "config", c.periodic);
  if (j.contains("enumeration_budget"))
    c.enumeration_budget = get_count(j, "enumeration_budget", "config");
  if (j.contains("output_dir")) c.output_dir = get<std::string>(j, "output_dir", "config");
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    check_keys(t, "tolerances", {"z", "relative"});
    get_opt(t, "z", "tolerances", c.z_tolerance);
    get_opt(t, "relative", "tolerances", c.relative_tolerance);
  }
  if (j.contains("hvector")) {
    const auto& h = j.at("hvector");
    check_keys(h, "hvector", {"k", "l_rule"});
    get_opt(h, "k", "hvector", c.h_k);
    if (h.contains("l_rule")) {
      const auto rule = get<std::string>(h, "l_rule", "hvector");
      if (rule == "min_dim_plus_one") c.h_rule = HLengthRule::MinOfDimensionPlusOne;
      else if (rule == "min_then_plus_one") c.h_rule = HLengthRule::MinThenPlusOne;
      else fail(ErrorCode::Config, "hvector.l_rule must be min_dim_plus_one or min_then_plus_one");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return from_json(os.str());
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["d"] = d;
  j["sequence"] = json::array();
  for (const auto& s : sequence) j["sequence"].push_back({s.k, s.alpha});
  json r;
  r["kind"] = kind_name(rule.kind);
  if (rule.kind == Regime::Kind::Critical) {
    r["c"] = rule.c;
    if (rule.branch) r["branch"] = *rule.branch == Regime::Branch::Low ? "low" : "high";
  } else {
    r["C"] = rule.scale;
    r["beta"] = rule.beta;
  }
  j["regime"] = r;
  j["t_grid"] = t_grid;
  j["trials"] = trials;
  j["seed"] = seed;
  json m;
  m["samples"] = moments.samples;
  m["seed"] = moments.seed;
  m["closed_form_k1"] = moments.closed_form_k1;
  if (moment_table) m["table"] = moment_table->string();
  j["moments"] = m;
  if (dimension_cap) j["dimension_cap"] = *dimension_cap;
  j["periodic"] = periodic;
  j["enumeration_budget"] = enumeration_budget;
  j["output_dir"] = output_dir.string();
  j["tolerances"] = {{"z", z_tolerance}, {"relative", relative_tolerance}};
  if (h_k > 0)
    j["hvector"] = {{"k", h_k},
                    {"l_rule", h_rule == HLengthRule::MinOfDimensionPlusOne ? "min_dim_plus_one"
                                                                             : "min_then_plus_one"}};
  return j.dump(2) + "\n";
}

TrialOutcome run_trial(const ExperimentConfig& config, std::size_t t_index, std::uint64_t trial) {
  const double t = config.t_grid.at(t_index);
  const double delta = config.rule.delta(t, config.d);
  const Window window{config.d, config.periodic};
  auto rng = make_engine(config.seed, {static_cast<std::uint64_t>(t_index), trial});
  const auto cloud = sample_poisson(window, t, rng);
  const auto graph = build_neighbor_graph(cloud, delta);
  RipsComplex complex;
  try {
    complex = enumerate_simplices(graph, config.cap(), config.enumeration_budget);
  } catch (const BudgetExceeded& e) {
    std::ostringstream os;
    os << e.what() << " at t=" << t << ", trial " << trial
       << "; raise enumeration_budget or lower dimension_cap in the config";
    throw Error(ErrorCode::BudgetExceeded, os.str());
  }
  TrialOutcome out;
  out.raw = evaluate_functionals(complex, cloud, config.sequence);
  out.f = f_vector(complex, config.cap());
  out.dimension = complex.dimension();
  out.points = cloud.size();
  return out;
}

SimulationResult run_trials(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const std::size_t n = config.sequence.size();
  const int cap = config.cap();
  SimulationResult result;
  for (std::size_t ti = 0; ti < config.t_grid.size(); ++ti) {
    IntensityResult r;
    r.t = config.t_grid[ti];
    r.delta = config.rule.delta(r.t, config.d);
    for (const auto& s : config.sequence) r.q.push_back(normalization_q(r.t, r.delta, s, config.d));
    if (options.keep_raw) {
      r.raw = Matrix(config.trials, n);
      r.f_raw = Matrix(config.trials, static_cast<std::size_t>(cap) + 1);
      r.dimensions.assign(config.trials, -1);
    }
    const std::uint64_t chunks = (config.trials + kTrialChunk - 1) / kTrialChunk;
    std::vector<EmpiricalCovariance> partial(chunks, EmpiricalCovariance(n));
    std::vector<std::uint64_t> points(chunks, 0);
    parallel_for(chunks, options.workers, [&](std::size_t c) {
      const std::uint64_t begin = c * kTrialChunk;
      const std::uint64_t end = std::min(config.trials, begin + kTrialChunk);
      std::vector<double> v(n);
      for (std::uint64_t trial = begin; trial < end; ++trial) {
        const auto o = run_trial(config, ti, trial);
        for (std::size_t i = 0; i < n; ++i) v[i] = o.raw[i] / r.q[i];
        partial[c].add(v);
        points[c] += o.points;
        if (options.keep_raw) {
          for (std::size_t i = 0; i < n; ++i) (*r.raw)(trial, i) = v[i];
          for (std::size_t k = 0; k < o.f.size(); ++k)
            (*r.f_raw)(trial, k) = static_cast<double>(o.f[k]);
          r.dimensions[trial] = o.dimension;
        }
      }
    });
    r.accumulator = EmpiricalCovariance(n);
    for (std::uint64_t c = 0; c < chunks; ++c) {
      r.accumulator.merge(partial[c]);
      r.points_total += points[c];
    }
    result.intensities.push_back(std::move(r));
  }
  return result;
}

CompareReport compare(const SymMatrix& empirical, std::uint64_t trials, const SymMatrix& model,
                      const SymMatrix& model_standard_error, double z_tolerance,
                      double relative_tolerance) {
  const std::size_t n = model.size();
  require(empirical.size() == n && model_standard_error.size() == n, ErrorCode::InvalidParameter,
          "empirical and model matrices differ in size");
  require(trials >= 2, ErrorCode::InsufficientData, "comparison needs at least 2 trials");
  const double dof = static_cast<double>(trials - 1);
  CompareReport out;
  out.pass = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      CompareEntry e;
      e.i = i;
      e.j = j;
      e.empirical = empirical(i, j);
      e.model = model(i, j);
      const double se_emp =
          std::sqrt(std::max(0.0, model(i, i) * model(j, j) + model(i, j) * model(i, j)) / dof);
      e.standard_error = std::hypot(se_emp, model_standard_error(i, j));
      const double diff = e.empirical - e.model;
      e.z = e.standard_error > 0.0 ? diff / e.standard_error
                                   : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
      e.relative = e.model != 0.0 ? diff / std::abs(e.model)
                                  : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
      e.pass = std::abs(e.z) <= z_tolerance || std::abs(e.relative) <= relative_tolerance;
      out.max_abs_z = std::max(out.max_abs_z, std::abs(e.z));
      out.max_abs_relative = std::max(out.max_abs_relative, std::abs(e.relative));
      out.pass = out.pass && e.pass;
      out.entries.push_back(e);
    }
  }
  return out;
}

CompareReport compare(const EmpiricalCovariance& empirical, const CovarianceModel& model,
                      double z_tolerance, double relative_tolerance) {
  return compare(empirical.covariance(), empirical.count(), model.sigma, model.standard_error,
                 z_tolerance, relative_tolerance);
}

MomentTable prepare_moments(const ExperimentConfig& config, unsigned workers) {
  MomentTable table(config.d);
  if (config.moment_table && std::filesystem::exists(*config.moment_table)) {
    table = MomentTable::load(*config.moment_table);
    require(table.dimension() == config.d, ErrorCode::Config,
            "moment table dimension does not match d");
  }
  auto options = config.moments;
  options.workers = workers;
  ensure_moments(table, config.sequence, options);
  if (config.h_k > 0) {
    const auto h = h_sequence(config.h_k, config.d);
    ensure_moments(table, h.specs, options);
  }
  return table;
}

}  // namespace vrcov
