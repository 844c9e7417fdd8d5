#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gronwall/analytic.hpp"
#include "gronwall/config.hpp"
#include "gronwall/report.hpp"
#include "gronwall/verify.hpp"

namespace gronwall {

struct ExperimentOutput {
  std::string name;
  bool pass = false;
  nlohmann::json json;
  Table table;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline MartingaleModel build_model(const ExperimentSpec& spec) {
  if (spec.model == "stopped-bm") {
    StoppedBm m;
    m.barrier = spec.barrier;
    m.dt = spec.dt;
    m.horizon = spec.horizon > 0.0 ? spec.horizon : 1000.0;
    return m;
  }
  if (spec.model == "exit-bm") {
    ExitBm m;
    m.lower = spec.lower;
    m.upper = spec.upper;
    m.dt = spec.dt;
    m.horizon = spec.horizon > 0.0 ? spec.horizon : 50.0;
    return m;
  }
  if (spec.model == "sigma-integral") {
    SigmaIntegral m;
    m.sigma = PiecewiseConstant::constant(spec.sigma);
    m.dt = spec.dt;
    m.horizon = spec.horizon > 0.0 ? spec.horizon : 1.0;
    return m;
  }
  throw config_error("unknown model '" + spec.model +
                     "' (want stopped-bm | exit-bm | sigma-integral)");
}

inline GronwallScenario build_scenario(const ExperimentSpec& spec) {
  GronwallScenario scn;
  scn.x0 = spec.x0;
  scn.dt = spec.dt;
  scn.horizon = spec.horizon > 0.0 ? spec.horizon : 1.0;
  scn.slack_noise = spec.slack_noise;
  if (spec.feedback) {
    scn.sign_feedback = true;
    scn.feedback_rate = spec.drift;
  } else {
    if (spec.drift < 0.0)
      throw config_error("gronwall drift must be >= 0 (psi nonnegative)");
    scn.drift = PiecewiseConstant::constant(spec.drift);
  }
  return scn;
}

inline std::vector<std::string> estimate_row(const EstimateWithCI& e) {
  return {format_double(e.mean), format_double(e.half_width),
          std::to_string(e.n)};
}

inline ExperimentOutput run_constants(const ExperimentSpec& spec) {
  ExperimentOutput out;
  std::vector<double> grid = spec.p_grid;
  if (grid.empty()) grid = parse_grid("0.01:0.99:0.01");
  out.table.columns = {"p", "pi_p_over_sin", "c_p", "improved_constant"};
  nlohmann::json rows = nlohmann::json::array();
  for (double pv : grid) {
    const Exponent p(pv);
    const double base = pi_p_over_sin(p);
    const double cp = burkholder_constant(p);
    const double improved = base * optimize_prefactor(p).value;
    out.table.add_row({format_double(pv), format_double(base),
                       format_double(cp), format_double(improved)});
    rows.push_back({{"p", pv},
                    {"pi_p_over_sin", base},
                    {"c_p", cp},
                    {"improved_constant", improved}});
  }
  out.json["rows"] = rows;
  out.pass = true;
  return out;
}

inline ExperimentOutput run_prop1(const ExperimentSpec& spec,
                                  const RngStream& rng) {
  ExperimentOutput out;
  const Exponent p(spec.p);
  const InequalityReport rep =
      verify_prop1(build_model(spec), p, spec.n, rng);
  out.pass = rep.verdict == Verdict::Pass;
  out.json["report"] = rep;
  out.table = report_table({rep});
  return out;
}

inline ExperimentOutput run_sharpness(const ExperimentSpec& spec,
                                      const RngStream& rng) {
  ExperimentOutput out;
  const Exponent p(spec.p);
  const SharpnessResult res = sharpness_ratio(p, spec.n, rng);
  const double branch = std::min(4.0, 1.0 / spec.p);
  const bool identity_ok =
      std::abs(res.c_p - res.gap_factor * res.ratio_truth) <= 1e-9 &&
      std::abs(res.gap_factor - branch) <= 1e-9;
  const bool covered =
      std::abs(res.ratio.mean - res.ratio_truth) <= res.ratio.half_width;
  out.pass = identity_ok && covered;
  out.json = {{"ratio_mean", res.ratio.mean},
              {"ratio_half_width", res.ratio.half_width},
              {"ratio_truth", res.ratio_truth},
              {"c_p", res.c_p},
              {"gap_factor", res.gap_factor}};
  out.table.columns = {"p", "ratio_mean", "ratio_half_width", "ratio_truth",
                       "c_p", "gap_factor"};
  out.table.add_row({format_double(spec.p), format_double(res.ratio.mean),
                     format_double(res.ratio.half_width),
                     format_double(res.ratio_truth), format_double(res.c_p),
                     format_double(res.gap_factor)});
  return out;
}

inline ExperimentOutput run_divergence(const ExperimentSpec& spec,
                                       const RngStream& rng) {
  ExperimentOutput out;
  std::vector<double> grid = spec.k_grid;
  if (grid.empty()) {
    grid = {std::exp(1.0) - 1.0, std::exp(2.0) - 1.0, std::exp(3.0) - 1.0};
  }
  const auto rows = divergence_demo(grid, spec.n, rng);
  out.table.columns = {"K", "mc_mean", "mc_half_width", "analytic"};
  nlohmann::json jrows = nlohmann::json::array();
  bool pass = true;
  double prev = -1.0;
  for (const auto& row : rows) {
    if (std::abs(row.truncated_mean.mean - row.analytic) >
        row.truncated_mean.half_width)
      pass = false;
    if (!(row.truncated_mean.mean > prev)) pass = false;
    prev = row.truncated_mean.mean;
    out.table.add_row({format_double(row.K),
                       format_double(row.truncated_mean.mean),
                       format_double(row.truncated_mean.half_width),
                       format_double(row.analytic)});
    jrows.push_back({{"K", row.K},
                     {"mc_mean", row.truncated_mean.mean},
                     {"mc_half_width", row.truncated_mean.half_width},
                     {"analytic", row.analytic}});
  }
  out.json["rows"] = jrows;
  out.pass = pass;
  return out;
}

inline ExperimentOutput run_jump(const ExperimentSpec& spec) {
  ExperimentOutput out;
  const Exponent p(spec.p);
  std::vector<double> q_grid = spec.q_grid;
  if (q_grid.empty()) q_grid = {0.5, 0.75, 0.9, 1.0, 1.5};
  std::vector<double> delta_grid = spec.delta_grid;
  if (delta_grid.empty()) {
    delta_grid = parse_grid("0.1:0.9:0.1");
    for (int k = 2; k <= 6; ++k)
      delta_grid.push_back(1.0 - std::pow(10.0, -k));
  }
  const auto rows = jump_necessity_scan(p, q_grid, delta_grid);
  out.table.columns = {"q", "grid_supremum", "argmax_delta", "flag"};
  nlohmann::json jrows = nlohmann::json::array();
  bool pass = true;
  for (const auto& row : rows) {
    // q >= 1 must be a bounded family; q < 1 must keep growing.
    if (row.q >= 1.0 &&
        (row.grid_supremum > 1.0 + 1e-12 || row.unbounded_trend))
      pass = false;
    if (row.q < 1.0 && !row.unbounded_trend) pass = false;
    const char* flag = row.unbounded_trend ? "UNBOUNDED-TREND" : "BOUNDED";
    out.table.add_row({format_double(row.q), format_double(row.grid_supremum),
                       format_double(row.argmax_delta), flag});
    jrows.push_back({{"q", row.q},
                     {"grid_supremum", row.grid_supremum},
                     {"argmax_delta", row.argmax_delta},
                     {"flag", flag}});
  }
  out.json["rows"] = jrows;
  out.pass = pass;
  return out;
}

inline ExperimentOutput run_gronwall(const ExperimentSpec& spec,
                                     const RngStream& rng) {
  ExperimentOutput out;
  const Exponent p(spec.p);
  std::optional<HolderPair> pair;
  if (spec.mu > 0.0 || spec.nu > 0.0) {
    pair.emplace(spec.mu, spec.nu);
    if (!(spec.p * pair->nu() < 1.0))
      throw config_error("gronwall: constraint p * nu < 1 violated");
  }
  const GronwallReports reps =
      verify_gronwall(build_scenario(spec), p, pair, spec.n, rng);
  std::vector<InequalityReport> flat;
  nlohmann::json jreps = nlohmann::json::object();
  bool pass = true;
  const auto take = [&](const char* key,
                        const std::optional<InequalityReport>& r) {
    if (!r) return;
    flat.push_back(*r);
    jreps[key] = *r;
    if (r->verdict != Verdict::Pass) pass = false;
  };
  take("eins", reps.eins);
  take("zwei", reps.zwei);
  take("drei", reps.drei);
  out.json["reports"] = jreps;
  out.table = report_table(flat);
  out.pass = pass;
  return out;
}

inline ExperimentOutput run_estim(const ExperimentSpec& spec,
                                  const RngStream& rng) {
  ExperimentOutput out;
  std::vector<double> dt_grid = spec.dt_grid;
  if (dt_grid.empty()) dt_grid = {1e-2, 1e-3, 1e-4};
  const auto rows =
      verify_estim_pathwise(build_scenario(spec), dt_grid, spec.paths, rng);
  out.table.columns = {"dt", "max_violation"};
  nlohmann::json jrows = nlohmann::json::array();
  bool pass = true;
  for (std::size_t g = 0; g < rows.size(); ++g) {
    if (g > 0 && !(rows[g].max_violation < rows[g - 1].max_violation))
      pass = false;
    out.table.add_row({format_double(rows[g].dt),
                       format_double(rows[g].max_violation)});
    jrows.push_back(
        {{"dt", rows[g].dt}, {"max_violation", rows[g].max_violation}});
  }
  if (!rows.empty() && rows.back().max_violation > spec.violation_ceiling)
    pass = false;
  out.json["rows"] = jrows;
  out.json["violation_ceiling"] = spec.violation_ceiling;
  out.pass = pass;
  return out;
}

inline ExperimentOutput run_ladder(const ExperimentSpec& spec,
                                   const RngStream& rng) {
  ExperimentOutput out;
  const Exponent p(spec.p);
  std::vector<double> gammas = spec.ladder_gammas;
  if (gammas.empty()) gammas = {1.5, std::pow(2.0, 1.0 / spec.p)};
  out.table.columns = {"gamma", "lhs_mean", "lhs_half_width", "chain_bound",
                       "verdict"};
  nlohmann::json jrows = nlohmann::json::array();
  bool pass = true;
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    const GeometricLadder ladder(spec.ladder_c, gammas[g], spec.ladder_depth);
    const LadderChainResult res =
        estimate_ladder_chain(p, ladder, spec.n, rng.substream(g));
    const bool ok = res.lhs.lower() <= res.chain_bound;
    if (!ok) pass = false;
    out.table.add_row({format_double(gammas[g]),
                       format_double(res.lhs.mean),
                       format_double(res.lhs.half_width),
                       format_double(res.chain_bound),
                       ok ? "PASS" : "FAIL"});
    jrows.push_back({{"gamma", gammas[g]},
                     {"lhs", res.lhs},
                     {"chain_bound", res.chain_bound},
                     {"verdict", ok ? "PASS" : "FAIL"}});
  }
  out.json["rows"] = jrows;
  out.pass = pass;
  return out;
}

}  // namespace detail

/// Executes one experiment.  The stream family is derived from the global
/// seed and the experiment name, so results do not depend on the order or
/// concurrency of execution.
inline ExperimentOutput run_experiment(const ExperimentSpec& spec,
                                       std::uint64_t seed) {
  const RngStream rng(seed, detail::fnv1a(spec.name));
  ExperimentOutput out;
  switch (spec.target) {
    case Target::Constants: out = detail::run_constants(spec); break;
    case Target::Prop1: out = detail::run_prop1(spec, rng); break;
    case Target::Sharpness: out = detail::run_sharpness(spec, rng); break;
    case Target::Divergence: out = detail::run_divergence(spec, rng); break;
    case Target::Jump: out = detail::run_jump(spec); break;
    case Target::Gronwall: out = detail::run_gronwall(spec, rng); break;
    case Target::Estim: out = detail::run_estim(spec, rng); break;
    case Target::Ladder: out = detail::run_ladder(spec, rng); break;
  }
  out.name = spec.name;
  out.json["schema_version"] = kReportSchemaVersion;
  out.json["name"] = spec.name;
  out.json["target"] = to_string(spec.target);
  out.json["seed"] = seed;
  out.json["pass"] = out.pass;
  return out;
}

/// Runs every experiment in the config over a worker pool, writes one
/// report file per experiment plus a summary, and returns the process
/// exit code: 0 all pass, 1 any fail.
inline int run_config(const RunConfig& cfg, std::ostream& log) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);

  std::vector<ExperimentOutput> outputs(cfg.experiments.size());
  std::mutex log_mutex;
  std::size_t next = 0;
  std::mutex next_mutex;
  const auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lk(next_mutex);
        if (next >= cfg.experiments.size()) return;
        i = next++;
      }
      outputs[i] = run_experiment(cfg.experiments[i], cfg.seed);
      std::lock_guard lk(log_mutex);
      log << "done " << outputs[i].name << ": "
          << (outputs[i].pass ? "PASS" : "FAIL") << "\n";
    }
  };
  const unsigned nworkers =
      std::max(1u, std::min<unsigned>(cfg.workers,
                                      cfg.experiments.size()));
  if (nworkers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nworkers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  Table summary;
  summary.columns = {"index", "name", "verdict"};
  bool all_pass = true;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto& out = outputs[i];
    if (cfg.write_json) {
      write_text_file(cfg.out_dir + "/" + out.name + ".json",
                      out.json.dump(2) + "\n");
    }
    if (cfg.write_csv && !out.table.columns.empty()) {
      write_text_file(cfg.out_dir + "/" + out.name + ".csv",
                      to_csv(out.table));
    }
    summary.add_row({std::to_string(i + 1), out.name,
                     out.pass ? "PASS" : "FAIL"});
    if (!out.pass) all_pass = false;
  }
  write_text_file(cfg.out_dir + "/summary.csv", to_csv(summary));
  return all_pass ? 0 : 1;
}

/// The built-in full suite behind the `all` subcommand.
inline std::vector<ExperimentSpec> builtin_suite() {
  std::vector<ExperimentSpec> specs;
  const auto add = [&](ExperimentSpec s) { specs.push_back(std::move(s)); };

  {
    ExperimentSpec s;
    s.name = "constants";
    s.target = Target::Constants;
    add(s);
  }
  {
    ExperimentSpec s;
    s.name = "prop1-stopped-bm";
    s.target = Target::Prop1;
    s.model = "stopped-bm";
    s.p = 0.25;
    s.n = 100000;
    add(s);
  }
  {
    ExperimentSpec s;
    s.name = "prop1-exit-bm";
    s.target = Target::Prop1;
    s.model = "exit-bm";
    s.p = 0.5;
    s.n = 20000;
    add(s);
  }
  {
    ExperimentSpec s;
    s.name = "prop1-sigma-integral";
    s.target = Target::Prop1;
    s.model = "sigma-integral";
    s.p = 0.5;
    s.n = 20000;
    add(s);
  }
  {
    ExperimentSpec s;
    s.name = "sharpness";
    s.target = Target::Sharpness;
    s.p = 0.25;
    s.n = 1000000;
    add(s);
  }
  {
    ExperimentSpec s;
    s.name = "divergence";
    s.target = Target::Divergence;
    s.n = 200000;
    add(s);
  }
  {
    ExperimentSpec s;
    s.name = "jump";
    s.target = Target::Jump;
    s.p = 0.5;
    add(s);
  }
  {
    ExperimentSpec s;
    s.name = "gronwall-psi0";
    s.target = Target::Gronwall;
    s.p = 0.25;
    s.n = 20000;
    s.mu = 2.0;
    s.nu = 2.0;
    add(s);
  }
  {
    ExperimentSpec s;
    s.name = "gronwall-det-psi";
    s.target = Target::Gronwall;
    s.p = 0.25;
    s.drift = 0.5;
    s.n = 20000;
    s.mu = 2.0;
    s.nu = 2.0;
    add(s);
  }
  {
    ExperimentSpec s;
    s.name = "gronwall-feedback";
    s.target = Target::Gronwall;
    s.p = 0.2;
    s.drift = 1.0;
    s.feedback = true;
    s.n = 20000;
    s.mu = 2.0;
    s.nu = 2.0;
    add(s);
  }
  {
    ExperimentSpec s;
    s.name = "estim-pathwise";
    s.target = Target::Estim;
    s.drift = 0.5;
    s.paths = 1000;
    add(s);
  }
  {
    ExperimentSpec s;
    s.name = "ladder-p025";
    s.target = Target::Ladder;
    s.p = 0.25;
    s.n = 100000;
    add(s);
  }
  {
    ExperimentSpec s;
    s.name = "ladder-p05";
    s.target = Target::Ladder;
    s.p = 0.5;
    s.n = 100000;
    add(s);
  }
  return specs;
}

}  // namespace gronwall
