// Command-line front end: runs the verification experiments and writes
// CSV/JSON reports.  Exit codes: 0 all verdicts pass, 1 any fail,
// 2 configuration or validation error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gronwall/config.hpp"
#include "gronwall/runner.hpp"

namespace {

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("GRONWALL_LAB_SEED");
  if (raw == nullptr) return std::nullopt;
  try {
    return std::stoull(raw);
  } catch (const std::exception&) {
    throw gronwall::config_error(
        "GRONWALL_LAB_SEED is not an unsigned integer");
  }
}

struct GlobalOpts {
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out_dir = "out";
  std::string format = "json,csv";
};

void apply_globals(gronwall::RunConfig& cfg, const GlobalOpts& g) {
  auto seed = g.seed;
  if (!seed) seed = env_seed();
  if (!seed) {
    throw gronwall::config_error(
        "no seed given: pass --seed or set GRONWALL_LAB_SEED "
        "(runs are never seeded from the clock)");
  }
  cfg.seed = *seed;
  cfg.seed_set = true;
  cfg.workers = g.workers;
  cfg.out_dir = g.out_dir;
  cfg.write_json = g.format.find("json") != std::string::npos;
  cfg.write_csv = g.format.find("csv") != std::string::npos;
  if (!cfg.write_json && !cfg.write_csv)
    throw gronwall::config_error("--format must include json and/or csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the Burkholder martingale "
               "inequality and the stochastic Gronwall bounds"};
  app.require_subcommand(1);

  GlobalOpts globals;
  gronwall::ExperimentSpec spec;
  std::string config_path;
  std::string p_grid_text, k_grid_text, q_grid_text, delta_grid_text,
      dt_grid_text, gammas_text;

  const auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--seed", globals.seed, "global RNG seed (mandatory)");
    sub->add_option("--workers", globals.workers, "worker thread count");
    sub->add_option("--out", globals.out_dir, "output directory");
    sub->add_option("--format", globals.format,
                    "output formats, e.g. json,csv");
  };

  auto* run_cmd = app.add_subcommand("run", "run experiments from a config file");
  run_cmd->add_option("config", config_path, "config file path")->required();
  run_cmd->add_option("--seed", globals.seed, "override the config seed");
  run_cmd->add_option("--workers", globals.workers, "override worker count");

  auto* constants_cmd =
      app.add_subcommand("constants", "tabulate c_p and friends over a p grid");
  constants_cmd->add_option("--p-grid", p_grid_text,
                            "grid start:stop:step or comma list");
  add_globals(constants_cmd);

  auto* prop1_cmd = app.add_subcommand(
      "prop1", "verify the martingale inequality on one model");
  prop1_cmd->add_option("--model", spec.model,
                        "stopped-bm | exit-bm | sigma-integral");
  prop1_cmd->add_option("--p", spec.p, "moment exponent in (0,1)");
  prop1_cmd->add_option("--b", spec.barrier, "stopped-bm barrier");
  prop1_cmd->add_option("--lower", spec.lower, "exit-bm lower barrier");
  prop1_cmd->add_option("--upper", spec.upper, "exit-bm upper barrier");
  prop1_cmd->add_option("--sigma", spec.sigma, "sigma-integral integrand");
  prop1_cmd->add_option("--n", spec.n, "sample count");
  prop1_cmd->add_option("--dt", spec.dt, "time step for grid models");
  prop1_cmd->add_option("--T", spec.horizon, "horizon for grid models");
  add_globals(prop1_cmd);

  auto* sharp_cmd = app.add_subcommand(
      "sharpness", "extremal-ratio experiment (factor 4 min 1/p gap)");
  sharp_cmd->add_option("--p", spec.p, "moment exponent in (0,1)");
  sharp_cmd->add_option("--n", spec.n, "sample count");
  add_globals(sharp_cmd);

  auto* div_cmd = app.add_subcommand(
      "divergence", "truncated p=1 moments vs log(1+K)");
  div_cmd->add_option("--k-grid", k_grid_text, "truncation levels");
  div_cmd->add_option("--n", spec.n, "sample count");
  add_globals(div_cmd);

  auto* jump_cmd = app.add_subcommand(
      "jump", "moment-ratio scan for the single-jump martingale");
  jump_cmd->add_option("--p", spec.p, "moment exponent in (0,1)");
  jump_cmd->add_option("--q-grid", q_grid_text, "q values to scan");
  jump_cmd->add_option("--delta-grid", delta_grid_text, "delta values");
  add_globals(jump_cmd);

  auto* gron_cmd = app.add_subcommand(
      "gronwall", "verify the three Gronwall moment bounds on a scenario");
  gron_cmd->add_option("--p", spec.p, "moment exponent in (0,1)");
  gron_cmd->add_option("--mu", spec.mu, "Holder mu (with --nu enables eins)");
  gron_cmd->add_option("--nu", spec.nu, "Holder nu");
  gron_cmd->add_option("--x0", spec.x0, "initial state");
  gron_cmd->add_option("--psi", spec.drift,
                       "drift rate a; psi = 2a (constant schedule)");
  gron_cmd->add_flag("--feedback", spec.feedback,
                     "adapted sign-feedback drift a 1{X>=0}");
  gron_cmd->add_option("--slack-noise", spec.slack_noise,
                       "extra per-path slack added to H");
  gron_cmd->add_option("--n", spec.n, "path count");
  gron_cmd->add_option("--dt", spec.dt, "time step");
  gron_cmd->add_option("--T", spec.horizon, "horizon");
  add_globals(gron_cmd);

  auto* estim_cmd = app.add_subcommand(
      "estim", "pathwise integrating-factor inequality across dt levels");
  estim_cmd->add_option("--psi", spec.drift, "drift rate a; psi = 2a");
  estim_cmd->add_option("--dt-grid", dt_grid_text, "dt levels, decreasing");
  estim_cmd->add_option("--paths", spec.paths, "paths per dt level");
  estim_cmd->add_option("--violation-ceiling", spec.violation_ceiling,
                        "allowed max violation at the finest dt");
  add_globals(estim_cmd);

  auto* ladder_cmd = app.add_subcommand(
      "ladder", "ladder-decomposition chain bound vs MC moment");
  ladder_cmd->add_option("--p", spec.p, "moment exponent in (0,1)");
  ladder_cmd->add_option("--c", spec.ladder_c, "base level");
  ladder_cmd->add_option("--gammas", gammas_text, "level ratios to test");
  ladder_cmd->add_option("--depth", spec.ladder_depth, "ladder depth");
  ladder_cmd->add_option("--n", spec.n, "sample count");
  add_globals(ladder_cmd);

  auto* all_cmd = app.add_subcommand("all", "run the built-in full suite");
  add_globals(all_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    gronwall::RunConfig cfg;
    if (run_cmd->parsed()) {
      cfg = gronwall::parse_config_file(config_path);
      if (globals.seed) cfg.seed = *globals.seed;
      if (run_cmd->count("--workers")) cfg.workers = globals.workers;
    } else {
      apply_globals(cfg, globals);
      if (all_cmd->parsed()) {
        cfg.experiments = gronwall::builtin_suite();
      } else {
        if (!p_grid_text.empty()) spec.p_grid = gronwall::parse_grid(p_grid_text);
        if (!k_grid_text.empty()) spec.k_grid = gronwall::parse_grid(k_grid_text);
        if (!q_grid_text.empty()) spec.q_grid = gronwall::parse_grid(q_grid_text);
        if (!delta_grid_text.empty())
          spec.delta_grid = gronwall::parse_grid(delta_grid_text);
        if (!dt_grid_text.empty())
          spec.dt_grid = gronwall::parse_grid(dt_grid_text);
        if (!gammas_text.empty())
          spec.ladder_gammas = gronwall::parse_grid(gammas_text);
        if (constants_cmd->parsed()) spec.target = gronwall::Target::Constants;
        if (prop1_cmd->parsed()) spec.target = gronwall::Target::Prop1;
        if (sharp_cmd->parsed()) spec.target = gronwall::Target::Sharpness;
        if (div_cmd->parsed()) spec.target = gronwall::Target::Divergence;
        if (jump_cmd->parsed()) spec.target = gronwall::Target::Jump;
        if (gron_cmd->parsed()) spec.target = gronwall::Target::Gronwall;
        if (estim_cmd->parsed()) spec.target = gronwall::Target::Estim;
        if (ladder_cmd->parsed()) spec.target = gronwall::Target::Ladder;
        spec.name = gronwall::to_string(spec.target);
        cfg.experiments = {spec};
      }
    }
    return gronwall::run_config(cfg, std::cout);
  } catch (const gronwall::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
