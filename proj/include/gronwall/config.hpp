#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gronwall {

/// Config / CLI validation failure; message carries the offending line.
class config_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Target {
  Constants,
  Prop1,
  Sharpness,
  Divergence,
  Jump,
  Gronwall,
  Estim,
  Ladder,
};

inline Target parse_target(const std::string& s) {
  if (s == "constants") return Target::Constants;
  if (s == "prop1") return Target::Prop1;
  if (s == "sharpness") return Target::Sharpness;
  if (s == "divergence") return Target::Divergence;
  if (s == "jump") return Target::Jump;
  if (s == "gronwall") return Target::Gronwall;
  if (s == "estim") return Target::Estim;
  if (s == "ladder") return Target::Ladder;
  throw config_error("unknown target: " + s);
}

inline std::string to_string(Target t) {
  switch (t) {
    case Target::Constants: return "constants";
    case Target::Prop1: return "prop1";
    case Target::Sharpness: return "sharpness";
    case Target::Divergence: return "divergence";
    case Target::Jump: return "jump";
    case Target::Gronwall: return "gronwall";
    case Target::Estim: return "estim";
    case Target::Ladder: return "ladder";
  }
  return "?";
}

/// Inclusive grid "start:stop:step" (endpoints included within step/2),
/// or a plain comma list "a,b,c".
inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double start, stop, step;
    char c1, c2;
    std::istringstream is(text);
    if (!(is >> start >> c1 >> stop >> c2 >> step) || c1 != ':' ||
        c2 != ':' || !(step > 0.0)) {
      throw config_error("bad grid syntax (want start:stop:step): " + text);
    }
    for (double x = start; x <= stop + step / 2.0; x += step)
      out.push_back(x);
    return out;
  }
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw config_error("bad number in list: " + item);
    }
  }
  if (out.empty()) throw config_error("empty grid: " + text);
  return out;
}

/// One experiment to run.  Fields beyond (name, target) are read only by
/// the targets that use them.
struct ExperimentSpec {
  std::string name;
  Target target = Target::Constants;

  double p = 0.25;
  std::size_t n = 100000;
  double dt = 1e-3;

  // prop1 models
  std::string model = "stopped-bm";  // stopped-bm | exit-bm | sigma-integral
  double barrier = 1.0;              // stopped-bm
  double lower = 1.0, upper = 1.0;   // exit-bm
  double sigma = 1.0;                // sigma-integral
  double horizon = 0.0;              // 0 = per-model default

  // gronwall scenarios
  double x0 = 1.0;
  double drift = 0.0;      // constant a(s); psi = 2 a
  bool feedback = false;   // a(s) = drift * 1{X >= 0}
  double slack_noise = 0.0;
  double mu = 0.0, nu = 0.0;  // 0 = skip (eins)

  // grids
  std::vector<double> k_grid;      // divergence truncation levels
  std::vector<double> q_grid;      // jump scan
  std::vector<double> delta_grid;  // jump scan
  std::vector<double> dt_grid;     // pathwise estim
  std::vector<double> p_grid;      // constants

  // ladder
  double ladder_c = 0.1;
  std::vector<double> ladder_gammas;
  int ladder_depth = 64;

  // pathwise estim
  std::size_t paths = 1000;
  double violation_ceiling = 0.08;  // at the finest dt; calibrated, not proven
};

struct RunConfig {
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned workers = 1;
  std::string out_dir = "out";
  bool write_json = true;
  bool write_csv = true;
  std::vector<ExperimentSpec> experiments;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline void apply_spec_key(ExperimentSpec& spec, const std::string& key,
                           const std::string& value, int line_no) {
  const auto fail = [&](const std::string& why) {
    throw config_error("line " + std::to_string(line_no) + ": " + why);
  };
  try {
    if (key == "target") spec.target = parse_target(value);
    else if (key == "p") spec.p = std::stod(value);
    else if (key == "n") spec.n = std::stoull(value);
    else if (key == "dt") spec.dt = std::stod(value);
    else if (key == "model") spec.model = value;
    else if (key == "b" || key == "barrier") spec.barrier = std::stod(value);
    else if (key == "lower") spec.lower = std::stod(value);
    else if (key == "upper") spec.upper = std::stod(value);
    else if (key == "sigma") spec.sigma = std::stod(value);
    else if (key == "horizon" || key == "T") spec.horizon = std::stod(value);
    else if (key == "x0") spec.x0 = std::stod(value);
    else if (key == "drift") spec.drift = std::stod(value);
    else if (key == "feedback") spec.feedback = value == "true" || value == "1";
    else if (key == "slack-noise") spec.slack_noise = std::stod(value);
    else if (key == "mu") spec.mu = std::stod(value);
    else if (key == "nu") spec.nu = std::stod(value);
    else if (key == "k-grid") spec.k_grid = parse_grid(value);
    else if (key == "q-grid") spec.q_grid = parse_grid(value);
    else if (key == "delta-grid") spec.delta_grid = parse_grid(value);
    else if (key == "dt-grid") spec.dt_grid = parse_grid(value);
    else if (key == "p-grid") spec.p_grid = parse_grid(value);
    else if (key == "ladder-c") spec.ladder_c = std::stod(value);
    else if (key == "ladder-gammas") spec.ladder_gammas = parse_grid(value);
    else if (key == "ladder-depth") spec.ladder_depth = std::stoi(value);
    else if (key == "paths") spec.paths = std::stoull(value);
    else if (key == "violation-ceiling")
      spec.violation_ceiling = std::stod(value);
    else fail("unknown key '" + key + "'");
  } catch (const config_error&) {
    throw;
  } catch (const std::exception&) {
    fail("bad value '" + value + "' for key '" + key + "'");
  }
}

}  // namespace detail

/// Key-value header plus one [section] per experiment.  Errors carry the
/// 1-based line number.
inline RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  ExperimentSpec* current = nullptr;
  std::string line;
  int line_no = 0;
  std::map<std::string, int> seen_names;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw config_error("line " + std::to_string(line_no) +
                           ": unterminated section header");
      const std::string name = detail::trim(t.substr(1, t.size() - 2));
      if (name.empty())
        throw config_error("line " + std::to_string(line_no) +
                           ": empty experiment name");
      if (seen_names.count(name))
        throw config_error("line " + std::to_string(line_no) +
                           ": duplicate experiment name '" + name + "'");
      seen_names[name] = line_no;
      cfg.experiments.emplace_back();
      cfg.experiments.back().name = name;
      current = &cfg.experiments.back();
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(line_no) +
                         ": expected key = value");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (current == nullptr) {
      try {
        if (key == "seed") {
          cfg.seed = std::stoull(value);
          cfg.seed_set = true;
        } else if (key == "workers") {
          cfg.workers = static_cast<unsigned>(std::stoul(value));
        } else if (key == "out") {
          cfg.out_dir = value;
        } else if (key == "formats") {
          cfg.write_json = value.find("json") != std::string::npos;
          cfg.write_csv = value.find("csv") != std::string::npos;
          if (!cfg.write_json && !cfg.write_csv)
            throw config_error("line " + std::to_string(line_no) +
                               ": formats must include json and/or csv");
        } else {
          throw config_error("line " + std::to_string(line_no) +
                             ": unknown global key '" + key + "'");
        }
      } catch (const config_error&) {
        throw;
      } catch (const std::exception&) {
        throw config_error("line " + std::to_string(line_no) +
                           ": bad value '" + value + "' for '" + key + "'");
      }
      continue;
    }
    detail::apply_spec_key(*current, key, value, line_no);
  }
  if (!cfg.seed_set)
    throw config_error("config must set a seed (no wall-clock default)");
  return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file: " + path);
  return parse_config(in);
}

}  // namespace gronwall
