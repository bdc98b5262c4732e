#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sttpp/matrix.hpp"

namespace sttpp::config {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TextSection {
  std::size_t min_tf = 5;
  double max_df_ratio = 0.5;
  std::string stopword_file;  // empty = bundled list
};

struct RbmSection {
  std::size_t m = 64;
  double delta = 0.0;
  double tau = 1e-2;
  std::size_t cd_k = 1;
  double learning_rate = 0.01;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  double sigma = 1.0;
  std::size_t gibbs_rounds = 10;  // for the reconstruction report
  bool mills_penalty_grad = false;
};

struct HawkesSection {
  double beta = 1.0;
  double tol = 1e-6;
  std::size_t max_iter = 200;
  std::uint64_t seed = 1;
  bool update_mu = false;
  bool jitter_ties = false;
};

struct SimSection {
  std::size_t d = 2;
  double T = 100.0;
  double mu = 0.05;              // base intensity per beat per mark
  std::string a_spec = "diag:0.3";  // diag:<v> | uniform:<lo>,<hi>,<density> | file:<csv>
  std::size_t marks = 4;         // |Omega|
  std::size_t mark_bits = 16;    // m
  std::uint64_t seed = 1;
  std::size_t max_events = 1000000;
};

struct EvalSection {
  std::size_t n_retrieve = 100;
  std::size_t folds = 5;
  std::vector<double> delta_grid = {0.0, 1e-2};
  std::vector<double> beta_grid = {0.02, 0.2, 2.0, 20.0, 200.0};
  std::uint64_t seed = 1;
};

struct PipelineConfig {
  TextSection text;
  RbmSection rbm;
  HawkesSection hawkes;
  SimSection sim;
  EvalSection eval;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw ConfigError("config: bad numeric value for " + key + ": " + v);
  }
}

inline std::uint64_t parse_uint(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size() || x < 0) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(x);
  } catch (...) {
    throw ConfigError("config: bad integer value for " + key + ": " + v);
  }
}

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: bad boolean value for " + key + ": " + v);
}

inline std::vector<double> parse_grid(const std::string& v,
                                      const std::string& key) {
  std::vector<double> grid;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    grid.push_back(parse_double(trim(item), key));
  }
  if (grid.empty()) throw ConfigError("config: empty grid for " + key);
  return grid;
}

}  // namespace detail

// Flat INI: [section] headers, key = value lines, # or ; comments.
// Unknown sections or keys are rejected.
inline PipelineConfig parse_config(std::istream& in) {
  using namespace detail;
  PipelineConfig cfg;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("config: malformed section header");
      section = s.substr(1, s.size() - 2);
      if (section != "text" && section != "rbm" && section != "hawkes" &&
          section != "sim" && section != "eval") {
        throw ConfigError("config: unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: expected key = value at line " +
                        std::to_string(lineno));
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    const std::string path = section + "." + key;

    if (section == "text") {
      if (key == "min_tf") cfg.text.min_tf = parse_uint(value, path);
      else if (key == "max_df_ratio") cfg.text.max_df_ratio = parse_double(value, path);
      else if (key == "stopword_file") cfg.text.stopword_file = value;
      else throw ConfigError("config: unknown key " + path);
    } else if (section == "rbm") {
      if (key == "m") cfg.rbm.m = parse_uint(value, path);
      else if (key == "delta") cfg.rbm.delta = parse_double(value, path);
      else if (key == "tau") cfg.rbm.tau = parse_double(value, path);
      else if (key == "cd_k") cfg.rbm.cd_k = parse_uint(value, path);
      else if (key == "learning_rate") cfg.rbm.learning_rate = parse_double(value, path);
      else if (key == "epochs") cfg.rbm.epochs = parse_uint(value, path);
      else if (key == "batch_size") cfg.rbm.batch_size = parse_uint(value, path);
      else if (key == "seed") cfg.rbm.seed = parse_uint(value, path);
      else if (key == "sigma") cfg.rbm.sigma = parse_double(value, path);
      else if (key == "gibbs_rounds") cfg.rbm.gibbs_rounds = parse_uint(value, path);
      else if (key == "mills_penalty_grad")
        cfg.rbm.mills_penalty_grad = parse_bool(value, path);
      else throw ConfigError("config: unknown key " + path);
    } else if (section == "hawkes") {
      if (key == "beta") cfg.hawkes.beta = parse_double(value, path);
      else if (key == "tol") cfg.hawkes.tol = parse_double(value, path);
      else if (key == "max_iter") cfg.hawkes.max_iter = parse_uint(value, path);
      else if (key == "seed") cfg.hawkes.seed = parse_uint(value, path);
      else if (key == "update_mu") cfg.hawkes.update_mu = parse_bool(value, path);
      else if (key == "jitter_ties") cfg.hawkes.jitter_ties = parse_bool(value, path);
      else throw ConfigError("config: unknown key " + path);
    } else if (section == "sim") {
      if (key == "d") cfg.sim.d = parse_uint(value, path);
      else if (key == "T") cfg.sim.T = parse_double(value, path);
      else if (key == "mu") cfg.sim.mu = parse_double(value, path);
      else if (key == "a_spec") cfg.sim.a_spec = value;
      else if (key == "marks") cfg.sim.marks = parse_uint(value, path);
      else if (key == "mark_bits") cfg.sim.mark_bits = parse_uint(value, path);
      else if (key == "seed") cfg.sim.seed = parse_uint(value, path);
      else if (key == "max_events") cfg.sim.max_events = parse_uint(value, path);
      else throw ConfigError("config: unknown key " + path);
    } else if (section == "eval") {
      if (key == "n_retrieve") cfg.eval.n_retrieve = parse_uint(value, path);
      else if (key == "folds") cfg.eval.folds = parse_uint(value, path);
      else if (key == "delta_grid") cfg.eval.delta_grid = parse_grid(value, path);
      else if (key == "beta_grid") cfg.eval.beta_grid = parse_grid(value, path);
      else if (key == "seed") cfg.eval.seed = parse_uint(value, path);
      else throw ConfigError("config: unknown key " + path);
    } else {
      throw ConfigError("config: key outside any section at line " +
                        std::to_string(lineno));
    }
  }

  // range checks
  if (cfg.text.min_tf < 1) throw ConfigError("config: text.min_tf must be >= 1");
  if (cfg.text.max_df_ratio <= 0.0 || cfg.text.max_df_ratio > 1.0) {
    throw ConfigError("config: text.max_df_ratio must be in (0, 1]");
  }
  if (cfg.rbm.m < 1) throw ConfigError("config: rbm.m must be >= 1");
  if (cfg.rbm.delta < 0.0) throw ConfigError("config: rbm.delta must be >= 0");
  if (cfg.rbm.cd_k < 1) throw ConfigError("config: rbm.cd_k must be >= 1");
  if (cfg.rbm.sigma <= 0.0) throw ConfigError("config: rbm.sigma must be > 0");
  if (cfg.rbm.batch_size < 1) throw ConfigError("config: rbm.batch_size must be >= 1");
  if (cfg.hawkes.beta <= 0.0) throw ConfigError("config: hawkes.beta must be > 0");
  if (cfg.hawkes.tol <= 0.0) throw ConfigError("config: hawkes.tol must be > 0");
  if (cfg.sim.d < 1) throw ConfigError("config: sim.d must be >= 1");
  if (cfg.sim.T <= 0.0) throw ConfigError("config: sim.T must be > 0");
  if (cfg.sim.mu <= 0.0) throw ConfigError("config: sim.mu must be > 0");
  if (cfg.sim.marks < 1) throw ConfigError("config: sim.marks must be >= 1");
  if (cfg.sim.mark_bits < 1) throw ConfigError("config: sim.mark_bits must be >= 1");
  if (cfg.eval.folds < 2) throw ConfigError("config: eval.folds must be >= 2");
  return cfg;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  return parse_config(in);
}

}  // namespace sttpp::config
