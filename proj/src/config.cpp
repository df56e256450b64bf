#include "config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "error.hpp"

namespace semcut {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v, const std::string& where) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::config, where + ": '" + key + "' expects a number, got '" + v + "'");
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v, const std::string& where) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    fail(ErrorCode::config, where + ": '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void ResolvedConfig::validate() const {
  weights.validate();
  graph.validate();
  solver.validate();
}

ResolvedConfig parse_config(const std::string& text, const std::string& source) {
  std::map<std::string, std::pair<std::string, std::string>> entries;  // key -> (value, where)
  std::istringstream in(text);
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::config, where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail(ErrorCode::config, where + ": expected key = value");
    if (!entries.emplace(key, std::make_pair(value, where)).second)
      fail(ErrorCode::config, where + ": key '" + key + "' given twice");
  }

  ResolvedConfig cfg;
  if (auto it = entries.find("preset"); it != entries.end()) {
    const auto& [value, where] = it->second;
    if (value == "small_step") {
      cfg.solver = SolverConfig::small_step();
    } else if (value == "detect") {
      cfg.graph = GraphConfig::detect();
    } else if (value != "default") {
      fail(ErrorCode::config, where + ": unknown preset '" + value + "' (expected default, small_step or detect)");
    }
    entries.erase(it);
  }

  for (const auto& [key, entry] : entries) {
    const auto& [v, where] = entry;
    if (key == "learning_rate") cfg.solver.learning_rate = parse_double(key, v, where);
    else if (key == "adam_beta1") cfg.solver.adam_beta1 = parse_double(key, v, where);
    else if (key == "adam_beta2") cfg.solver.adam_beta2 = parse_double(key, v, where);
    else if (key == "adam_eps") cfg.solver.adam_eps = parse_double(key, v, where);
    else if (key == "max_iters") cfg.solver.max_iters = parse_int<int>(key, v, where);
    else if (key == "stop_tol") cfg.solver.stop_tol = parse_double(key, v, where);
    else if (key == "seed") cfg.solver.seed = parse_int<std::uint64_t>(key, v, where);
    else if (key == "mode") cfg.solver.mode = parse_solve_mode(v);
    else if (key == "init") cfg.solver.init = parse_init_kind(v);
    else if (key == "lambda_gtv_coarse") cfg.weights.lambda_gtv_coarse = parse_double(key, v, where);
    else if (key == "lambda_sr") cfg.weights.lambda_sr = parse_double(key, v, where);
    else if (key == "lambda_gtv_fine") cfg.weights.lambda_gtv_fine = parse_double(key, v, where);
    else if (key == "tau") cfg.graph.tau = parse_double(key, v, where);
    else if (key == "coarse_tau") cfg.graph.coarse_tau = parse_double(key, v, where);
    else if (key == "epsilon") cfg.graph.epsilon = parse_double(key, v, where);
    else if (key == "sigma") cfg.graph.sigma = parse_double(key, v, where);
    else fail(ErrorCode::config, where + ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ResolvedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::vector<std::pair<std::string, std::string>> config_entries(const ResolvedConfig& cfg) {
  return {
      {"learning_rate", format_double(cfg.solver.learning_rate)},
      {"adam_beta1", format_double(cfg.solver.adam_beta1)},
      {"adam_beta2", format_double(cfg.solver.adam_beta2)},
      {"adam_eps", format_double(cfg.solver.adam_eps)},
      {"max_iters", std::to_string(cfg.solver.max_iters)},
      {"stop_tol", format_double(cfg.solver.stop_tol)},
      {"seed", std::to_string(cfg.solver.seed)},
      {"mode", to_string(cfg.solver.mode)},
      {"init", to_string(cfg.solver.init)},
      {"lambda_gtv_coarse", format_double(cfg.weights.lambda_gtv_coarse)},
      {"lambda_sr", format_double(cfg.weights.lambda_sr)},
      {"lambda_gtv_fine", format_double(cfg.weights.lambda_gtv_fine)},
      {"tau", format_double(cfg.graph.tau)},
      {"coarse_tau", format_double(cfg.graph.coarse_tau)},
      {"epsilon", format_double(cfg.graph.epsilon)},
      {"sigma", format_double(cfg.graph.sigma)},
  };
}

std::string format_config(const ResolvedConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_entries(cfg)) out += k + " = " + v + "\n";
  return out;
}

}  // namespace semcut
