#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "losses.hpp"
#include "solver.hpp"

namespace semcut {

struct ResolvedConfig {
  LossWeights weights;
  GraphConfig graph;
  SolverConfig solver;

  void validate() const;
};

// Plain-text `key = value` lines; `#` starts a comment. Keys are the field
// names of SolverConfig, LossWeights and GraphConfig, plus `preset`
// (default | small_step | detect), which is applied before every other key.
// Unknown or repeated keys are errors.
ResolvedConfig parse_config(const std::string& text, const std::string& source = "<config>");
ResolvedConfig load_config(const std::filesystem::path& path);

// Every resolved field as (key, value) in a fixed order.
std::vector<std::pair<std::string, std::string>> config_entries(const ResolvedConfig& cfg);
std::string format_config(const ResolvedConfig& cfg);

}  // namespace semcut
