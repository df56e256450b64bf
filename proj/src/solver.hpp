#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"
#include "graph.hpp"
#include "losses.hpp"

namespace semcut {

enum class SolveMode { joint, sequential, fine_only };
enum class InitKind { flat, spectral };
enum class Termination { max_iters, converged, degenerate };

const char* to_string(SolveMode mode);
const char* to_string(InitKind init);
const char* to_string(Termination t);
SolveMode parse_solve_mode(const std::string& s);
InitKind parse_init_kind(const std::string& s);

struct SolverConfig {
  double learning_rate = 0.05;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_iters = 2000;
  double stop_tol = 1e-7;
  std::uint64_t seed = 0;
  SolveMode mode = SolveMode::joint;
  InitKind init = InitKind::flat;

  void validate() const;
  // Learning rate used for network training in the original method.
  static SolverConfig small_step();
};

struct TraceEntry {
  LossTerms terms;
  double total = 0.0;
};

struct SolveReport {
  std::vector<TraceEntry> trace;  // one entry per executed iteration, all phases
  LossTerms final_terms;
  double final_total = 0.0;
  int iterations = 0;
  int coarse_phase_iterations = 0;  // sequential mode: length of the first phase
  double wall_seconds = 0.0;
  Termination termination = Termination::max_iters;
};

struct SolveResult {
  SoftMask coarse;
  std::optional<SoftMask> fine;  // absent when no image was supplied
  SolveReport report;
};

// Per-image minimization over sigmoid-parameterized coarse and fine masks.
// Without an image only the coarse terms are optimized.
SolveResult solve(const FeatureGrid& features, const RgbImage* image, const LossWeights& weights,
                  const GraphConfig& graph_cfg, const SolverConfig& cfg);

struct NcutSolveResult {
  std::vector<double> indicator;
  SolveReport report;
};

// Ncut-only minimization on a given affinity (no grid, no regularizers).
NcutSolveResult minimize_ncut(const AffinityMatrix& w, const SolverConfig& cfg);

// Discrete two-way normalized cut of a 0/1 indicator; +inf when a side has zero association.
double discrete_ncut(const AffinityMatrix& w, std::span<const std::uint8_t> indicator);

struct ExhaustiveResult {
  std::vector<std::uint8_t> indicator;
  double value = 0.0;
};

inline constexpr std::size_t kExhaustiveMaxNodes = 16;

// Minimum over all nontrivial bipartitions; ties go to the smallest binary encoding
// (bit i = node i on side 1).
ExhaustiveResult exhaustive_ncut(const AffinityMatrix& w);

double sigmoid(double z);

}  // namespace semcut
