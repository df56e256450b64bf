#include "solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <span>

#include "error.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace semcut {

const char* to_string(SolveMode mode) {
  switch (mode) {
    case SolveMode::joint: return "joint";
    case SolveMode::sequential: return "sequential";
    case SolveMode::fine_only: return "fine_only";
  }
  return "?";
}

const char* to_string(InitKind init) { return init == InitKind::flat ? "flat" : "spectral"; }

const char* to_string(Termination t) {
  switch (t) {
    case Termination::max_iters: return "max_iters";
    case Termination::converged: return "converged";
    case Termination::degenerate: return "degenerate";
  }
  return "?";
}

SolveMode parse_solve_mode(const std::string& s) {
  if (s == "joint") return SolveMode::joint;
  if (s == "sequential") return SolveMode::sequential;
  if (s == "fine_only") return SolveMode::fine_only;
  fail(ErrorCode::config, "unknown mode '" + s + "' (expected joint, sequential or fine_only)");
}

InitKind parse_init_kind(const std::string& s) {
  if (s == "flat") return InitKind::flat;
  if (s == "spectral") return InitKind::spectral;
  fail(ErrorCode::config, "unknown init '" + s + "' (expected flat or spectral)");
}

void SolverConfig::validate() const {
  if (!(learning_rate > 0.0)) fail(ErrorCode::config, "learning_rate must be > 0");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) fail(ErrorCode::config, "adam_beta1 must lie in (0,1)");
  if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) fail(ErrorCode::config, "adam_beta2 must lie in (0,1)");
  if (!(adam_eps > 0.0)) fail(ErrorCode::config, "adam_eps must be > 0");
  if (max_iters < 1) fail(ErrorCode::config, "max_iters must be >= 1");
  if (!(stop_tol >= 0.0)) fail(ErrorCode::config, "stop_tol must be >= 0");
}

SolverConfig SolverConfig::small_step() {
  SolverConfig cfg;
  cfg.learning_rate = 1e-4;
  return cfg;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

std::vector<double> sigmoid_all(const std::vector<double>& z) {
  std::vector<double> s(z.size());
  std::transform(z.begin(), z.end(), s.begin(), [](double v) { return sigmoid(v); });
  return s;
}

class Adam {
 public:
  Adam(std::size_t n, const SolverConfig& cfg) : m_(n, 0.0), v_(n, 0.0), cfg_(&cfg) {}

  void step(std::vector<double>& logits, std::span<const double> grad) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_->adam_beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg_->adam_beta2, t_);
    for (std::size_t i = 0; i < logits.size(); ++i) {
      const double g = grad[i];
      m_[i] = cfg_->adam_beta1 * m_[i] + (1.0 - cfg_->adam_beta1) * g;
      v_[i] = cfg_->adam_beta2 * v_[i] + (1.0 - cfg_->adam_beta2) * g * g;
      const double m_hat = m_[i] / bc1;
      const double v_hat = v_[i] / bc2;
      logits[i] -= cfg_->learning_rate * m_hat / (std::sqrt(v_hat) + cfg_->adam_eps);
    }
  }

 private:
  std::vector<double> m_;
  std::vector<double> v_;
  const SolverConfig* cfg_;
  int t_ = 0;
};

bool is_degenerate(const Error& e) { return e.code() == ErrorCode::degenerate_partition; }

// With r > 0 the fine variable holds a per-pixel offset and the fine logits
// are upsample(coarse logits, r) + offset. A uniform shift of one patch then
// moves both masks together instead of fighting the SR term pixel by pixel.
struct Coupling {
  std::size_t coarse_height = 0;
  std::size_t coarse_width = 0;
  std::size_t r = 0;
};

std::vector<double> fine_logits_of(const std::vector<double>& coarse_logits, const std::vector<double>& fine_var,
                                   const Coupling& c) {
  if (c.r == 0) return fine_var;
  auto z = upsample_nearest(coarse_logits, c.coarse_height, c.coarse_width, c.r);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += fine_var[i];
  return z;
}

// Chain rule through the sigmoid, in place.
void to_logit_grad(std::vector<double>& grad, const std::vector<double>& mask) {
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= mask[i] * (1.0 - mask[i]);
}

// One optimization phase over the logits. On a degenerate evaluation the
// logits are rolled back to the last iterate that evaluated cleanly.
template <class Evaluate>
Termination run_phase(Evaluate&& evaluate, std::vector<double>& coarse_logits, std::vector<double>& fine_var,
                      bool update_coarse, bool update_fine, const Coupling& coupling, const SolverConfig& cfg,
                      SolveReport& report) {
  const std::size_t start = report.trace.size();
  Adam adam_coarse(coarse_logits.size(), cfg);
  Adam adam_fine(fine_var.size(), cfg);
  std::vector<double> prev_coarse, prev_fine;
  bool have_prev = false;

  for (int it = 0; it < cfg.max_iters; ++it) {
    const auto sc = sigmoid_all(coarse_logits);
    const auto sf = sigmoid_all(fine_logits_of(coarse_logits, fine_var, coupling));
    TotalLoss loss;
    try {
      loss = evaluate(sc, sf);
    } catch (const Error& e) {
      if (!is_degenerate(e)) throw;
      if (have_prev) {
        coarse_logits = std::move(prev_coarse);
        fine_var = std::move(prev_fine);
      }
      return Termination::degenerate;
    }
    report.trace.push_back({loss.terms, loss.value});
    const std::size_t k = report.trace.size() - start;
    // A rising total is an Adam transient, not a plateau.
    const double decrease = k > 10 ? report.trace[report.trace.size() - 11].total - loss.value : -1.0;
    if (decrease >= 0.0 && decrease < cfg.stop_tol) return Termination::converged;

    prev_coarse = coarse_logits;
    prev_fine = fine_var;
    have_prev = true;
    if (update_fine) to_logit_grad(loss.grad_fine, sf);
    if (update_coarse) {
      to_logit_grad(loss.grad_coarse, sc);
      if (coupling.r > 0 && update_fine) {
        const std::size_t fw = coupling.coarse_width * coupling.r;
        for (std::size_t i = 0; i < loss.grad_fine.size(); ++i) {
          const std::size_t y = i / fw, x = i % fw;
          loss.grad_coarse[(y / coupling.r) * coupling.coarse_width + x / coupling.r] += loss.grad_fine[i];
        }
      }
      adam_coarse.step(coarse_logits, loss.grad_coarse);
    }
    if (update_fine) adam_fine.step(fine_var, loss.grad_fine);
  }
  return Termination::max_iters;
}

std::vector<double> flat_logits(Rng& rng, std::size_t n) {
  std::vector<double> z(n);
  for (double& v : z) v = rng.uniform(-0.01, 0.01);
  return z;
}

std::vector<double> spectral_logits(const AffinityMatrix& w) {
  const auto spec = spectral_bipartition(w);
  const auto& v = spec.fiedler_vector;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x - mean));
  std::vector<double> z(v.size(), 0.0);
  if (scale > 0.0)
    for (std::size_t i = 0; i < v.size(); ++i) z[i] = 4.0 * (v[i] - mean) / scale;
  return z;
}

void finish_report(SolveReport& report, std::chrono::steady_clock::time_point start) {
  report.iterations = static_cast<int>(report.trace.size());
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <class Evaluate>
void record_final(SolveReport& report, Evaluate&& evaluate, const std::vector<double>& sc,
                  const std::vector<double>& sf) {
  try {
    const auto loss = evaluate(sc, sf);
    report.final_terms = loss.terms;
    report.final_total = loss.value;
  } catch (const Error& e) {
    if (!is_degenerate(e)) throw;
    if (!report.trace.empty()) {
      report.final_terms = report.trace.back().terms;
      report.final_total = report.trace.back().total;
    }
  }
}

}  // namespace

SolveResult solve(const FeatureGrid& features, const RgbImage* image, const LossWeights& weights,
                  const GraphConfig& graph_cfg, const SolverConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  weights.validate();
  graph_cfg.validate();
  cfg.validate();

  const std::size_t ch = features.height(), cw = features.width();
  std::size_t fh = 0, fw = 0, r = 0;
  if (image != nullptr) {
    fh = image->height();
    fw = image->width();
    if (fh % ch != 0 || fw % cw != 0 || fh / ch != fw / cw)
      fail(ErrorCode::dimension, "image " + std::to_string(fh) + "x" + std::to_string(fw) +
                                     " is not an integer multiple of the feature grid " + std::to_string(ch) + "x" +
                                     std::to_string(cw));
    r = fh / ch;
  } else {
    if (weights.lambda_gtv_fine > 0.0) fail(ErrorCode::invalid_argument, "image required for pixel graph");
    if (cfg.mode == SolveMode::fine_only) fail(ErrorCode::invalid_argument, "image required for fine_only mode");
  }

  const AffinityMatrix semantic = semantic_affinity(features, graph_cfg);
  const std::vector<double> degrees = degree_vector(semantic);
  const AffinityMatrix coarse_graph = coarse_neighborhood_affinity(features, graph_cfg);
  std::optional<AffinityMatrix> pixel_graph;
  if (image != nullptr) pixel_graph = pixel_affinity(*image, graph_cfg.sigma);
  LossGraphs graphs{&semantic, &coarse_graph, pixel_graph ? &*pixel_graph : nullptr, degrees};

  // Fine logits start as the upsampled coarse logits so the SR residual is zero at iteration 0.
  std::vector<double> zc, zf;
  if (cfg.init == InitKind::flat) {
    Rng rng(cfg.seed);
    zc = flat_logits(rng, ch * cw);
  } else {
    zc = spectral_logits(semantic);
  }
  if (image != nullptr) zf = upsample_nearest(zc, ch, cw, r);

  auto coarse_only = [&](const std::vector<double>& sc, const std::vector<double>&) {
    return total_loss(sc, ch, cw, {}, 0, 0, graphs, weights);
  };
  auto joint = [&](const std::vector<double>& sc, const std::vector<double>& sf) {
    return total_loss(sc, ch, cw, sf, fh, fw, graphs, weights);
  };

  SolveReport report;
  std::vector<double> final_coarse;
  if (image == nullptr) {
    report.termination = run_phase(coarse_only, zc, zf, true, false, Coupling{}, cfg, report);
    final_coarse = sigmoid_all(zc);
    record_final(report, coarse_only, final_coarse, {});
  } else if (cfg.mode == SolveMode::joint) {
    const Coupling coupling{ch, cw, r};
    zf.assign(fh * fw, 0.0);
    report.termination = run_phase(joint, zc, zf, true, true, coupling, cfg, report);
    zf = fine_logits_of(zc, zf, coupling);
    final_coarse = sigmoid_all(zc);
    record_final(report, joint, final_coarse, sigmoid_all(zf));
  } else if (cfg.mode == SolveMode::sequential) {
    report.termination = run_phase(coarse_only, zc, zf, true, false, Coupling{}, cfg, report);
    report.coarse_phase_iterations = static_cast<int>(report.trace.size());
    final_coarse = sigmoid_all(zc);
    if (report.termination != Termination::degenerate) {
      TotalLoss frozen;
      try {
        frozen = coarse_only(final_coarse, {});
      } catch (const Error& e) {
        if (!is_degenerate(e)) throw;
        report.termination = Termination::degenerate;
      }
      if (report.termination != Termination::degenerate) {
        auto fine_phase = [&](const std::vector<double>&, const std::vector<double>& sf) {
          TotalLoss out;
          auto gtv_f = gtv_loss(sf, *pixel_graph);
          auto sr = sr_loss(sf, fh, fw, final_coarse, ch, cw);
          out.terms = frozen.terms;
          out.terms.gtv_fine = gtv_f.value;
          out.terms.sr = sr.value;
          out.value = frozen.value + weights.lambda_gtv_fine * gtv_f.value;
          out.value = out.value + weights.lambda_sr * sr.value;
          out.grad_fine = std::move(gtv_f.grad);
          for (std::size_t i = 0; i < sf.size(); ++i)
            out.grad_fine[i] = weights.lambda_gtv_fine * out.grad_fine[i] + weights.lambda_sr * sr.grad_fine[i];
          return out;
        };
        report.termination = run_phase(fine_phase, zc, zf, false, true, Coupling{}, cfg, report);
        record_final(report, fine_phase, final_coarse, sigmoid_all(zf));
      }
    }
  } else {
    // A single fine variable: Ncut acts on its pooled version.
    auto fine_only = [&](const std::vector<double>&, const std::vector<double>& sf) {
      TotalLoss out;
      const auto pooled = avg_pool(sf, fh, fw, r);
      auto ncut = ncut_loss(pooled, semantic, degrees);
      auto gtv_f = gtv_loss(sf, *pixel_graph);
      out.terms.ncut = ncut.value;
      out.terms.gtv_fine = gtv_f.value;
      out.value = ncut.value + weights.lambda_gtv_fine * gtv_f.value;
      const double inv_area = 1.0 / static_cast<double>(r * r);
      out.grad_fine = std::move(gtv_f.grad);
      for (std::size_t y = 0; y < fh; ++y)
        for (std::size_t x = 0; x < fw; ++x) {
          double& g = out.grad_fine[y * fw + x];
          g = ncut.grad[(y / r) * cw + x / r] * inv_area + weights.lambda_gtv_fine * g;
        }
      return out;
    };
    report.termination = run_phase(fine_only, zc, zf, false, true, Coupling{}, cfg, report);
    const auto sf = sigmoid_all(zf);
    final_coarse = avg_pool(sf, fh, fw, r);
    for (double& v : final_coarse) v = std::clamp(v, 0.0, 1.0);
    record_final(report, fine_only, {}, sf);
  }

  finish_report(report, start);
  SolveResult result{SoftMask(ch, cw, std::move(final_coarse)), std::nullopt, std::move(report)};
  if (image != nullptr) result.fine = SoftMask(fh, fw, sigmoid_all(zf));
  return result;
}

NcutSolveResult minimize_ncut(const AffinityMatrix& w, const SolverConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  const auto degrees = degree_vector(w);
  std::vector<double> z;
  if (cfg.init == InitKind::flat) {
    Rng rng(cfg.seed);
    z = flat_logits(rng, w.size());
  } else {
    z = spectral_logits(w);
  }
  std::vector<double> unused;
  auto evaluate = [&](const std::vector<double>& s, const std::vector<double>&) {
    auto ncut = ncut_loss(s, w, degrees);
    TotalLoss out;
    out.terms.ncut = ncut.value;
    out.value = ncut.value;
    out.grad_coarse = std::move(ncut.grad);
    return out;
  };
  NcutSolveResult result;
  result.report.termination = run_phase(evaluate, z, unused, true, false, Coupling{}, cfg, result.report);
  result.indicator = sigmoid_all(z);
  record_final(result.report, evaluate, result.indicator, {});
  finish_report(result.report, start);
  return result;
}

double discrete_ncut(const AffinityMatrix& w, std::span<const std::uint8_t> indicator) {
  const std::size_t n = w.size();
  if (indicator.size() != n) fail(ErrorCode::dimension, "indicator length != node count");
  const auto dense = w.to_dense();
  double cut = 0.0, assoc_a = 0.0, assoc_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double wij = dense[i * n + j];
      if (indicator[i] == 0) {
        assoc_a += wij;
        if (indicator[j] != 0) cut += wij;
      } else {
        assoc_b += wij;
      }
    }
  }
  if (assoc_a <= 0.0 || assoc_b <= 0.0) return std::numeric_limits<double>::infinity();
  return cut / assoc_a + cut / assoc_b;
}

ExhaustiveResult exhaustive_ncut(const AffinityMatrix& w) {
  const std::size_t n = w.size();
  if (n > kExhaustiveMaxNodes)
    fail(ErrorCode::too_large, "exhaustive ncut supports at most " + std::to_string(kExhaustiveMaxNodes) + " nodes");
  if (n < 2) fail(ErrorCode::invalid_argument, "exhaustive ncut needs at least two nodes");
  // Node n-1 stays on side 0, so each bipartition is visited once with its smaller encoding.
  ExhaustiveResult best{std::vector<std::uint8_t>(n, 0), std::numeric_limits<double>::infinity()};
  std::vector<std::uint8_t> indicator(n);
  const std::uint32_t limit = 1u << (n - 1);
  for (std::uint32_t code = 1; code < limit; ++code) {
    for (std::size_t i = 0; i < n; ++i) indicator[i] = (code >> i) & 1u;
    const double value = discrete_ncut(w, indicator);
    if (value < best.value) {
      best.value = value;
      best.indicator = indicator;
    }
  }
  return best;
}

}  // namespace semcut
