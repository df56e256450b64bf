#include "semcut/semcut.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "core.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "io.hpp"
#include "losses.hpp"
#include "metrics.hpp"
#include "postprocess.hpp"
#include "solver.hpp"
#include "spectral.hpp"
#include "synth.hpp"

struct semcut_features {
  semcut::FeatureGrid grid;
};
struct semcut_image {
  semcut::RgbImage image;
};
struct semcut_mask {
  semcut::SoftMask mask;
};
struct semcut_binary_mask {
  semcut::BinaryMask mask;
};
struct semcut_affinity {
  semcut::AffinityMatrix matrix;
};
struct semcut_solution {
  semcut_mask coarse;
  std::optional<semcut_mask> fine;
  semcut::SolveReport report;
};
struct semcut_manifest {
  struct Entry {
    std::string id, features, image, gt_mask, attention;
    bool has_image = false, has_gt = false, has_attention = false;
    std::vector<semcut_box> boxes;
  };
  std::vector<Entry> entries;
};

namespace {

thread_local std::string g_last_error;

semcut_status set_error(semcut_status status, const char* what) {
  g_last_error = what;
  return status;
}

template <class F>
semcut_status guarded(F&& body) {
  try {
    body();
    return SEMCUT_OK;
  } catch (const semcut::Error& e) {
    return set_error(static_cast<semcut_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SEMCUT_ERR_TOO_LARGE, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SEMCUT_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) semcut::fail(semcut::ErrorCode::invalid_argument, what);
}

semcut::LossWeights to_cpp(const semcut_loss_weights& w) {
  return {w.lambda_gtv_coarse, w.lambda_sr, w.lambda_gtv_fine};
}

semcut::GraphConfig to_cpp(const semcut_graph_config& g) {
  semcut::GraphConfig out;
  out.tau = g.tau;
  out.coarse_tau = g.coarse_tau;
  out.epsilon = g.epsilon;
  out.sigma = g.sigma;
  return out;
}

semcut::SolverConfig to_cpp(const semcut_solver_config& s) {
  semcut::SolverConfig out;
  out.learning_rate = s.learning_rate;
  out.adam_beta1 = s.adam_beta1;
  out.adam_beta2 = s.adam_beta2;
  out.adam_eps = s.adam_eps;
  out.max_iters = s.max_iters;
  out.stop_tol = s.stop_tol;
  out.seed = s.seed;
  switch (s.mode) {
    case SEMCUT_MODE_JOINT: out.mode = semcut::SolveMode::joint; break;
    case SEMCUT_MODE_SEQUENTIAL: out.mode = semcut::SolveMode::sequential; break;
    case SEMCUT_MODE_FINE_ONLY: out.mode = semcut::SolveMode::fine_only; break;
    default: semcut::fail(semcut::ErrorCode::config, "unknown solve mode");
  }
  switch (s.init) {
    case SEMCUT_INIT_FLAT: out.init = semcut::InitKind::flat; break;
    case SEMCUT_INIT_SPECTRAL: out.init = semcut::InitKind::spectral; break;
    default: semcut::fail(semcut::ErrorCode::config, "unknown init");
  }
  return out;
}

semcut::ResolvedConfig to_cpp(const semcut_config& c) {
  return {to_cpp(c.weights), to_cpp(c.graph), to_cpp(c.solver)};
}

semcut_config to_c(const semcut::ResolvedConfig& c) {
  semcut_config out{};
  out.weights = {c.weights.lambda_gtv_coarse, c.weights.lambda_sr, c.weights.lambda_gtv_fine};
  out.graph = {c.graph.tau, c.graph.coarse_tau, c.graph.epsilon, c.graph.sigma};
  out.solver.learning_rate = c.solver.learning_rate;
  out.solver.adam_beta1 = c.solver.adam_beta1;
  out.solver.adam_beta2 = c.solver.adam_beta2;
  out.solver.adam_eps = c.solver.adam_eps;
  out.solver.max_iters = c.solver.max_iters;
  out.solver.stop_tol = c.solver.stop_tol;
  out.solver.seed = c.solver.seed;
  out.solver.mode = static_cast<semcut_mode>(static_cast<int>(c.solver.mode));
  out.solver.init = static_cast<semcut_init>(static_cast<int>(c.solver.init));
  return out;
}

semcut_loss_terms to_c(const semcut::LossTerms& t, double total) {
  return {t.ncut, t.gtv_coarse, t.sr, t.gtv_fine, total};
}

semcut::BoundingBox to_cpp(const semcut_box& b) { return {b.x_min, b.y_min, b.x_max, b.y_max}; }

semcut_foreground_strategy to_c(semcut::ForegroundStrategy s) {
  return static_cast<semcut_foreground_strategy>(static_cast<int>(s));
}

semcut::ForegroundStrategy to_cpp(semcut_foreground_strategy s) {
  switch (s) {
    case SEMCUT_FG_CENTRALITY: return semcut::ForegroundStrategy::centrality;
    case SEMCUT_FG_FRAMING_PRIOR: return semcut::ForegroundStrategy::framing_prior;
    case SEMCUT_FG_TOTAL_ATTENTION: return semcut::ForegroundStrategy::total_attention;
    case SEMCUT_FG_LEAST_CORNERS: return semcut::ForegroundStrategy::least_corners;
  }
  semcut::fail(semcut::ErrorCode::invalid_argument, "unknown foreground strategy");
}

size_t copy_out(const std::string& s, char* buf, size_t cap) {
  if (buf && cap > 0) {
    const size_t n = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
  return s.size();
}

template <class T, class... Args>
T* make(Args&&... args) {
  return new T{std::forward<Args>(args)...};
}

}  // namespace

extern "C" {

const char* semcut_version(void) { return "0.1.0"; }

const char* semcut_status_name(semcut_status status) {
  switch (status) {
    case SEMCUT_OK: return "ok";
    case SEMCUT_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SEMCUT_ERR_DIMENSION: return "dimension";
    case SEMCUT_ERR_NON_FINITE: return "non_finite";
    case SEMCUT_ERR_IO: return "io";
    case SEMCUT_ERR_BAD_MAGIC: return "bad_magic";
    case SEMCUT_ERR_BAD_VERSION: return "bad_version";
    case SEMCUT_ERR_TRUNCATED: return "truncated";
    case SEMCUT_ERR_DIMENSION_OVERFLOW: return "dimension_overflow";
    case SEMCUT_ERR_FORMAT: return "format";
    case SEMCUT_ERR_DEGENERATE_PARTITION: return "degenerate_partition";
    case SEMCUT_ERR_ISOLATED_NODE: return "isolated_node";
    case SEMCUT_ERR_MISSING_ATTENTION: return "missing_attention";
    case SEMCUT_ERR_EMPTY_INPUT: return "empty_input";
    case SEMCUT_ERR_TOO_LARGE: return "too_large";
    case SEMCUT_ERR_CONFIG: return "config";
    case SEMCUT_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* semcut_last_error(void) { return g_last_error.c_str(); }

// ---- configuration

void semcut_config_default(semcut_config* out) {
  if (out) *out = to_c(semcut::ResolvedConfig{});
}

semcut_status semcut_config_preset(const char* name, semcut_config* out) {
  return guarded([&] {
    require(name && out, "null argument");
    *out = to_c(semcut::parse_config(std::string("preset = ") + name, "<preset>"));
  });
}

semcut_status semcut_config_parse(const char* text, semcut_config* out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = to_c(semcut::parse_config(text));
  });
}

semcut_status semcut_config_load(const char* path, semcut_config* out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = to_c(semcut::load_config(path));
  });
}

semcut_status semcut_config_validate(const semcut_config* cfg) {
  return guarded([&] {
    require(cfg, "null argument");
    to_cpp(*cfg).validate();
  });
}

size_t semcut_config_format(const semcut_config* cfg, char* buf, size_t cap) {
  if (!cfg) return 0;
  try {
    return copy_out(semcut::format_config(to_cpp(*cfg)), buf, cap);
  } catch (const std::exception& e) {
    set_error(SEMCUT_ERR_CONFIG, e.what());
    return 0;
  }
}

const char* semcut_mode_name(semcut_mode mode) {
  switch (mode) {
    case SEMCUT_MODE_JOINT: return "joint";
    case SEMCUT_MODE_SEQUENTIAL: return "sequential";
    case SEMCUT_MODE_FINE_ONLY: return "fine_only";
  }
  return "unknown";
}

const char* semcut_init_name(semcut_init init) {
  switch (init) {
    case SEMCUT_INIT_FLAT: return "flat";
    case SEMCUT_INIT_SPECTRAL: return "spectral";
  }
  return "unknown";
}

const char* semcut_termination_name(semcut_termination t) {
  switch (t) {
    case SEMCUT_TERM_MAX_ITERS: return "max_iters";
    case SEMCUT_TERM_CONVERGED: return "converged";
    case SEMCUT_TERM_DEGENERATE: return "degenerate";
  }
  return "unknown";
}

const char* semcut_foreground_name(semcut_foreground_strategy s) {
  try {
    return semcut::to_string(to_cpp(s));
  } catch (const std::exception&) {
    return "unknown";
  }
}

semcut_status semcut_parse_mode(const char* name, semcut_mode* out) {
  return guarded([&] {
    require(name && out, "null argument");
    *out = static_cast<semcut_mode>(static_cast<int>(semcut::parse_solve_mode(name)));
  });
}

semcut_status semcut_parse_init(const char* name, semcut_init* out) {
  return guarded([&] {
    require(name && out, "null argument");
    *out = static_cast<semcut_init>(static_cast<int>(semcut::parse_init_kind(name)));
  });
}

semcut_status semcut_parse_foreground(const char* name, semcut_foreground_strategy* out) {
  return guarded([&] {
    require(name && out, "null argument");
    *out = to_c(semcut::parse_foreground_strategy(name));
  });
}

// ---- features

semcut_status semcut_features_create(size_t channels, size_t height, size_t width, const double* data,
                                     semcut_features** out) {
  return guarded([&] {
    require(data && out, "null argument");
    const size_t n = channels * height * width;
    *out = make<semcut_features>(semcut::FeatureGrid(channels, height, width, std::vector<double>(data, data + n)));
  });
}

semcut_status semcut_features_read_spft(const char* path, semcut_features** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = make<semcut_features>(semcut::read_spft(path));
  });
}

semcut_status semcut_features_write_spft(const semcut_features* f, const char* path) {
  return guarded([&] {
    require(f && path, "null argument");
    semcut::write_spft(f->grid, path);
  });
}

size_t semcut_features_channels(const semcut_features* f) { return f ? f->grid.channels() : 0; }
size_t semcut_features_height(const semcut_features* f) { return f ? f->grid.height() : 0; }
size_t semcut_features_width(const semcut_features* f) { return f ? f->grid.width() : 0; }
const double* semcut_features_data(const semcut_features* f) { return f ? f->grid.data().data() : nullptr; }
void semcut_features_destroy(semcut_features* f) { delete f; }

// ---- images

semcut_status semcut_image_create(size_t height, size_t width, const double* data, semcut_image** out) {
  return guarded([&] {
    require(data && out, "null argument");
    *out = make<semcut_image>(semcut::RgbImage(height, width, std::vector<double>(data, data + 3 * height * width)));
  });
}

semcut_status semcut_image_read(const char* path, semcut_image** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = make<semcut_image>(semcut::read_image(path));
  });
}

semcut_status semcut_image_write(const semcut_image* img, const char* path) {
  return guarded([&] {
    require(img && path, "null argument");
    semcut::write_image(img->image, path);
  });
}

size_t semcut_image_height(const semcut_image* img) { return img ? img->image.height() : 0; }
size_t semcut_image_width(const semcut_image* img) { return img ? img->image.width() : 0; }
const double* semcut_image_data(const semcut_image* img) { return img ? img->image.data().data() : nullptr; }
void semcut_image_destroy(semcut_image* img) { delete img; }

// ---- soft masks

semcut_status semcut_mask_create(size_t height, size_t width, const double* values, semcut_mask** out) {
  return guarded([&] {
    require(values && out, "null argument");
    *out = make<semcut_mask>(semcut::SoftMask(height, width, std::vector<double>(values, values + height * width)));
  });
}

semcut_status semcut_mask_read(const char* path, semcut_mask** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = make<semcut_mask>(semcut::read_soft_mask(path));
  });
}

semcut_status semcut_mask_write(const semcut_mask* m, const char* path) {
  return guarded([&] {
    require(m && path, "null argument");
    semcut::write_mask(m->mask, path);
  });
}

size_t semcut_mask_height(const semcut_mask* m) { return m ? m->mask.height() : 0; }
size_t semcut_mask_width(const semcut_mask* m) { return m ? m->mask.width() : 0; }
const double* semcut_mask_values(const semcut_mask* m) { return m ? m->mask.values().data() : nullptr; }

semcut_status semcut_mask_avg_pool(const semcut_mask* m, size_t window, semcut_mask** out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = make<semcut_mask>(semcut::avg_pool(m->mask, window));
  });
}

semcut_status semcut_mask_upsample(const semcut_mask* m, size_t factor, semcut_mask** out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = make<semcut_mask>(semcut::upsample_nearest(m->mask, factor));
  });
}

void semcut_mask_destroy(semcut_mask* m) { delete m; }

semcut_status semcut_attention_read(const char* path, semcut_mask** out) {
  return guarded([&] {
    require(path && out, "null argument");
    const auto grid = semcut::read_spft(path);
    if (grid.channels() != 1)
      semcut::fail(semcut::ErrorCode::dimension,
                   "attention map must have 1 channel, got " + std::to_string(grid.channels()));
    std::vector<double> values(grid.data().begin(), grid.data().end());
    double peak = 0.0;
    for (double v : values) {
      if (v < 0.0) semcut::fail(semcut::ErrorCode::invalid_argument, "attention map has negative values");
      peak = std::max(peak, v);
    }
    if (peak > 0.0)
      for (double& v : values) v /= peak;
    *out = make<semcut_mask>(semcut::SoftMask(grid.height(), grid.width(), std::move(values)));
  });
}

// ---- binary masks

semcut_status semcut_binary_mask_create(size_t height, size_t width, const uint8_t* values,
                                        semcut_binary_mask** out) {
  return guarded([&] {
    require(values && out, "null argument");
    *out = make<semcut_binary_mask>(
        semcut::BinaryMask(height, width, std::vector<std::uint8_t>(values, values + height * width)));
  });
}

semcut_status semcut_binary_mask_read(const char* path, semcut_binary_mask** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = make<semcut_binary_mask>(semcut::read_binary_mask(path));
  });
}

semcut_status semcut_binary_mask_write(const semcut_binary_mask* m, const char* path) {
  return guarded([&] {
    require(m && path, "null argument");
    semcut::write_mask(m->mask, path);
  });
}

size_t semcut_binary_mask_height(const semcut_binary_mask* m) { return m ? m->mask.height() : 0; }
size_t semcut_binary_mask_width(const semcut_binary_mask* m) { return m ? m->mask.width() : 0; }
const uint8_t* semcut_binary_mask_values(const semcut_binary_mask* m) {
  return m ? m->mask.values().data() : nullptr;
}
size_t semcut_binary_mask_count(const semcut_binary_mask* m) { return m ? m->mask.count() : 0; }

semcut_status semcut_binary_mask_upsample(const semcut_binary_mask* m, size_t factor, semcut_binary_mask** out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = make<semcut_binary_mask>(semcut::upsample_nearest(m->mask, factor));
  });
}

semcut_status semcut_binary_mask_complement(const semcut_binary_mask* m, semcut_binary_mask** out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = make<semcut_binary_mask>(m->mask.complement());
  });
}

semcut_status semcut_binary_mask_to_soft(const semcut_binary_mask* m, semcut_mask** out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = make<semcut_mask>(m->mask.to_soft());
  });
}

void semcut_binary_mask_destroy(semcut_binary_mask* m) { delete m; }

// ---- post-processing

semcut_status semcut_binarize(const semcut_mask* m, double threshold, semcut_binary_mask** out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = make<semcut_binary_mask>(semcut::binarize(m->mask, threshold));
  });
}

semcut_status semcut_select_foreground(const semcut_binary_mask* m, semcut_foreground_strategy strategy,
                                       const semcut_mask* attention, semcut_binary_mask** out, int* flipped,
                                       int* degenerate) {
  return guarded([&] {
    require(m && out, "null argument");
    auto sel = semcut::select_foreground(m->mask, to_cpp(strategy), attention ? &attention->mask : nullptr);
    if (flipped) *flipped = sel.flipped ? 1 : 0;
    if (degenerate) *degenerate = sel.degenerate ? 1 : 0;
    *out = make<semcut_binary_mask>(std::move(sel.mask));
  });
}

semcut_status semcut_largest_component_box(const semcut_binary_mask* m, semcut_box* out, size_t* component_count) {
  return guarded([&] {
    require(m && out, "null argument");
    const auto components = semcut::connected_components(m->mask);
    if (component_count) *component_count = components.components.size();
    const auto box = semcut::largest_bbox(components);
    *out = {box.x_min, box.y_min, box.x_max, box.y_max};
  });
}

// ---- graphs

semcut_status semcut_affinity_semantic(const semcut_features* f, const semcut_graph_config* cfg,
                                       semcut_affinity** out) {
  return guarded([&] {
    require(f && cfg && out, "null argument");
    *out = make<semcut_affinity>(semcut::semantic_affinity(f->grid, to_cpp(*cfg)));
  });
}

semcut_status semcut_affinity_coarse(const semcut_features* f, const semcut_graph_config* cfg,
                                     semcut_affinity** out) {
  return guarded([&] {
    require(f && cfg && out, "null argument");
    *out = make<semcut_affinity>(semcut::coarse_neighborhood_affinity(f->grid, to_cpp(*cfg)));
  });
}

semcut_status semcut_affinity_pixel(const semcut_image* img, double sigma, semcut_affinity** out) {
  return guarded([&] {
    require(img && out, "null argument");
    *out = make<semcut_affinity>(semcut::pixel_affinity(img->image, sigma));
  });
}

semcut_status semcut_affinity_dense(size_t n, const double* weights, semcut_affinity** out) {
  return guarded([&] {
    require(weights && out, "null argument");
    *out = make<semcut_affinity>(semcut::AffinityMatrix::from_dense(n, std::vector<double>(weights, weights + n * n)));
  });
}

size_t semcut_affinity_size(const semcut_affinity* a) { return a ? a->matrix.size() : 0; }

semcut_status semcut_affinity_degrees(const semcut_affinity* a, double* out, size_t n) {
  return guarded([&] {
    require(a && out, "null argument");
    if (n != a->matrix.size())
      semcut::fail(semcut::ErrorCode::dimension, "degree buffer holds " + std::to_string(n) + " values, graph has " +
                                                     std::to_string(a->matrix.size()) + " nodes");
    const auto d = semcut::degree_vector(a->matrix);
    std::copy(d.begin(), d.end(), out);
  });
}

void semcut_affinity_destroy(semcut_affinity* a) { delete a; }

// ---- losses

semcut_status semcut_ncut_loss(const double* s, size_t n, const semcut_affinity* w, double* value, double* grad) {
  return guarded([&] {
    require(s && w && value, "null argument");
    const auto r = semcut::ncut_loss(std::span<const double>(s, n), w->matrix);
    *value = r.value;
    if (grad) std::copy(r.grad.begin(), r.grad.end(), grad);
  });
}

semcut_status semcut_gtv_loss(const double* s, size_t n, const semcut_affinity* a, double* value, double* grad) {
  return guarded([&] {
    require(s && a && value, "null argument");
    const auto r = semcut::gtv_loss(std::span<const double>(s, n), a->matrix);
    *value = r.value;
    if (grad) std::copy(r.grad.begin(), r.grad.end(), grad);
  });
}

// ---- solvers

semcut_status semcut_solve(const semcut_features* f, const semcut_image* image, const semcut_config* cfg,
                           semcut_solution** out) {
  return guarded([&] {
    require(f && cfg && out, "null argument");
    const auto c = to_cpp(*cfg);
    auto r = semcut::solve(f->grid, image ? &image->image : nullptr, c.weights, c.graph, c.solver);
    std::optional<semcut_mask> fine;
    if (r.fine) fine.emplace(semcut_mask{std::move(*r.fine)});
    *out = new semcut_solution{semcut_mask{std::move(r.coarse)}, std::move(fine), std::move(r.report)};
  });
}

const semcut_mask* semcut_solution_coarse(const semcut_solution* s) { return s ? &s->coarse : nullptr; }
const semcut_mask* semcut_solution_fine(const semcut_solution* s) { return s && s->fine ? &*s->fine : nullptr; }
int32_t semcut_solution_iterations(const semcut_solution* s) { return s ? s->report.iterations : 0; }

semcut_termination semcut_solution_termination(const semcut_solution* s) {
  return s ? static_cast<semcut_termination>(static_cast<int>(s->report.termination)) : SEMCUT_TERM_MAX_ITERS;
}

double semcut_solution_wall_seconds(const semcut_solution* s) { return s ? s->report.wall_seconds : 0.0; }

void semcut_solution_final_losses(const semcut_solution* s, semcut_loss_terms* out) {
  if (s && out) *out = to_c(s->report.final_terms, s->report.final_total);
}

size_t semcut_solution_trace_length(const semcut_solution* s) { return s ? s->report.trace.size() : 0; }

semcut_status semcut_solution_trace(const semcut_solution* s, size_t iteration, semcut_loss_terms* out) {
  return guarded([&] {
    require(s && out, "null argument");
    if (iteration >= s->report.trace.size())
      semcut::fail(semcut::ErrorCode::invalid_argument, "trace index out of range");
    const auto& e = s->report.trace[iteration];
    *out = to_c(e.terms, e.total);
  });
}

void semcut_solution_destroy(semcut_solution* s) { delete s; }

semcut_status semcut_spectral_bipartition(const semcut_affinity* w, uint8_t* indicator, double* fiedler_vector,
                                          double* fiedler_value, double* residual) {
  return guarded([&] {
    require(w && indicator, "null argument");
    const auto r = semcut::spectral_bipartition(w->matrix);
    std::copy(r.indicator.begin(), r.indicator.end(), indicator);
    if (fiedler_vector) std::copy(r.fiedler_vector.begin(), r.fiedler_vector.end(), fiedler_vector);
    if (fiedler_value) *fiedler_value = r.fiedler_value;
    if (residual) *residual = r.residual;
  });
}

semcut_status semcut_exhaustive_ncut(const semcut_affinity* w, uint8_t* indicator, double* value) {
  return guarded([&] {
    require(w, "null argument");
    const auto r = semcut::exhaustive_ncut(w->matrix);
    if (indicator) std::copy(r.indicator.begin(), r.indicator.end(), indicator);
    if (value) *value = r.value;
  });
}

// ---- metrics

semcut_status semcut_accuracy(const semcut_binary_mask* pred, const semcut_binary_mask* gt, double* out) {
  return guarded([&] {
    require(pred && gt && out, "null argument");
    *out = semcut::accuracy(pred->mask, gt->mask);
  });
}

semcut_status semcut_iou(const semcut_binary_mask* pred, const semcut_binary_mask* gt, double* out) {
  return guarded([&] {
    require(pred && gt && out, "null argument");
    *out = semcut::iou(pred->mask, gt->mask);
  });
}

semcut_status semcut_max_f_beta(const semcut_mask* pred, const semcut_binary_mask* gt, double beta_sq,
                                double* value, double* threshold) {
  return guarded([&] {
    require(pred && gt && value, "null argument");
    const auto r = semcut::max_f_beta(pred->mask, gt->mask, beta_sq);
    *value = r.value;
    if (threshold) *threshold = r.threshold;
  });
}

semcut_status semcut_box_iou(const semcut_box* a, const semcut_box* b, double* out) {
  return guarded([&] {
    require(a && b && out, "null argument");
    *out = semcut::box_iou(to_cpp(*a), to_cpp(*b));
  });
}

semcut_status semcut_corloc(const semcut_box* pred, const semcut_box* gt, size_t gt_count, int* hit) {
  return guarded([&] {
    require(pred && hit && (gt || gt_count == 0), "null argument");
    std::vector<semcut::BoundingBox> boxes;
    boxes.reserve(gt_count);
    for (size_t i = 0; i < gt_count; ++i) boxes.push_back(to_cpp(gt[i]));
    *hit = semcut::corloc(to_cpp(*pred), boxes) ? 1 : 0;
  });
}

// ---- manifests

semcut_status semcut_manifest_read(const char* path, semcut_manifest** out) {
  return guarded([&] {
    require(path && out, "null argument");
    auto m = std::make_unique<semcut_manifest>();
    for (const auto& rec : semcut::read_manifest(path)) {
      semcut_manifest::Entry e;
      e.id = rec.id;
      e.features = rec.features.string();
      if (rec.image) e.image = rec.image->string(), e.has_image = true;
      if (rec.gt_mask) e.gt_mask = rec.gt_mask->string(), e.has_gt = true;
      if (rec.attention) e.attention = rec.attention->string(), e.has_attention = true;
      for (const auto& b : rec.boxes) e.boxes.push_back({b.x_min, b.y_min, b.x_max, b.y_max});
      m->entries.push_back(std::move(e));
    }
    *out = m.release();
  });
}

size_t semcut_manifest_size(const semcut_manifest* m) { return m ? m->entries.size() : 0; }

semcut_status semcut_manifest_record(const semcut_manifest* m, size_t index, semcut_record* out) {
  return guarded([&] {
    require(m && out, "null argument");
    if (index >= m->entries.size()) semcut::fail(semcut::ErrorCode::invalid_argument, "record index out of range");
    const auto& e = m->entries[index];
    out->id = e.id.c_str();
    out->features = e.features.c_str();
    out->image = e.has_image ? e.image.c_str() : nullptr;
    out->gt_mask = e.has_gt ? e.gt_mask.c_str() : nullptr;
    out->attention = e.has_attention ? e.attention.c_str() : nullptr;
    out->boxes = e.boxes.empty() ? nullptr : e.boxes.data();
    out->box_count = e.boxes.size();
  });
}

void semcut_manifest_destroy(semcut_manifest* m) { delete m; }

// ---- synthetic fixtures

void semcut_synth_spec_default(semcut_synth_spec* out) {
  if (!out) return;
  const semcut::FixtureSpec d;
  *out = {d.seed, d.grid_height, d.grid_width, d.scale, d.channels, SEMCUT_SHAPE_RANDOM, d.rect_height, d.rect_width};
}

semcut_status semcut_synth_write(const semcut_synth_spec* spec, const char* id, const char* root, char* line_buf,
                                 size_t cap, size_t* line_len) {
  return guarded([&] {
    require(spec && id && root, "null argument");
    semcut::FixtureSpec s;
    s.seed = spec->seed;
    s.grid_height = spec->grid_height;
    s.grid_width = spec->grid_width;
    s.scale = spec->scale;
    s.channels = spec->channels;
    switch (spec->shape) {
      case SEMCUT_SHAPE_RANDOM: s.shape = semcut::FixtureShape::random; break;
      case SEMCUT_SHAPE_RECT: s.shape = semcut::FixtureShape::rect; break;
      case SEMCUT_SHAPE_ELLIPSE: s.shape = semcut::FixtureShape::ellipse; break;
      default: semcut::fail(semcut::ErrorCode::invalid_argument, "unknown fixture shape");
    }
    s.rect_height = spec->rect_height;
    s.rect_width = spec->rect_width;
    const auto rec = semcut::write_fixture(semcut::synth_fixture(s), id, root);
    const size_t n = copy_out(semcut::manifest_line(rec), line_buf, cap);
    if (line_len) *line_len = n;
  });
}

}  // extern "C"
