/*
 * semcut: per-image coarse/fine saliency partitioning by relaxed normalized
 * cut with graph-TV-regularized guided super-resolution.
 *
 * C interface. All objects are opaque handles created by *_create / *_read
 * functions and released with the matching *_destroy. Functions returning
 * semcut_status report failures through the status code; the message for the
 * most recent failure on the calling thread is available from
 * semcut_last_error().
 *
 * Arrays are row-major. Feature grids and images are channel-major
 * (channel, row, column).
 */
#ifndef SEMCUT_SEMCUT_H
#define SEMCUT_SEMCUT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SEMCUT_BUILDING_LIBRARY)
#    define SEMCUT_API __declspec(dllexport)
#  else
#    define SEMCUT_API __declspec(dllimport)
#  endif
#else
#  define SEMCUT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum semcut_status {
  SEMCUT_OK = 0,
  SEMCUT_ERR_INVALID_ARGUMENT = 1,
  SEMCUT_ERR_DIMENSION = 2,
  SEMCUT_ERR_NON_FINITE = 3,
  SEMCUT_ERR_IO = 4,
  SEMCUT_ERR_BAD_MAGIC = 5,
  SEMCUT_ERR_BAD_VERSION = 6,
  SEMCUT_ERR_TRUNCATED = 7,
  SEMCUT_ERR_DIMENSION_OVERFLOW = 8,
  SEMCUT_ERR_FORMAT = 9,
  SEMCUT_ERR_DEGENERATE_PARTITION = 10,
  SEMCUT_ERR_ISOLATED_NODE = 11,
  SEMCUT_ERR_MISSING_ATTENTION = 12,
  SEMCUT_ERR_EMPTY_INPUT = 13,
  SEMCUT_ERR_TOO_LARGE = 14,
  SEMCUT_ERR_CONFIG = 15,
  SEMCUT_ERR_INTERNAL = 99
} semcut_status;

typedef struct semcut_features semcut_features;
typedef struct semcut_image semcut_image;
typedef struct semcut_mask semcut_mask; /* soft mask, values in [0,1] */
typedef struct semcut_binary_mask semcut_binary_mask;
typedef struct semcut_affinity semcut_affinity;
typedef struct semcut_solution semcut_solution;
typedef struct semcut_manifest semcut_manifest;

/* Inclusive pixel-index box. */
typedef struct semcut_box {
  int64_t x_min, y_min, x_max, y_max;
} semcut_box;

typedef enum semcut_mode { SEMCUT_MODE_JOINT = 0, SEMCUT_MODE_SEQUENTIAL = 1, SEMCUT_MODE_FINE_ONLY = 2 } semcut_mode;
typedef enum semcut_init { SEMCUT_INIT_FLAT = 0, SEMCUT_INIT_SPECTRAL = 1 } semcut_init;
typedef enum semcut_termination {
  SEMCUT_TERM_MAX_ITERS = 0,
  SEMCUT_TERM_CONVERGED = 1,
  SEMCUT_TERM_DEGENERATE = 2
} semcut_termination;
typedef enum semcut_foreground_strategy {
  SEMCUT_FG_CENTRALITY = 0,
  SEMCUT_FG_FRAMING_PRIOR = 1,
  SEMCUT_FG_TOTAL_ATTENTION = 2,
  SEMCUT_FG_LEAST_CORNERS = 3
} semcut_foreground_strategy;

typedef struct semcut_loss_weights {
  double lambda_gtv_coarse;
  double lambda_sr;
  double lambda_gtv_fine;
} semcut_loss_weights;

typedef struct semcut_graph_config {
  double tau;        /* semantic-graph cosine threshold */
  double coarse_tau; /* 4-neighborhood patch-graph threshold */
  double epsilon;    /* weight below threshold */
  double sigma;      /* pixel-graph bandwidth */
} semcut_graph_config;

typedef struct semcut_solver_config {
  double learning_rate;
  double adam_beta1;
  double adam_beta2;
  double adam_eps;
  int32_t max_iters;
  double stop_tol;
  uint64_t seed;
  semcut_mode mode;
  semcut_init init;
} semcut_solver_config;

typedef struct semcut_config {
  semcut_loss_weights weights;
  semcut_graph_config graph;
  semcut_solver_config solver;
} semcut_config;

typedef struct semcut_loss_terms {
  double ncut;
  double gtv_coarse;
  double sr;
  double gtv_fine;
  double total;
} semcut_loss_terms;

/* ---- library ---------------------------------------------------------- */

SEMCUT_API const char* semcut_version(void);
SEMCUT_API const char* semcut_status_name(semcut_status status);
/* Message of the last failed call on this thread; "" if none. */
SEMCUT_API const char* semcut_last_error(void);

/* ---- configuration ---------------------------------------------------- */

SEMCUT_API void semcut_config_default(semcut_config* out);
/* "default", "small_step" (learning rate 1e-4) or "detect" (tau 0.25). */
SEMCUT_API semcut_status semcut_config_preset(const char* name, semcut_config* out);
/* key = value text; see README for the key list. */
SEMCUT_API semcut_status semcut_config_parse(const char* text, semcut_config* out);
SEMCUT_API semcut_status semcut_config_load(const char* path, semcut_config* out);
SEMCUT_API semcut_status semcut_config_validate(const semcut_config* cfg);
/* Writes "key = value" lines into buf (NUL-terminated, truncated to cap).
 * Returns the full length excluding the terminator. */
SEMCUT_API size_t semcut_config_format(const semcut_config* cfg, char* buf, size_t cap);

SEMCUT_API const char* semcut_mode_name(semcut_mode mode);
SEMCUT_API const char* semcut_init_name(semcut_init init);
SEMCUT_API const char* semcut_termination_name(semcut_termination t);
SEMCUT_API const char* semcut_foreground_name(semcut_foreground_strategy s);
SEMCUT_API semcut_status semcut_parse_mode(const char* name, semcut_mode* out);
SEMCUT_API semcut_status semcut_parse_init(const char* name, semcut_init* out);
SEMCUT_API semcut_status semcut_parse_foreground(const char* name, semcut_foreground_strategy* out);

/* ---- feature grids (SPFT files) --------------------------------------- */

SEMCUT_API semcut_status semcut_features_create(size_t channels, size_t height, size_t width, const double* data,
                                                semcut_features** out);
SEMCUT_API semcut_status semcut_features_read_spft(const char* path, semcut_features** out);
SEMCUT_API semcut_status semcut_features_write_spft(const semcut_features* f, const char* path);
SEMCUT_API size_t semcut_features_channels(const semcut_features* f);
SEMCUT_API size_t semcut_features_height(const semcut_features* f);
SEMCUT_API size_t semcut_features_width(const semcut_features* f);
SEMCUT_API const double* semcut_features_data(const semcut_features* f);
SEMCUT_API void semcut_features_destroy(semcut_features* f);

/* ---- RGB images (binary PPM files) ------------------------------------ */

SEMCUT_API semcut_status semcut_image_create(size_t height, size_t width, const double* data, semcut_image** out);
SEMCUT_API semcut_status semcut_image_read(const char* path, semcut_image** out);
SEMCUT_API semcut_status semcut_image_write(const semcut_image* img, const char* path);
SEMCUT_API size_t semcut_image_height(const semcut_image* img);
SEMCUT_API size_t semcut_image_width(const semcut_image* img);
SEMCUT_API const double* semcut_image_data(const semcut_image* img);
SEMCUT_API void semcut_image_destroy(semcut_image* img);

/* ---- soft masks (binary PGM files) ------------------------------------ */

SEMCUT_API semcut_status semcut_mask_create(size_t height, size_t width, const double* values, semcut_mask** out);
SEMCUT_API semcut_status semcut_mask_read(const char* path, semcut_mask** out);
SEMCUT_API semcut_status semcut_mask_write(const semcut_mask* m, const char* path);
SEMCUT_API size_t semcut_mask_height(const semcut_mask* m);
SEMCUT_API size_t semcut_mask_width(const semcut_mask* m);
SEMCUT_API const double* semcut_mask_values(const semcut_mask* m);
SEMCUT_API semcut_status semcut_mask_avg_pool(const semcut_mask* m, size_t window, semcut_mask** out);
SEMCUT_API semcut_status semcut_mask_upsample(const semcut_mask* m, size_t factor, semcut_mask** out);
SEMCUT_API void semcut_mask_destroy(semcut_mask* m);
/* Single-channel SPFT attention map, nonnegative, scaled so its peak is 1. */
SEMCUT_API semcut_status semcut_attention_read(const char* path, semcut_mask** out);

/* ---- binary masks ----------------------------------------------------- */

SEMCUT_API semcut_status semcut_binary_mask_create(size_t height, size_t width, const uint8_t* values,
                                                   semcut_binary_mask** out);
/* Bytes > 127 load as 1. */
SEMCUT_API semcut_status semcut_binary_mask_read(const char* path, semcut_binary_mask** out);
SEMCUT_API semcut_status semcut_binary_mask_write(const semcut_binary_mask* m, const char* path);
SEMCUT_API size_t semcut_binary_mask_height(const semcut_binary_mask* m);
SEMCUT_API size_t semcut_binary_mask_width(const semcut_binary_mask* m);
SEMCUT_API const uint8_t* semcut_binary_mask_values(const semcut_binary_mask* m);
SEMCUT_API size_t semcut_binary_mask_count(const semcut_binary_mask* m);
SEMCUT_API semcut_status semcut_binary_mask_upsample(const semcut_binary_mask* m, size_t factor,
                                                     semcut_binary_mask** out);
SEMCUT_API semcut_status semcut_binary_mask_complement(const semcut_binary_mask* m, semcut_binary_mask** out);
SEMCUT_API semcut_status semcut_binary_mask_to_soft(const semcut_binary_mask* m, semcut_mask** out);
SEMCUT_API void semcut_binary_mask_destroy(semcut_binary_mask* m);

/* ---- post-processing -------------------------------------------------- */

/* pixel = value > threshold */
SEMCUT_API semcut_status semcut_binarize(const semcut_mask* m, double threshold, semcut_binary_mask** out);
/* attention may be NULL unless strategy is SEMCUT_FG_TOTAL_ATTENTION.
 * flipped / degenerate may be NULL. */
SEMCUT_API semcut_status semcut_select_foreground(const semcut_binary_mask* m, semcut_foreground_strategy strategy,
                                                  const semcut_mask* attention, semcut_binary_mask** out,
                                                  int* flipped, int* degenerate);
/* 4-connected components, then the component with the largest box. */
SEMCUT_API semcut_status semcut_largest_component_box(const semcut_binary_mask* m, semcut_box* out,
                                                      size_t* component_count);

/* ---- graphs ----------------------------------------------------------- */

SEMCUT_API semcut_status semcut_affinity_semantic(const semcut_features* f, const semcut_graph_config* cfg,
                                                  semcut_affinity** out);
SEMCUT_API semcut_status semcut_affinity_coarse(const semcut_features* f, const semcut_graph_config* cfg,
                                                semcut_affinity** out);
SEMCUT_API semcut_status semcut_affinity_pixel(const semcut_image* img, double sigma, semcut_affinity** out);
/* Dense symmetric nonnegative n*n weights. */
SEMCUT_API semcut_status semcut_affinity_dense(size_t n, const double* weights, semcut_affinity** out);
SEMCUT_API size_t semcut_affinity_size(const semcut_affinity* a);
SEMCUT_API semcut_status semcut_affinity_degrees(const semcut_affinity* a, double* out, size_t n);
SEMCUT_API void semcut_affinity_destroy(semcut_affinity* a);

/* ---- losses ----------------------------------------------------------- */

/* grad may be NULL. */
SEMCUT_API semcut_status semcut_ncut_loss(const double* s, size_t n, const semcut_affinity* w, double* value,
                                          double* grad);
SEMCUT_API semcut_status semcut_gtv_loss(const double* s, size_t n, const semcut_affinity* a, double* value,
                                         double* grad);

/* ---- solvers ---------------------------------------------------------- */

/* image may be NULL: only the coarse mask is optimized and
 * lambda_gtv_fine must be 0. */
SEMCUT_API semcut_status semcut_solve(const semcut_features* f, const semcut_image* image, const semcut_config* cfg,
                                      semcut_solution** out);
/* Borrowed; valid until the solution is destroyed. Fine is NULL without an image. */
SEMCUT_API const semcut_mask* semcut_solution_coarse(const semcut_solution* s);
SEMCUT_API const semcut_mask* semcut_solution_fine(const semcut_solution* s);
SEMCUT_API int32_t semcut_solution_iterations(const semcut_solution* s);
SEMCUT_API semcut_termination semcut_solution_termination(const semcut_solution* s);
SEMCUT_API double semcut_solution_wall_seconds(const semcut_solution* s);
SEMCUT_API void semcut_solution_final_losses(const semcut_solution* s, semcut_loss_terms* out);
SEMCUT_API size_t semcut_solution_trace_length(const semcut_solution* s);
SEMCUT_API semcut_status semcut_solution_trace(const semcut_solution* s, size_t iteration, semcut_loss_terms* out);
SEMCUT_API void semcut_solution_destroy(semcut_solution* s);

/* Second eigenpair of I - D^-1/2 W D^-1/2. indicator (n bytes) receives
 * fiedler > mean; fiedler_vector (n doubles) and residual may be NULL. */
SEMCUT_API semcut_status semcut_spectral_bipartition(const semcut_affinity* w, uint8_t* indicator,
                                                     double* fiedler_vector, double* fiedler_value,
                                                     double* residual);
/* Exact minimum over all bipartitions, n <= 16. */
SEMCUT_API semcut_status semcut_exhaustive_ncut(const semcut_affinity* w, uint8_t* indicator, double* value);

/* ---- metrics ---------------------------------------------------------- */

SEMCUT_API semcut_status semcut_accuracy(const semcut_binary_mask* pred, const semcut_binary_mask* gt, double* out);
SEMCUT_API semcut_status semcut_iou(const semcut_binary_mask* pred, const semcut_binary_mask* gt, double* out);
/* beta_sq is beta^2 (0.3 conventionally). */
SEMCUT_API semcut_status semcut_max_f_beta(const semcut_mask* pred, const semcut_binary_mask* gt, double beta_sq,
                                           double* value, double* threshold);
SEMCUT_API semcut_status semcut_box_iou(const semcut_box* a, const semcut_box* b, double* out);
SEMCUT_API semcut_status semcut_corloc(const semcut_box* pred, const semcut_box* gt, size_t gt_count, int* hit);

/* ---- manifests (JSON lines) ------------------------------------------- */

/* Borrowed views; valid until the manifest is destroyed. Optional paths are NULL. */
typedef struct semcut_record {
  const char* id;
  const char* features;
  const char* image;
  const char* gt_mask;
  const char* attention;
  const semcut_box* boxes;
  size_t box_count;
} semcut_record;

SEMCUT_API semcut_status semcut_manifest_read(const char* path, semcut_manifest** out);
SEMCUT_API size_t semcut_manifest_size(const semcut_manifest* m);
SEMCUT_API semcut_status semcut_manifest_record(const semcut_manifest* m, size_t index, semcut_record* out);
SEMCUT_API void semcut_manifest_destroy(semcut_manifest* m);

/* ---- synthetic fixtures ----------------------------------------------- */

typedef enum semcut_shape { SEMCUT_SHAPE_RANDOM = 0, SEMCUT_SHAPE_RECT = 1, SEMCUT_SHAPE_ELLIPSE = 2 } semcut_shape;

typedef struct semcut_synth_spec {
  uint64_t seed;
  size_t grid_height;
  size_t grid_width;
  size_t scale;
  size_t channels;
  semcut_shape shape;
  size_t rect_height; /* 0 = random */
  size_t rect_width;
} semcut_synth_spec;

SEMCUT_API void semcut_synth_spec_default(semcut_synth_spec* out);
/* Generates a planted fixture, writes its files under root and stores the
 * manifest line (paths relative to root) in line_buf. line_len receives the
 * full length excluding the terminator. */
SEMCUT_API semcut_status semcut_synth_write(const semcut_synth_spec* spec, const char* id, const char* root,
                                            char* line_buf, size_t cap, size_t* line_len);

#ifdef __cplusplus
}
#endif

#endif /* SEMCUT_SEMCUT_H */
