// semcut command-line driver. Talks to the library only through the C API.

#include <semcut/semcut.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitUsage = 2;

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using Features = std::unique_ptr<semcut_features, Deleter<semcut_features, semcut_features_destroy>>;
using Image = std::unique_ptr<semcut_image, Deleter<semcut_image, semcut_image_destroy>>;
using Mask = std::unique_ptr<semcut_mask, Deleter<semcut_mask, semcut_mask_destroy>>;
using Binary = std::unique_ptr<semcut_binary_mask, Deleter<semcut_binary_mask, semcut_binary_mask_destroy>>;
using Affinity = std::unique_ptr<semcut_affinity, Deleter<semcut_affinity, semcut_affinity_destroy>>;
using Solution = std::unique_ptr<semcut_solution, Deleter<semcut_solution, semcut_solution_destroy>>;
using Manifest = std::unique_ptr<semcut_manifest, Deleter<semcut_manifest, semcut_manifest_destroy>>;

struct Failure : std::runtime_error {
  Failure(semcut_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  semcut_status status;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(semcut_status s, const std::string& context) {
  if (s != SEMCUT_OK) throw Failure(s, context + ": " + semcut_last_error());
}

Binary read_binary(const fs::path& p) {
  semcut_binary_mask* m = nullptr;
  check(semcut_binary_mask_read(p.c_str(), &m), p.string());
  return Binary(m);
}

Mask read_soft(const fs::path& p) {
  semcut_mask* m = nullptr;
  check(semcut_mask_read(p.c_str(), &m), p.string());
  return Mask(m);
}

Binary upsample(const semcut_binary_mask* m, std::size_t target_h, std::size_t target_w) {
  const std::size_t h = semcut_binary_mask_height(m), w = semcut_binary_mask_width(m);
  if (h == target_h && w == target_w) {
    semcut_binary_mask* copy = nullptr;
    check(semcut_binary_mask_create(h, w, semcut_binary_mask_values(m), &copy), "copy mask");
    return Binary(copy);
  }
  if (target_h % h != 0 || target_w % w != 0 || target_h / h != target_w / w)
    throw Failure(SEMCUT_ERR_DIMENSION, "mask " + std::to_string(h) + "x" + std::to_string(w) +
                                            " does not scale to " + std::to_string(target_h) + "x" +
                                            std::to_string(target_w) + " by an integer factor");
  semcut_binary_mask* out = nullptr;
  check(semcut_binary_mask_upsample(m, target_h / h, &out), "upsample mask");
  return Binary(out);
}

Mask flip_soft(const semcut_mask* m) {
  const std::size_t n = semcut_mask_height(m) * semcut_mask_width(m);
  const double* v = semcut_mask_values(m);
  std::vector<double> flipped(n);
  for (std::size_t i = 0; i < n; ++i) flipped[i] = 1.0 - v[i];
  semcut_mask* out = nullptr;
  check(semcut_mask_create(semcut_mask_height(m), semcut_mask_width(m), flipped.data(), &out), "flip mask");
  return Mask(out);
}

json box_json(const semcut_box& b) { return json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

json config_json(const semcut_config& c) {
  return json{
      {"learning_rate", c.solver.learning_rate},
      {"adam_beta1", c.solver.adam_beta1},
      {"adam_beta2", c.solver.adam_beta2},
      {"adam_eps", c.solver.adam_eps},
      {"max_iters", c.solver.max_iters},
      {"stop_tol", c.solver.stop_tol},
      {"seed", c.solver.seed},
      {"mode", semcut_mode_name(c.solver.mode)},
      {"init", semcut_init_name(c.solver.init)},
      {"lambda_gtv_coarse", c.weights.lambda_gtv_coarse},
      {"lambda_sr", c.weights.lambda_sr},
      {"lambda_gtv_fine", c.weights.lambda_gtv_fine},
      {"tau", c.graph.tau},
      {"coarse_tau", c.graph.coarse_tau},
      {"epsilon", c.graph.epsilon},
      {"sigma", c.graph.sigma},
  };
}

json losses_json(const semcut_loss_terms& t) {
  return json{{"ncut", t.ncut}, {"gtv_coarse", t.gtv_coarse}, {"sr", t.sr}, {"gtv_fine", t.gtv_fine},
              {"total", t.total}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << '\n';
  if (!out) throw Failure(SEMCUT_ERR_IO, "cannot write " + path.string());
}

// Largest-component bbox and CorLoc hit for a pixel-level prediction.
void localize(const semcut_binary_mask* pred, const semcut_record& rec, json& out) {
  if (semcut_binary_mask_count(pred) == 0) {
    out["bbox"] = nullptr;
    out["corloc"] = rec.box_count > 0 ? json(false) : json(nullptr);
    return;
  }
  semcut_box box{};
  check(semcut_largest_component_box(pred, &box, nullptr), "components");
  out["bbox"] = box_json(box);
  if (rec.box_count > 0) {
    int hit = 0;
    check(semcut_corloc(&box, rec.boxes, rec.box_count, &hit), "corloc");
    out["corloc"] = hit != 0;
  } else {
    out["corloc"] = nullptr;
  }
}

struct Outcome {
  bool ok = false;
  json summary;
  std::string message;  // stderr line
};

// Runs fn(i) for every record on `workers` threads. Results come back in
// record order, so output never depends on scheduling.
template <class Fn>
std::vector<Outcome> run_batch(std::size_t n, int workers, Fn&& fn) {
  std::vector<Outcome> results(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) results[i] = fn(i);
  };
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return results;
}

Outcome failed(const std::string& id, semcut_status status, const std::string& what) {
  Outcome o;
  o.summary = json{{"id", id}, {"status", "error"}, {"error", {{"code", semcut_status_name(status)}, {"message", what}}}};
  o.message = id + ": " + what;
  return o;
}

template <class Fn>
Outcome guarded_record(const std::string& id, Fn&& fn) {
  try {
    return fn();
  } catch (const Failure& e) {
    return failed(id, e.status, e.what());
  } catch (const std::exception& e) {
    return failed(id, SEMCUT_ERR_INTERNAL, e.what());
  }
}

int finish(const std::string& command, const std::vector<Outcome>& outcomes, json summary) {
  std::size_t bad = 0;
  json records = json::array();
  for (const auto& o : outcomes) {
    if (!o.ok) ++bad;
    if (!o.message.empty()) std::cerr << o.message << '\n';
    records.push_back(o.summary);
  }
  json out{{"command", command}, {"count", outcomes.size()}, {"succeeded", outcomes.size() - bad}, {"failed", bad}};
  for (auto& [k, v] : summary.items()) out[k] = v;
  out["records"] = std::move(records);
  std::cout << out.dump(2) << '\n';
  std::cerr << command << ": " << outcomes.size() - bad << "/" << outcomes.size() << " records ok\n";
  return bad == 0 ? kExitOk : kExitPartial;
}

Manifest load_manifest(const std::string& path) {
  semcut_manifest* m = nullptr;
  if (semcut_manifest_read(path.c_str(), &m) != SEMCUT_OK)
    throw UsageError(std::string("manifest: ") + semcut_last_error());
  return Manifest(m);
}

semcut_record record_at(const semcut_manifest* m, std::size_t i) {
  semcut_record rec{};
  check(semcut_manifest_record(m, i, &rec), "manifest");
  return rec;
}

semcut_foreground_strategy parse_strategy(const std::string& name) {
  semcut_foreground_strategy s{};
  if (semcut_parse_foreground(name.c_str(), &s) != SEMCUT_OK) throw UsageError(semcut_last_error());
  return s;
}

int default_workers() {
  if (const char* env = std::getenv("SEMCUT_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "ignoring invalid SEMCUT_THREADS='" << env << "'\n";
  }
  return 1;
}

void make_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create " + dir.string() + ": " + ec.message());
}

// ---- solve

struct SolveOptions {
  std::string manifest, config, out_dir, mode, init, foreground = "least_corners";
  std::optional<std::uint64_t> seed;
  bool save_coarse = false, save_fine = false, timing = false;
  int workers = 1;
};

semcut_config resolve_config(const std::string& path, const std::string& mode, const std::string& init,
                             const std::optional<std::uint64_t>& seed) {
  semcut_config cfg;
  semcut_config_default(&cfg);
  if (!path.empty() && semcut_config_load(path.c_str(), &cfg) != SEMCUT_OK)
    throw UsageError(std::string("config: ") + semcut_last_error());
  if (!mode.empty() && semcut_parse_mode(mode.c_str(), &cfg.solver.mode) != SEMCUT_OK)
    throw UsageError(semcut_last_error());
  if (!init.empty() && semcut_parse_init(init.c_str(), &cfg.solver.init) != SEMCUT_OK)
    throw UsageError(semcut_last_error());
  if (seed) cfg.solver.seed = *seed;
  if (semcut_config_validate(&cfg) != SEMCUT_OK) throw UsageError(std::string("config: ") + semcut_last_error());
  return cfg;
}

Outcome solve_record(const semcut_record& rec, const semcut_config& cfg, semcut_foreground_strategy strategy,
                     const SolveOptions& opt) {
  const fs::path out_dir(opt.out_dir);
  const std::string id = rec.id;
  json record{{"id", id}, {"status", "ok"}, {"config", config_json(cfg)}};

  semcut_features* f = nullptr;
  check(semcut_features_read_spft(rec.features, &f), rec.features);
  Features features(f);
  Image image;
  if (rec.image) {
    semcut_image* img = nullptr;
    check(semcut_image_read(rec.image, &img), rec.image);
    image.reset(img);
  }
  Mask attention;
  if (rec.attention) {
    semcut_mask* a = nullptr;
    check(semcut_attention_read(rec.attention, &a), rec.attention);
    attention.reset(a);
  }

  semcut_solution* s = nullptr;
  check(semcut_solve(features.get(), image.get(), &cfg, &s), "solve");
  Solution sol(s);
  semcut_loss_terms final_terms{};
  semcut_solution_final_losses(sol.get(), &final_terms);
  const char* termination = semcut_termination_name(semcut_solution_termination(sol.get()));
  record["solver"] = json{{"termination", termination}, {"iterations", semcut_solution_iterations(sol.get())}};
  record["losses"] = losses_json(final_terms);

  // The foreground decision is taken on the coarse mask and applied to both.
  semcut_binary_mask* raw = nullptr;
  check(semcut_binarize(semcut_solution_coarse(sol.get()), 0.5, &raw), "binarize");
  Binary coarse_raw(raw);
  semcut_binary_mask* sel = nullptr;
  int flipped = 0, degenerate = 0;
  check(semcut_select_foreground(coarse_raw.get(), strategy, attention.get(), &sel, &flipped, &degenerate),
        "select_foreground");
  Binary coarse(sel);
  record["foreground"] = json{{"strategy", semcut_foreground_name(strategy)},
                              {"flipped", flipped != 0},
                              {"degenerate", degenerate != 0}};

  const std::string coarse_name = id + ".coarse.pgm";
  check(semcut_binary_mask_write(coarse.get(), (out_dir / coarse_name).c_str()), coarse_name);
  json outputs{{"coarse", coarse_name}};
  if (opt.save_coarse) {
    Mask soft = flipped ? flip_soft(semcut_solution_coarse(sol.get())) : nullptr;
    const semcut_mask* m = soft ? soft.get() : semcut_solution_coarse(sol.get());
    const std::string name = id + ".coarse.soft.pgm";
    check(semcut_mask_write(m, (out_dir / name).c_str()), name);
    outputs["coarse_soft"] = name;
  }

  Binary fine;
  Mask fine_soft;
  if (const semcut_mask* fm = semcut_solution_fine(sol.get())) {
    fine_soft = flipped ? flip_soft(fm) : nullptr;
    if (!fine_soft) {
      semcut_mask* copy = nullptr;
      check(semcut_mask_create(semcut_mask_height(fm), semcut_mask_width(fm), semcut_mask_values(fm), &copy),
            "copy mask");
      fine_soft.reset(copy);
    }
    semcut_binary_mask* b = nullptr;
    check(semcut_binarize(fine_soft.get(), 0.5, &b), "binarize");
    fine.reset(b);
    const std::string name = id + ".fine.pgm";
    check(semcut_binary_mask_write(fine.get(), (out_dir / name).c_str()), name);
    outputs["fine"] = name;
    if (opt.save_fine) {
      const std::string soft_name = id + ".fine.soft.pgm";
      check(semcut_mask_write(fine_soft.get(), (out_dir / soft_name).c_str()), soft_name);
      outputs["fine_soft"] = soft_name;
    }
  }
  record["outputs"] = outputs;

  // Pixel-level prediction: the fine mask, else the coarse mask upsampled to the ground truth.
  Binary gt;
  if (rec.gt_mask) gt = read_binary(rec.gt_mask);
  Binary pixel_pred;
  std::string source;
  if (fine) {
    pixel_pred = upsample(fine.get(), semcut_binary_mask_height(fine.get()), semcut_binary_mask_width(fine.get()));
    source = "fine";
  } else if (gt) {
    pixel_pred = upsample(coarse.get(), semcut_binary_mask_height(gt.get()), semcut_binary_mask_width(gt.get()));
    source = "coarse_upsampled";
  }

  if (gt && pixel_pred) {
    double acc = 0.0, iou = 0.0, fb = 0.0, thr = 0.0;
    check(semcut_accuracy(pixel_pred.get(), gt.get(), &acc), "accuracy");
    check(semcut_iou(pixel_pred.get(), gt.get(), &iou), "iou");
    Mask soft_pred;
    if (fine_soft) {
      semcut_mask* copy = nullptr;
      check(semcut_mask_create(semcut_mask_height(fine_soft.get()), semcut_mask_width(fine_soft.get()),
                               semcut_mask_values(fine_soft.get()), &copy),
            "copy mask");
      soft_pred.reset(copy);
    } else {
      semcut_mask* m = nullptr;
      check(semcut_binary_mask_to_soft(pixel_pred.get(), &m), "to_soft");
      soft_pred.reset(m);
    }
    json metrics{{"source", source}, {"acc", acc}, {"iou", iou}};
    if (semcut_binary_mask_count(gt.get()) > 0) {
      check(semcut_max_f_beta(soft_pred.get(), gt.get(), 0.3, &fb, &thr), "max_f_beta");
      metrics["max_f_beta"] = fb;
      metrics["max_f_beta_threshold"] = thr;
    } else {
      metrics["max_f_beta"] = nullptr;
    }
    record["metrics"] = metrics;
  } else {
    record["metrics"] = nullptr;
  }

  if (pixel_pred) {
    localize(pixel_pred.get(), rec, record);
  } else {
    record["bbox"] = nullptr;
    record["corloc"] = nullptr;
  }
  if (opt.timing) record["timing"] = json{{"wall_seconds", semcut_solution_wall_seconds(sol.get())}};
  write_json(out_dir / (id + ".json"), record);

  Outcome o;
  o.ok = true;
  o.summary = json{{"id", id},
                   {"status", "ok"},
                   {"termination", termination},
                   {"iterations", semcut_solution_iterations(sol.get())},
                   {"total_loss", final_terms.total},
                   {"wall_seconds", semcut_solution_wall_seconds(sol.get())}};
  if (record["metrics"].is_object()) o.summary["iou"] = record["metrics"]["iou"];
  return o;
}

int cmd_solve(const SolveOptions& opt) {
  const semcut_config cfg = resolve_config(opt.config, opt.mode, opt.init, opt.seed);
  const auto strategy = parse_strategy(opt.foreground);
  Manifest manifest = load_manifest(opt.manifest);
  make_out_dir(opt.out_dir);
  const std::size_t n = semcut_manifest_size(manifest.get());
  auto outcomes = run_batch(n, opt.workers, [&](std::size_t i) {
    const semcut_record rec = record_at(manifest.get(), i);
    Outcome o = guarded_record(rec.id, [&] { return solve_record(rec, cfg, strategy, opt); });
    if (!o.ok) {
      json record = o.summary;
      record["config"] = config_json(cfg);
      try {
        write_json(fs::path(opt.out_dir) / (std::string(rec.id) + ".json"), record);
      } catch (const std::exception& e) {
        o.message += std::string(" (") + e.what() + ")";
      }
    }
    return o;
  });
  return finish("solve", outcomes, json{{"config", config_json(cfg)}});
}

// ---- spectral

int cmd_spectral(const std::string& manifest_path, const std::string& config_path, const std::string& out_dir,
                 const std::string& foreground, int workers) {
  const semcut_config cfg = resolve_config(config_path, "", "", std::nullopt);
  const auto strategy = parse_strategy(foreground);
  Manifest manifest = load_manifest(manifest_path);
  make_out_dir(out_dir);
  const std::size_t n = semcut_manifest_size(manifest.get());
  auto outcomes = run_batch(n, workers, [&](std::size_t i) {
    const semcut_record rec = record_at(manifest.get(), i);
    return guarded_record(rec.id, [&] {
      semcut_features* f = nullptr;
      check(semcut_features_read_spft(rec.features, &f), rec.features);
      Features features(f);
      Mask attention;
      if (rec.attention) {
        semcut_mask* a = nullptr;
        check(semcut_attention_read(rec.attention, &a), rec.attention);
        attention.reset(a);
      }
      semcut_affinity* w = nullptr;
      check(semcut_affinity_semantic(features.get(), &cfg.graph, &w), "semantic_affinity");
      Affinity affinity(w);
      const std::size_t h = semcut_features_height(features.get()), wd = semcut_features_width(features.get());
      std::vector<std::uint8_t> indicator(h * wd);
      double fiedler = 0.0, residual = 0.0;
      check(semcut_spectral_bipartition(affinity.get(), indicator.data(), nullptr, &fiedler, &residual), "spectral");
      semcut_binary_mask* raw = nullptr;
      check(semcut_binary_mask_create(h, wd, indicator.data(), &raw), "mask");
      Binary mask(raw);
      semcut_binary_mask* sel = nullptr;
      int flipped = 0, degenerate = 0;
      check(semcut_select_foreground(mask.get(), strategy, attention.get(), &sel, &flipped, &degenerate),
            "select_foreground");
      Binary chosen(sel);
      const std::string name = std::string(rec.id) + ".coarse.pgm";
      check(semcut_binary_mask_write(chosen.get(), (fs::path(out_dir) / name).c_str()), name);
      json record{{"id", rec.id},
                  {"status", "ok"},
                  {"method", "spectral"},
                  {"fiedler_value", fiedler},
                  {"residual", residual},
                  {"foreground", {{"strategy", semcut_foreground_name(strategy)}, {"flipped", flipped != 0},
                                  {"degenerate", degenerate != 0}}},
                  {"outputs", {{"coarse", name}}},
                  {"graph", {{"tau", cfg.graph.tau}, {"epsilon", cfg.graph.epsilon}}}};
      write_json(fs::path(out_dir) / (std::string(rec.id) + ".json"), record);
      Outcome o;
      o.ok = true;
      o.summary = json{{"id", rec.id}, {"status", "ok"}, {"fiedler_value", fiedler}, {"residual", residual}};
      return o;
    });
  });
  return finish("spectral", outcomes, json::object());
}

// ---- eval / corloc

// The fine prediction if present, else the coarse one upsampled to (h, w).
Binary load_prediction(const fs::path& pred_dir, const std::string& id, std::size_t h, std::size_t w,
                       std::string& source) {
  const fs::path fine = pred_dir / (id + ".fine.pgm");
  if (fs::exists(fine)) {
    source = "fine";
    return upsample(read_binary(fine).get(), h, w);
  }
  const fs::path coarse = pred_dir / (id + ".coarse.pgm");
  if (!fs::exists(coarse)) throw Failure(SEMCUT_ERR_IO, "no prediction for '" + id + "' in " + pred_dir.string());
  source = "coarse_upsampled";
  return upsample(read_binary(coarse).get(), h, w);
}

int cmd_eval(const std::string& manifest_path, const std::string& pred_dir, int workers) {
  Manifest manifest = load_manifest(manifest_path);
  const std::size_t n = semcut_manifest_size(manifest.get());
  auto outcomes = run_batch(n, workers, [&](std::size_t i) {
    const semcut_record rec = record_at(manifest.get(), i);
    return guarded_record(rec.id, [&] {
      if (!rec.gt_mask) throw Failure(SEMCUT_ERR_INVALID_ARGUMENT, "record has no gt_mask");
      Binary gt = read_binary(rec.gt_mask);
      const std::size_t h = semcut_binary_mask_height(gt.get()), w = semcut_binary_mask_width(gt.get());
      std::string source;
      Binary pred = load_prediction(pred_dir, rec.id, h, w, source);
      Mask soft;
      const fs::path soft_path = fs::path(pred_dir) / (std::string(rec.id) + ".fine.soft.pgm");
      if (source == "fine" && fs::exists(soft_path)) {
        soft = read_soft(soft_path);
      } else {
        semcut_mask* m = nullptr;
        check(semcut_binary_mask_to_soft(pred.get(), &m), "to_soft");
        soft.reset(m);
      }
      double acc = 0.0, iou = 0.0, fb = 0.0, thr = 0.0;
      check(semcut_accuracy(pred.get(), gt.get(), &acc), "accuracy");
      check(semcut_iou(pred.get(), gt.get(), &iou), "iou");
      check(semcut_max_f_beta(soft.get(), gt.get(), 0.3, &fb, &thr), "max_f_beta");
      Outcome o;
      o.ok = true;
      o.summary = json{{"id", rec.id}, {"status", "ok"}, {"source", source}, {"acc", acc},
                       {"iou", iou},   {"max_f_beta", fb}, {"max_f_beta_threshold", thr}};
      return o;
    });
  });
  double acc = 0.0, iou = 0.0, fb = 0.0;
  std::size_t good = 0;
  for (const auto& o : outcomes) {
    if (!o.ok) continue;
    ++good;
    acc += o.summary["acc"].get<double>();
    iou += o.summary["iou"].get<double>();
    fb += o.summary["max_f_beta"].get<double>();
  }
  json mean = nullptr;
  if (good > 0) {
    const double k = static_cast<double>(good);
    mean = json{{"acc", acc / k}, {"iou", iou / k}, {"max_f_beta", fb / k}};
    std::cerr << "eval: mean IoU " << iou / k << ", mean Acc " << acc / k << ", mean maxFb " << fb / k << '\n';
  }
  return finish("eval", outcomes, json{{"mean", mean}});
}

int cmd_corloc(const std::string& manifest_path, const std::string& pred_dir, int workers) {
  Manifest manifest = load_manifest(manifest_path);
  const std::size_t n = semcut_manifest_size(manifest.get());
  auto outcomes = run_batch(n, workers, [&](std::size_t i) {
    const semcut_record rec = record_at(manifest.get(), i);
    return guarded_record(rec.id, [&] {
      if (rec.box_count == 0) throw Failure(SEMCUT_ERR_INVALID_ARGUMENT, "record has no boxes");
      std::size_t h = 0, w = 0;
      if (rec.gt_mask) {
        Binary gt = read_binary(rec.gt_mask);
        h = semcut_binary_mask_height(gt.get());
        w = semcut_binary_mask_width(gt.get());
      } else if (rec.image) {
        semcut_image* img = nullptr;
        check(semcut_image_read(rec.image, &img), rec.image);
        Image image(img);
        h = semcut_image_height(image.get());
        w = semcut_image_width(image.get());
      } else {
        const fs::path fine = fs::path(pred_dir) / (std::string(rec.id) + ".fine.pgm");
        if (!fs::exists(fine)) throw Failure(SEMCUT_ERR_INVALID_ARGUMENT, "cannot infer pixel dims for boxes");
        Binary m = read_binary(fine);
        h = semcut_binary_mask_height(m.get());
        w = semcut_binary_mask_width(m.get());
      }
      std::string source;
      Binary pred = load_prediction(pred_dir, rec.id, h, w, source);
      Outcome o;
      o.ok = true;
      o.summary = json{{"id", rec.id}, {"status", "ok"}, {"source", source}};
      localize(pred.get(), rec, o.summary);
      return o;
    });
  });
  std::size_t good = 0, hits = 0;
  for (const auto& o : outcomes) {
    if (!o.ok) continue;
    ++good;
    if (o.summary["corloc"].is_boolean() && o.summary["corloc"].get<bool>()) ++hits;
  }
  json corloc = nullptr;
  if (good > 0) {
    corloc = static_cast<double>(hits) / static_cast<double>(good);
    std::cerr << "corloc: " << hits << "/" << good << '\n';
  }
  return finish("corloc", outcomes, json{{"corloc", corloc}});
}

// ---- synth

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::pair<std::size_t, std::size_t> parse_dims(const std::string& s) {
  const auto x = s.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    std::size_t used_h = 0, used_w = 0;
    const auto h = std::stoul(s.substr(0, x), &used_h);
    const auto w = std::stoul(s.substr(x + 1), &used_w);
    if (used_h != x || used_w != s.size() - x - 1 || h == 0 || w == 0) throw std::invalid_argument(s);
    return {h, w};
  } catch (const std::exception&) {
    throw UsageError("--dims expects HxW with positive integers, got '" + s + "'");
  }
}

int cmd_synth(std::uint64_t seed, std::size_t count, const std::string& dims, std::size_t scale,
              std::size_t channels, const std::string& out_dir) {
  const auto [gh, gw] = parse_dims(dims);
  make_out_dir(out_dir);
  std::string manifest;
  json ids = json::array();
  std::vector<Outcome> outcomes;
  for (std::size_t k = 0; k < count; ++k) {
    const std::string id = "synth_" + std::to_string(seed) + "_" + std::to_string(k);
    outcomes.push_back(guarded_record(id, [&] {
      semcut_synth_spec spec;
      semcut_synth_spec_default(&spec);
      spec.seed = splitmix64(seed + k);
      spec.grid_height = gh;
      spec.grid_width = gw;
      spec.scale = scale;
      spec.channels = channels;
      std::string line(4096, '\0');
      std::size_t len = 0;
      check(semcut_synth_write(&spec, id.c_str(), out_dir.c_str(), line.data(), line.size(), &len), "synth");
      if (len >= line.size()) throw Failure(SEMCUT_ERR_INTERNAL, "manifest line longer than 4096 bytes");
      line.resize(len);
      manifest += line + "\n";
      Outcome o;
      o.ok = true;
      o.summary = json{{"id", id}, {"status", "ok"}};
      return o;
    }));
  }
  const fs::path manifest_path = fs::path(out_dir) / "manifest.jsonl";
  std::ofstream out(manifest_path, std::ios::binary);
  out << manifest;
  if (!out) throw UsageError("cannot write " + manifest_path.string());
  return finish("synth", outcomes, json{{"manifest", manifest_path.string()}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semcut: coarse/fine saliency partitioning by relaxed normalized cut"};
  app.require_subcommand(1);
  app.set_version_flag("--version", semcut_version());

  const int env_workers = default_workers();

  SolveOptions solve;
  solve.workers = env_workers;
  auto* solve_cmd = app.add_subcommand("solve", "optimize coarse and fine masks for every manifest record");
  solve_cmd->add_option("--manifest", solve.manifest, "JSONL manifest")->required();
  solve_cmd->add_option("--out-dir", solve.out_dir, "output directory")->required();
  solve_cmd->add_option("--config", solve.config, "key = value config file");
  solve_cmd->add_option("--mode", solve.mode, "joint | sequential | fine_only");
  solve_cmd->add_option("--init", solve.init, "flat | spectral");
  solve_cmd->add_option("--seed", solve.seed, "solver seed (overrides the config)");
  solve_cmd->add_option("--foreground", solve.foreground,
                        "centrality | framing_prior | total_attention | least_corners")
      ->capture_default_str();
  solve_cmd->add_flag("--save-coarse", solve.save_coarse, "also write <id>.coarse.soft.pgm");
  solve_cmd->add_flag("--save-fine", solve.save_fine, "also write <id>.fine.soft.pgm");
  solve_cmd->add_flag("--timing", solve.timing, "record wall time in <id>.json");
  solve_cmd->add_option("--workers", solve.workers, "parallel records (default: SEMCUT_THREADS or 1)")
      ->check(CLI::PositiveNumber);

  std::string sp_manifest, sp_config, sp_out, sp_fg = "least_corners";
  int sp_workers = env_workers;
  auto* spectral_cmd = app.add_subcommand("spectral", "spectral-bipartition baseline masks");
  spectral_cmd->add_option("--manifest", sp_manifest)->required();
  spectral_cmd->add_option("--out-dir", sp_out)->required();
  spectral_cmd->add_option("--config", sp_config, "graph settings are read from here");
  spectral_cmd->add_option("--foreground", sp_fg)->capture_default_str();
  spectral_cmd->add_option("--workers", sp_workers)->check(CLI::PositiveNumber);

  std::string ev_manifest, ev_pred;
  int ev_workers = env_workers;
  auto* eval_cmd = app.add_subcommand("eval", "Acc / IoU / maxFb against gt_mask");
  eval_cmd->add_option("--manifest", ev_manifest)->required();
  eval_cmd->add_option("--pred-dir", ev_pred)->required();
  eval_cmd->add_option("--workers", ev_workers)->check(CLI::PositiveNumber);

  std::string cl_manifest, cl_pred;
  int cl_workers = env_workers;
  auto* corloc_cmd = app.add_subcommand("corloc", "largest-component box vs ground-truth boxes");
  corloc_cmd->add_option("--manifest", cl_manifest)->required();
  corloc_cmd->add_option("--pred-dir", cl_pred)->required();
  corloc_cmd->add_option("--workers", cl_workers)->check(CLI::PositiveNumber);

  std::uint64_t sy_seed = 0;
  std::size_t sy_count = 1, sy_scale = 8, sy_channels = 32;
  std::string sy_dims = "16x16", sy_out;
  auto* synth_cmd = app.add_subcommand("synth", "write planted two-region fixtures and a manifest");
  synth_cmd->add_option("--seed", sy_seed)->capture_default_str();
  synth_cmd->add_option("--count", sy_count)->capture_default_str();
  synth_cmd->add_option("--dims", sy_dims, "patch grid HxW")->capture_default_str();
  synth_cmd->add_option("--scale", sy_scale, "pixels per patch side")->capture_default_str();
  synth_cmd->add_option("--channels", sy_channels, "feature channels")->capture_default_str();
  synth_cmd->add_option("--out-dir", sy_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve);
    if (*spectral_cmd) return cmd_spectral(sp_manifest, sp_config, sp_out, sp_fg, sp_workers);
    if (*eval_cmd) return cmd_eval(ev_manifest, ev_pred, ev_workers);
    if (*corloc_cmd) return cmd_corloc(cl_manifest, cl_pred, cl_workers);
    if (*synth_cmd) return cmd_synth(sy_seed, sy_count, sy_dims, sy_scale, sy_channels, sy_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
