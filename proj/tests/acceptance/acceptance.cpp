// Acceptance suite: one PASS/FAIL line per criterion 1-8.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "io.hpp"
#include "losses.hpp"
#include "metrics.hpp"
#include "oracles.hpp"
#include "postprocess.hpp"
#include "rng.hpp"
#include "solver.hpp"
#include "spectral.hpp"
#include "synth.hpp"

using namespace semcut;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

AffinityMatrix dense(const oracle::Dense& w) { return AffinityMatrix::from_dense(w.size(), oracle::flatten(w)); }

double partition_iou(const BinaryMask& a, const BinaryMask& b) {
  return std::max(iou(a, b), iou(a.complement(), b));
}

// ---- 1: analytic gradients vs central differences

constexpr double kGradTol = 1e-6;
constexpr double kFdStep = 1e-6;

Outcome gradients() {
  const auto t0 = Clock::now();
  double worst[5] = {0, 0, 0, 0, 0};  // ncut, gtv coarse graph, gtv pixel graph, sr, total
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 gen(seed);
    const std::size_t ch = 8, cw = 8, r = 4, fh = ch * r, fw = cw * r;
    FeatureGrid f(6, ch, cw, oracle::random_unit(gen, 6 * ch * cw, -1.0, 1.0));
    RgbImage img(fh, fw, oracle::random_unit(gen, 3 * fh * fw));
    const GraphConfig gc;
    // Random dense weights keep the Ncut landscape nontrivial; the thresholded graph is mostly 0/1.
    const auto semantic = dense(oracle::random_graph(gen, ch * cw, 0.5, 0.05, 1.0));
    const auto coarse_graph = coarse_neighborhood_affinity(f, gc);
    const auto pixel = pixel_affinity(img, gc.sigma);
    const auto s = oracle::random_unit(gen, ch * cw, 0.05, 0.95);
    const auto fine = oracle::random_unit(gen, fh * fw, 0.05, 0.95);

    auto check = [&](int slot, const std::vector<double>& analytic, const std::vector<double>& x,
                     const std::function<double(const std::vector<double>&)>& value) {
      worst[slot] = std::max(worst[slot], oracle::relative_error(analytic, oracle::numeric_grad(value, x, kFdStep)));
    };
    check(0, ncut_loss(s, semantic).grad, s, [&](const auto& x) { return ncut_loss(x, semantic).value; });
    check(1, gtv_loss(s, coarse_graph).grad, s, [&](const auto& x) { return gtv_loss(x, coarse_graph).value; });
    check(2, gtv_loss(fine, pixel).grad, fine, [&](const auto& x) { return gtv_loss(x, pixel).value; });

    const auto sr = sr_loss(fine, fh, fw, s, ch, cw);
    std::vector<double> joint = s, sr_grad = sr.grad_coarse;
    joint.insert(joint.end(), fine.begin(), fine.end());
    sr_grad.insert(sr_grad.end(), sr.grad_fine.begin(), sr.grad_fine.end());
    auto split = [&](const std::vector<double>& x) {
      return std::pair{std::vector<double>(x.begin(), x.begin() + ch * cw), std::vector<double>(x.begin() + ch * cw, x.end())};
    };
    check(3, sr_grad, joint, [&](const auto& x) {
      const auto [c, fi] = split(x);
      return sr_loss(fi, fh, fw, c, ch, cw).value;
    });

    const LossGraphs graphs{&semantic, &coarse_graph, &pixel, {}};
    const LossWeights weights;
    const auto tl = total_loss(s, ch, cw, fine, fh, fw, graphs, weights);
    std::vector<double> total_grad = tl.grad_coarse;
    total_grad.insert(total_grad.end(), tl.grad_fine.begin(), tl.grad_fine.end());
    check(4, total_grad, joint, [&](const auto& x) {
      const auto [c, fi] = split(x);
      return total_loss(c, ch, cw, fi, fh, fw, graphs, weights).value;
    });
  }
  const double secs = seconds_since(t0);
  const double max_err = *std::max_element(std::begin(worst), std::end(worst));
  return {max_err <= kGradTol && secs < 10.0,
          fmt("20 instances (64 nodes, 32x32 px); max rel err ncut %.2e gtv-coarse %.2e gtv-pixel %.2e sr %.2e "
              "total %.2e (tol %.0e); %.2f s (limit 10 s)",
              worst[0], worst[1], worst[2], worst[3], worst[4], kGradTol, secs)};
}

// ---- 2: relaxed Ncut on hard indicators vs discrete double sum

Outcome discrete_consistency() {
  std::mt19937_64 gen(2024);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + gen() % 11;
    // Redraw until no node is isolated, so every nontrivial partition has positive volume.
    auto w = oracle::random_graph(gen, n, 0.8, 0.01, 1.0);
    while (std::any_of(w.begin(), w.end(), [](const auto& row) { return *std::max_element(row.begin(), row.end()) == 0.0; }))
      w = oracle::random_graph(gen, n, 0.8, 0.01, 1.0);
    auto side = oracle::random_bits(gen, n);
    side[0] = 1;
    side[n - 1] = 0;
    const std::vector<double> s(side.begin(), side.end());
    worst = std::max(worst, std::abs(ncut_loss(s, dense(w)).value - oracle::discrete_ncut(w, side)));
  }
  return {worst <= 1e-12, fmt("50 graphs (n<=12); max |relaxed - discrete| %.2e (tol 1e-12)", worst)};
}

// ---- 3: solver vs exhaustive minimum

Outcome solver_optimality() {
  const auto t0 = Clock::now();
  std::vector<double> gaps;
  int infinite = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(1000 + s);
    const auto n = static_cast<std::size_t>(rng.integer(4, 12));
    std::vector<double> w(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) w[i * n + j] = w[j * n + i] = rng.uniform();
    const auto a = AffinityMatrix::from_dense(n, w);
    SolverConfig cfg;
    cfg.seed = s;
    const auto r = minimize_ncut(a, cfg);
    std::vector<std::uint8_t> side(n);
    for (std::size_t i = 0; i < n; ++i) side[i] = r.indicator[i] > 0.5;
    const double best = exhaustive_ncut(a).value;
    const double gap = (discrete_ncut(a, side) - best) / best;
    if (!std::isfinite(gap)) ++infinite;
    gaps.push_back(std::isfinite(gap) ? gap : std::numeric_limits<double>::infinity());
  }
  std::sort(gaps.begin(), gaps.end());
  const double median = 0.5 * (gaps[24] + gaps[25]);
  const double secs = seconds_since(t0);
  return {median <= 0.05 && secs < 60.0,
          fmt("50 graphs (n<=12); median gap %.4f (limit 0.05), %d one-sided binarizations; %.2f s (limit 60 s)",
              median, infinite, secs)};
}

// ---- 4, 5, 7: planted fixtures

struct ModeStats {
  int coarse_ok = 0;
  int fine_ge_upsampled = 0;
  int max_iterations = 0;
  double mean_fine_iou = 0.0;
  double seconds = 0.0;
  std::vector<BinaryMask> coarse;  // foreground-selected, per fixture
};

std::vector<Fixture> fixtures() {
  std::vector<Fixture> out;
  for (std::uint64_t k = 0; k < 25; ++k) {
    FixtureSpec spec;
    spec.seed = splitmix64(42 + k);
    out.push_back(synth_fixture(spec));
  }
  return out;
}

ModeStats run_mode(const std::vector<Fixture>& fx, SolveMode mode) {
  ModeStats st;
  const auto t0 = Clock::now();
  for (std::size_t k = 0; k < fx.size(); ++k) {
    SolverConfig cfg;
    cfg.mode = mode;
    cfg.seed = k;
    const auto r = solve(fx[k].features, &fx[k].image, LossWeights{}, GraphConfig{}, cfg);
    const auto coarse = select_foreground(binarize(r.coarse), ForegroundStrategy::least_corners);
    BinaryMask fine = binarize(*r.fine);
    if (coarse.flipped) fine = fine.complement();
    const double ci = iou(coarse.mask, fx[k].gt_patches);
    const double fi = iou(fine, fx[k].gt_pixels);
    const double ui = iou(upsample_nearest(coarse.mask, 8), fx[k].gt_pixels);
    st.coarse_ok += ci >= 0.99;
    st.fine_ge_upsampled += fi >= ui;
    st.mean_fine_iou += fi / static_cast<double>(fx.size());
    // Sequential runs two phases of up to max_iters each; count the longer one.
    const int its = mode == SolveMode::sequential
                        ? std::max(r.report.coarse_phase_iterations, r.report.iterations - r.report.coarse_phase_iterations)
                        : r.report.iterations;
    st.max_iterations = std::max(st.max_iterations, its);
    st.coarse.push_back(coarse.mask);
  }
  st.seconds = seconds_since(t0);
  return st;
}

Outcome planted_recovery(const ModeStats& joint) {
  return {joint.coarse_ok >= 24 && joint.fine_ge_upsampled >= 22 && joint.max_iterations <= 2000 && joint.seconds < 120.0,
          fmt("25 fixtures (16x16, r=8); coarse IoU>=0.99 on %d/25 (need 24), fine>=upsampled on %d/25 (need 22), "
              "max iterations %d (limit 2000); %.2f s (limit 120 s)",
              joint.coarse_ok, joint.fine_ge_upsampled, joint.max_iterations, joint.seconds)};
}

Outcome spectral_baseline(const std::vector<Fixture>& fx, const ModeStats& joint) {
  oracle::Dense w = oracle::zeros(10);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j)
      if (i != j && (i < 5) == (j < 5)) w[i][j] = 1.0;
  const auto cliques = spectral_bipartition(dense(w));
  bool recovered = cliques.indicator[0] != cliques.indicator[5];
  for (std::size_t i = 0; i < 10; ++i) recovered = recovered && cliques.indicator[i] == cliques.indicator[i < 5 ? 0 : 5];
  double worst_residual = cliques.residual;

  std::mt19937_64 gen(55);
  for (int t = 0; t < 20; ++t)
    worst_residual = std::max(worst_residual, spectral_bipartition(dense(oracle::random_graph(gen, 40, 0.5, 0.1, 1.0))).residual);

  double min_iou = 1.0;
  for (std::size_t k = 0; k < fx.size(); ++k) {
    const auto sp = spectral_bipartition(semantic_affinity(fx[k].features, GraphConfig{}));
    worst_residual = std::max(worst_residual, sp.residual);
    min_iou = std::min(min_iou, partition_iou(BinaryMask(16, 16, sp.indicator), joint.coarse[k]));
  }
  const bool pass = std::abs(cliques.fiedler_value) <= 1e-10 && recovered && worst_residual <= 1e-6 && min_iou >= 0.99;
  return {pass, fmt("two cliques: lambda2 %.2e (limit 1e-10), recovered %s; max residual %.2e over 46 graphs "
                    "(limit 1e-6); min spectral-vs-solver IoU %.4f on 25 fixtures (need 0.99)",
                    cliques.fiedler_value, recovered ? "yes" : "no", worst_residual, min_iou)};
}

Outcome ablation(const ModeStats& joint, const ModeStats& seq, const ModeStats& fine_only) {
  const double v1 = seq.mean_fine_iou - joint.mean_fine_iou;
  const double v2 = fine_only.mean_fine_iou - seq.mean_fine_iou;
  const bool pass = v1 <= 0.005 && v2 <= 0.005;
  return {pass, fmt("mean fine IoU joint %.5f, sequential %.5f, fine_only %.5f; violations %.5f, %.5f (allowance "
                    "0.005); %.1f s + %.1f s",
                    joint.mean_fine_iou, seq.mean_fine_iou, fine_only.mean_fine_iou, std::max(0.0, v1),
                    std::max(0.0, v2), seq.seconds, fine_only.seconds)};
}

// ---- 6: metrics vs brute force

Outcome metric_oracles() {
  std::mt19937_64 gen(66);
  double worst[4] = {0, 0, 0, 0};
  for (int t = 0; t < 100; ++t) {
    const std::size_t h = 1 + gen() % 12, w = 1 + gen() % 12, n = h * w;
    const auto p = oracle::random_bits(gen, n, 0.4);
    auto g = oracle::random_bits(gen, n, 0.4);
    g[gen() % n] = 1;
    const BinaryMask pm(h, w, p), gm(h, w, g);
    worst[0] = std::max(worst[0], std::abs(accuracy(pm, gm) - oracle::accuracy(p, g)));
    worst[1] = std::max(worst[1], std::abs(iou(pm, gm) - oracle::iou(p, g)));
    auto soft = oracle::random_unit(gen, n);
    for (std::size_t i = 0; i < n; i += 3) soft[i] = static_cast<double>(gen() % 256) / 255.0;
    worst[2] = std::max(worst[2], std::abs(max_f_beta(SoftMask(h, w, soft), gm).value - oracle::max_f_beta(soft, g, 0.3).first));

    std::uniform_int_distribution<long> c(0, 30);
    auto box = [&] {
      long x0 = c(gen), x1 = c(gen), y0 = c(gen), y1 = c(gen);
      return oracle::Box{std::min(x0, x1), std::min(y0, y1), std::max(x0, x1), std::max(y0, y1)};
    };
    const auto pb = box();
    std::vector<oracle::Box> gts{box(), box()};
    if (t % 4 == 0) gts[0] = {pb.x0, pb.y0, pb.x1, pb.y1 + 1};  // near the 0.5 boundary
    double best = 0.0;
    std::vector<BoundingBox> lib;
    for (const auto& b : gts) {
      best = std::max(best, oracle::box_iou(pb, b));
      lib.push_back({b.x0, b.y0, b.x1, b.y1});
    }
    const bool hit = corloc(BoundingBox{pb.x0, pb.y0, pb.x1, pb.y1}, lib);
    worst[3] = std::max(worst[3], hit == (best > 0.5) ? 0.0 : 1.0);
  }
  const std::vector<BoundingBox> half{BoundingBox{0, 0, 9, 4}};
  const bool boundary = box_iou(BoundingBox{0, 0, 9, 9}, half[0]) == 0.5 && !corloc(BoundingBox{0, 0, 9, 9}, half);
  const bool pass = worst[0] <= 1e-12 && worst[1] <= 1e-12 && worst[2] <= 1e-12 && worst[3] == 0.0 && boundary;
  return {pass, fmt("100 cases each; max diff acc %.1e iou %.1e maxF %.1e, corloc mismatches %d; "
                    "[0,0,9,9] vs [0,0,9,4] IoU 0.5 -> %s",
                    worst[0], worst[1], worst[2], static_cast<int>(worst[3]), boundary ? "miss (ok)" : "WRONG")};
}

// ---- 8: CLI determinism and byte-exact formats

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return files;
}

int sh(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / ("semcut_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::vector<std::map<std::string, std::string>> trees;
  int bad_exit = 0;
  for (const char* run : {"a", "b"}) {
    // Relative paths from inside each tree so captured stdout is comparable too.
    const fs::path dir = root / run / "tree";
    fs::create_directories(dir);
    const std::string pre = "cd '" + dir.string() + "' && '" + cli + "' ";
    const std::string logs = " 2>>../stderr.txt";
    bad_exit += sh(pre + "synth --seed 11 --count 3 --out-dir data > synth.json" + logs) != 0;
    // Solve stdout carries wall-clock seconds, so it stays outside the tree.
    bad_exit += sh(pre + "solve --manifest data/manifest.jsonl --out-dir solve --save-coarse --save-fine"
                         " > ../solve_stdout.json" + logs) != 0;
    bad_exit += sh(pre + "eval --manifest data/manifest.jsonl --pred-dir solve > eval.json" + logs) != 0;
    trees.push_back(tree(dir));
  }
  const bool identical = trees[0] == trees[1] && !trees[0].empty();

  // Every SPFT and PGM in the tree re-encodes to the same bytes.
  int roundtrips = 0, mismatches = 0;
  const fs::path dir = root / "a" / "tree";
  for (const auto& [rel, bytes] : trees[0]) {
    const fs::path p = dir / rel;
    const fs::path copy = root / "copy.bin";
    if (p.extension() == ".spft") {
      write_spft(read_spft(p), copy);
    } else if (p.extension() == ".pgm") {
      write_mask(read_soft_mask(p), copy);
    } else {
      continue;
    }
    ++roundtrips;
    mismatches += slurp(copy) != bytes;
  }
  fs::remove_all(root);
  return {identical && bad_exit == 0 && roundtrips > 0 && mismatches == 0,
          fmt("synth+solve+eval twice: %zu files, trees %s, nonzero exits %d; %d SPFT/PGM round trips, %d mismatches",
              trees[0].size(), identical ? "byte-identical" : "DIFFER", bad_exit, roundtrips, mismatches)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  auto want = [&](int c) { return wanted.empty() || wanted.count(c) > 0; };

  std::map<int, std::pair<std::string, Outcome>> results;
  auto record = [&](int c, const char* name, Outcome o) {
    results[c] = {name, std::move(o)};
    std::printf("criterion %d %-22s %s  %s\n", c, name, results[c].second.pass ? "PASS" : "FAIL",
                results[c].second.detail.c_str());
    std::fflush(stdout);
  };

  if (want(1)) record(1, "gradient-correctness", gradients());
  if (want(2)) record(2, "discrete-consistency", discrete_consistency());
  if (want(3)) record(3, "solver-optimality", solver_optimality());
  if (want(4) || want(5) || want(7)) {
    const auto fx = fixtures();
    const auto joint = run_mode(fx, SolveMode::joint);
    if (want(4)) record(4, "planted-recovery", planted_recovery(joint));
    if (want(5)) record(5, "spectral-baseline", spectral_baseline(fx, joint));
    if (want(6)) record(6, "metric-oracles", metric_oracles());
    if (want(7)) {
      const auto seq = run_mode(fx, SolveMode::sequential);
      const auto fine_only = run_mode(fx, SolveMode::fine_only);
      record(7, "ablation-direction", ablation(joint, seq, fine_only));
    }
  } else if (want(6)) {
    record(6, "metric-oracles", metric_oracles());
  }
  if (want(8)) record(8, "determinism-formats", determinism(SEMCUT_CLI));

  int failed = 0;
  for (const auto& [c, r] : results) failed += !r.second.pass;
  std::printf("%zu criteria run, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}
