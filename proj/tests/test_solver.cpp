#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "error.hpp"
#include "metrics.hpp"
#include "oracles.hpp"
#include "postprocess.hpp"
#include "solver.hpp"
#include "spectral.hpp"

using namespace semcut;

namespace {

AffinityMatrix dense(const oracle::Dense& w) { return AffinityMatrix::from_dense(w.size(), oracle::flatten(w)); }

oracle::Dense two_cliques(std::size_t k, double cross) {
  oracle::Dense w = oracle::zeros(2 * k);
  for (std::size_t i = 0; i < 2 * k; ++i)
    for (std::size_t j = 0; j < 2 * k; ++j)
      if (i != j) w[i][j] = (i < k) == (j < k) ? 1.0 : cross;
  return w;
}

// 16x16 grid whose region patches carry e1 and the rest e2; the image uses two flat colors.
struct Planted {
  FeatureGrid features;
  RgbImage image;
  BinaryMask truth;
};

Planted planted(std::size_t r = 8) {
  const std::size_t g = 16, n = g * g;
  std::vector<std::uint8_t> region(n, 0);
  for (std::size_t y = 4; y < 11; ++y)
    for (std::size_t x = 5; x < 12; ++x) region[y * g + x] = 1;
  std::vector<double> f(2 * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) f[(region[i] ? 0 : 1) * n + i] = 1.0;
  const std::size_t side = g * r, plane = side * side;
  std::vector<double> px(3 * plane);
  for (std::size_t y = 0; y < side; ++y)
    for (std::size_t x = 0; x < side; ++x) {
      const bool fg = region[(y / r) * g + x / r] != 0;
      px[0 * plane + y * side + x] = fg ? 0.9 : 0.1;
      px[1 * plane + y * side + x] = fg ? 0.2 : 0.6;
      px[2 * plane + y * side + x] = 0.5;
    }
  return {FeatureGrid(2, g, g, f), RgbImage(side, side, px), BinaryMask(g, g, region)};
}

double partition_iou(const BinaryMask& a, const BinaryMask& truth) {
  return std::max(iou(a, truth), iou(a.complement(), truth));
}

}  // namespace

TEST_CASE("planted two-cluster grid is recovered from a flat start") {
  const auto p = planted();
  for (auto mode : {SolveMode::joint, SolveMode::sequential, SolveMode::fine_only}) {
    for (auto init : {InitKind::flat, InitKind::spectral}) {
      SolverConfig cfg;
      cfg.mode = mode;
      cfg.init = init;
      const auto r = solve(p.features, &p.image, LossWeights{}, GraphConfig{}, cfg);
      CAPTURE(to_string(mode));
      CAPTURE(to_string(init));
      CHECK(partition_iou(binarize(r.coarse), p.truth) >= 0.99);
      REQUIRE(r.fine.has_value());
      CHECK(partition_iou(binarize(*r.fine), upsample_nearest(p.truth, 8)) >= 0.99);
      CHECK(r.report.iterations <= (mode == SolveMode::sequential ? 2 * cfg.max_iters : cfg.max_iters));
    }
  }
}

TEST_CASE("all-identical features finish with finite output") {
  const std::size_t g = 6;
  FeatureGrid f(3, g, g, std::vector<double>(3 * g * g, 1.0));
  SolverConfig cfg;
  cfg.max_iters = 300;
  const auto r = solve(f, nullptr, LossWeights{0.0006, 0.0, 0.0}, GraphConfig{}, cfg);
  for (double v : r.coarse.values()) CHECK(std::isfinite(v));
  CHECK(std::isfinite(r.report.final_total));
  for (const auto& e : r.report.trace) CHECK(std::isfinite(e.total));
  CHECK_FALSE(r.fine.has_value());
}

TEST_CASE("random 6-node graphs: median gap to the exhaustive minimum") {
  std::vector<double> gaps;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 gen(seed + 500);
    const auto wd = oracle::random_graph(gen, 6);
    const auto w = dense(wd);
    SolverConfig cfg;
    cfg.seed = seed;
    const auto r = minimize_ncut(w, cfg);
    std::vector<std::uint8_t> side(6);
    for (std::size_t i = 0; i < 6; ++i) side[i] = r.indicator[i] > 0.5;
    const double best = exhaustive_ncut(w).value;
    const double got = discrete_ncut(w, side);
    gaps.push_back((got - best) / best);
  }
  std::nth_element(gaps.begin(), gaps.begin() + 25, gaps.end());
  CHECK(gaps[25] <= 0.05);
}

TEST_CASE("fixed seed gives bit-identical masks and traces") {
  const auto p = planted(4);
  SolverConfig cfg;
  cfg.seed = 77;
  cfg.max_iters = 400;
  const auto a = solve(p.features, &p.image, LossWeights{}, GraphConfig{}, cfg);
  const auto b = solve(p.features, &p.image, LossWeights{}, GraphConfig{}, cfg);
  CHECK(std::equal(a.coarse.values().begin(), a.coarse.values().end(), b.coarse.values().begin()));
  CHECK(std::equal(a.fine->values().begin(), a.fine->values().end(), b.fine->values().begin()));
  REQUIRE(a.report.trace.size() == b.report.trace.size());
  for (std::size_t i = 0; i < a.report.trace.size(); ++i) CHECK(a.report.trace[i].total == b.report.trace[i].total);
}

TEST_CASE("total loss at iteration 10k is at most the loss at k") {
  const auto p = planted(4);
  SolverConfig cfg;
  cfg.stop_tol = 0.0;
  cfg.max_iters = 1000;
  const auto r = solve(p.features, &p.image, LossWeights{}, GraphConfig{}, cfg);
  const auto& trace = r.report.trace;
  for (std::size_t k = 1; 10 * k < trace.size(); ++k) CHECK(trace[10 * k].total <= trace[k].total);
}

TEST_CASE("without SR and fine GTV, joint and sequential coarse masks agree") {
  const auto p = planted(4);
  const LossWeights weights{0.0006, 0.0, 0.0};
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SolverConfig cfg;
    cfg.seed = seed;
    cfg.max_iters = 500;
    cfg.mode = SolveMode::joint;
    const auto joint = solve(p.features, &p.image, weights, GraphConfig{}, cfg);
    cfg.mode = SolveMode::sequential;
    const auto seq = solve(p.features, &p.image, weights, GraphConfig{}, cfg);
    CHECK(std::equal(joint.coarse.values().begin(), joint.coarse.values().end(), seq.coarse.values().begin()));
  }
}

TEST_CASE("fine term without an image is rejected") {
  const auto p = planted(2);
  try {
    solve(p.features, nullptr, LossWeights{}, GraphConfig{}, SolverConfig{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "image required for pixel graph");
  }
  const auto r = solve(p.features, nullptr, LossWeights{0.0006, 0.0, 0.0}, GraphConfig{}, SolverConfig{});
  CHECK_FALSE(r.fine.has_value());
}

TEST_CASE("solver config validation and names") {
  SolverConfig cfg;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(SolverConfig::small_step().learning_rate == 1e-4);
  CHECK(parse_solve_mode("fine_only") == SolveMode::fine_only);
  CHECK(parse_init_kind("spectral") == InitKind::spectral);
  CHECK_THROWS_AS(parse_solve_mode("both"), Error);
  CHECK(sigmoid(0.0) == 0.5);
}

TEST_CASE("spectral split of two disconnected cliques") {
  const auto r = spectral_bipartition(dense(two_cliques(5, 0.0)));
  CHECK(std::abs(r.fiedler_value) <= 1e-10);
  for (std::size_t i = 1; i < 5; ++i) CHECK(r.indicator[i] == r.indicator[0]);
  for (std::size_t i = 6; i < 10; ++i) CHECK(r.indicator[i] == r.indicator[5]);
  CHECK(r.indicator[0] != r.indicator[5]);
  CHECK(r.residual <= 1e-6);
}

TEST_CASE("path graph P4 normalized Laplacian spectrum") {
  // 1 - cos(pi k / 3), k = 0..3.
  oracle::Dense w = oracle::zeros(4);
  for (std::size_t i = 0; i + 1 < 4; ++i) w[i][i + 1] = w[i + 1][i] = 1.0;
  const auto r = spectral_bipartition(dense(w));
  const std::vector<double> expect{0.0, 0.5, 1.5, 2.0};
  REQUIRE(r.eigenvalues.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(r.eigenvalues[k] == doctest::Approx(expect[k]).epsilon(1e-12));
  CHECK(r.fiedler_value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.indicator[0] == r.indicator[1]);
  CHECK(r.indicator[2] == r.indicator[3]);
  CHECK(r.indicator[0] != r.indicator[3]);
}

TEST_CASE("spectral residual on random graphs") {
  std::mt19937_64 gen(12);
  for (int t = 0; t < 20; ++t) {
    const auto r = spectral_bipartition(dense(oracle::random_graph(gen, 30, 0.5, 0.1, 1.0)));
    CHECK(r.residual <= 1e-6);
    double norm = 0.0;
    for (double v : r.fiedler_vector) norm += v * v;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));
  }
  oracle::Dense isolated = oracle::zeros(3);
  isolated[0][1] = isolated[1][0] = 1.0;
  CHECK_THROWS_AS(spectral_bipartition(dense(isolated)), Error);
}

TEST_CASE("spectral partition of the planted grid matches the solver") {
  const auto p = planted();
  const auto sp = spectral_bipartition(semantic_affinity(p.features, GraphConfig{}));
  const BinaryMask spectral(16, 16, sp.indicator);
  const auto r = solve(p.features, &p.image, LossWeights{}, GraphConfig{}, SolverConfig{});
  CHECK(partition_iou(spectral, binarize(r.coarse)) >= 0.99);
}

TEST_CASE("exhaustive ncut") {
  SUBCASE("two nodes") {
    const auto r = exhaustive_ncut(AffinityMatrix::from_edges(2, {{0, 1, 0.3}}));
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("two eps-joined triangles") {
    const auto r = exhaustive_ncut(dense(two_cliques(3, 1e-3)));
    CHECK(r.indicator[0] == r.indicator[1]);
    CHECK(r.indicator[1] == r.indicator[2]);
    CHECK(r.indicator[3] == r.indicator[4]);
    CHECK(r.indicator[4] == r.indicator[5]);
    CHECK(r.indicator[0] != r.indicator[3]);
  }
  SUBCASE("minimum lower-bounds random indicators") {
    std::mt19937_64 gen(13);
    for (int t = 0; t < 5; ++t) {
      const auto wd = oracle::random_graph(gen, 10);
      const auto best = exhaustive_ncut(dense(wd));
      CHECK(best.value == doctest::Approx(oracle::discrete_ncut(wd, best.indicator)).epsilon(1e-12));
      for (int k = 0; k < 1000; ++k) {
        auto side = oracle::random_bits(gen, 10);
        const auto ones = std::count(side.begin(), side.end(), 1);
        if (ones == 0 || ones == 10) continue;
        CHECK(best.value <= oracle::discrete_ncut(wd, side) + 1e-15);
      }
    }
  }
  SUBCASE("size limit") { CHECK_THROWS_AS(exhaustive_ncut(dense(oracle::zeros(17))), Error); }
}

TEST_CASE("discrete ncut matches double summation") {
  std::mt19937_64 gen(14);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + gen() % 11;
    const auto wd = oracle::random_graph(gen, n);
    auto side = oracle::random_bits(gen, n);
    side[0] = 1;
    side[n - 1] = 0;
    CHECK(discrete_ncut(dense(wd), side) == doctest::Approx(oracle::discrete_ncut(wd, side)).epsilon(1e-12));
  }
}
