#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "core.hpp"
#include "error.hpp"
#include "oracles.hpp"

using namespace semcut;

TEST_CASE("avg_pool of a 2x2 half mask is 0.5") {
  SoftMask m(2, 2, {1, 1, 0, 0});
  const auto p = avg_pool(m, 2);
  CHECK(p.height() == 1);
  CHECK(p.width() == 1);
  CHECK(p.at(0, 0) == 0.5);
}

TEST_CASE("avg_pool keeps constants") {
  for (double c : {0.0, 0.3, 1.0})
    for (std::size_t r : {1u, 2u, 4u}) {
      const auto p = avg_pool(SoftMask::constant(8, 8, c), r);
      for (double v : p.values()) CHECK(v == doctest::Approx(c).epsilon(1e-15));
    }
}

TEST_CASE("avg_pool 4x4 matches block sums") {
  std::mt19937_64 gen(11);
  const auto vals = oracle::random_unit(gen, 16);
  const auto p = avg_pool(SoftMask(4, 4, vals), 2);
  for (std::size_t by = 0; by < 2; ++by)
    for (std::size_t bx = 0; bx < 2; ++bx) {
      double sum = 0.0;
      for (std::size_t dy = 0; dy < 2; ++dy)
        for (std::size_t dx = 0; dx < 2; ++dx) sum += vals[(2 * by + dy) * 4 + 2 * bx + dx];
      CHECK(p.at(by, bx) == doctest::Approx(sum / 4.0).epsilon(1e-15));
    }
}

TEST_CASE("upsample_nearest replicates") {
  const auto u = upsample_nearest(SoftMask(1, 1, {0.3}), 2);
  CHECK(u.height() == 2);
  for (double v : u.values()) CHECK(v == 0.3);

  const auto d = upsample_nearest(SoftMask(2, 2, {1, 0, 0, 1}), 2);
  const std::vector<double> expect{1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1};
  CHECK(std::vector<double>(d.values().begin(), d.values().end()) == expect);
}

TEST_CASE("avg_pool inverts upsample_nearest") {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 20; ++t) {
    const auto vals = oracle::random_unit(gen, 6 * 5);
    const SoftMask m(6, 5, vals);
    const auto back = avg_pool(upsample_nearest(m, 4), 4);
    for (std::size_t i = 0; i < vals.size(); ++i) CHECK(back.values()[i] == doctest::Approx(vals[i]).epsilon(1e-15));
  }
  // Dyadic values are exact.
  const SoftMask dyadic(2, 2, {0.25, 0.5, 0.75, 1.0});
  const auto back = avg_pool(upsample_nearest(dyadic, 4), 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(back.values()[i] == dyadic.values()[i]);
}

TEST_CASE("avg_pool is linear and bounded") {
  std::mt19937_64 gen(9);
  for (int t = 0; t < 20; ++t) {
    const auto a = oracle::random_unit(gen, 64), b = oracle::random_unit(gen, 64);
    const double ca = 0.3, cb = 0.6;
    std::vector<double> mix(64);
    for (std::size_t i = 0; i < 64; ++i) mix[i] = ca * a[i] + cb * b[i];
    const auto pa = avg_pool(std::span<const double>(a), 8, 8, 4);
    const auto pb = avg_pool(std::span<const double>(b), 8, 8, 4);
    const auto pm = avg_pool(std::span<const double>(mix), 8, 8, 4);
    for (std::size_t i = 0; i < pm.size(); ++i) CHECK(pm[i] == doctest::Approx(ca * pa[i] + cb * pb[i]).epsilon(1e-14));
    const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
    for (double v : pa) {
      CHECK(v >= *lo);
      CHECK(v <= *hi);
    }
  }
}

TEST_CASE("pooling rejects non-divisible windows") {
  CHECK_THROWS_AS(avg_pool(SoftMask::constant(5, 4, 0.0), 2), Error);
  CHECK_THROWS_AS(avg_pool(SoftMask::constant(4, 4, 0.0), 0), Error);
}

TEST_CASE("masks validate their contents") {
  CHECK_THROWS_AS(SoftMask(2, 2, {0, 0, 0}), Error);
  CHECK_THROWS_AS(SoftMask(1, 1, {1.5}), Error);
  CHECK_THROWS_AS(SoftMask(1, 1, {std::nan("")}), Error);
  CHECK_THROWS_AS(BinaryMask(1, 1, {2}), Error);
  CHECK_THROWS_AS(RgbImage(1, 1, {0, 0}), Error);
  CHECK_THROWS_AS(FeatureGrid(2, 1, 1, {0, std::numeric_limits<double>::infinity()}), Error);
}

TEST_CASE("binary mask complement and count") {
  BinaryMask m(2, 3, {1, 0, 0, 1, 1, 0});
  CHECK(m.count() == 3);
  const auto c = m.complement();
  CHECK(c.count() == 3);
  CHECK(c.complement() == m);
  CHECK(m.to_soft().values()[0] == 1.0);
  const auto up = upsample_nearest(m, 3);
  CHECK(up.count() == 27);
}

TEST_CASE("bounding box arithmetic is inclusive") {
  BoundingBox b{0, 0, 9, 4};
  CHECK(b.width() == 10);
  CHECK(b.height() == 5);
  CHECK(b.area() == 50);
  CHECK(b.valid());
  CHECK_FALSE(BoundingBox{3, 0, 2, 0}.valid());
}
