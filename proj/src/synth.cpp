#include "synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace semcut {

namespace {

constexpr int kMaxFeatureAttempts = 64;

std::vector<double> unit_gaussian(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double sq = 0.0;
  for (double& x : v) {
    x = rng.normal();
    sq += x * x;
  }
  const double norm = std::sqrt(sq);
  for (double& x : v) x /= norm;
  return v;
}

std::vector<std::uint8_t> plant_region(const FixtureSpec& spec, Rng& rng) {
  const std::size_t gh = spec.grid_height, gw = spec.grid_width;
  FixtureShape shape = spec.shape;
  if (shape == FixtureShape::random) shape = rng.uniform() < 0.5 ? FixtureShape::rect : FixtureShape::ellipse;

  auto pick = [&](std::size_t fixed, std::size_t extent) -> std::size_t {
    if (fixed != 0) return fixed;
    const auto lo = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(0.25 * extent)));
    const auto hi = std::max<std::int64_t>(lo, static_cast<std::int64_t>(std::floor(0.6 * extent)));
    return static_cast<std::size_t>(rng.integer(lo, hi));
  };
  const std::size_t h = pick(spec.rect_height, gh), w = pick(spec.rect_width, gw);
  if (h + 2 > gh || w + 2 > gw)
    fail(ErrorCode::invalid_argument, "fixture geometry " + std::to_string(h) + "x" + std::to_string(w) +
                                          " does not fit inside a " + std::to_string(gh) + "x" + std::to_string(gw) +
                                          " grid with a one-patch margin");
  const auto y0 = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(gh - 1 - h)));
  const auto x0 = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(gw - 1 - w)));

  std::vector<std::uint8_t> mask(gh * gw, 0);
  const double cy = y0 + h / 2.0, cx = x0 + w / 2.0, ry = h / 2.0, rx = w / 2.0;
  for (std::size_t y = y0; y < y0 + h; ++y) {
    for (std::size_t x = x0; x < x0 + w; ++x) {
      bool inside = true;
      if (shape == FixtureShape::ellipse) {
        const double dy = (y + 0.5 - cy) / ry, dx = (x + 0.5 - cx) / rx;
        inside = dy * dy + dx * dx <= 1.0;
      }
      mask[y * gw + x] = inside ? 1 : 0;
    }
  }
  return mask;
}

double cosine(const std::vector<double>& f, std::size_t n, std::size_t dim, std::size_t i, std::size_t j) {
  double dot = 0.0, ni = 0.0, nj = 0.0;
  for (std::size_t c = 0; c < dim; ++c) {
    const double a = f[c * n + i], b = f[c * n + j];
    dot += a * b;
    ni += a * a;
    nj += b * b;
  }
  return dot / std::sqrt(ni * nj);
}

bool separated(const std::vector<double>& f, const std::vector<std::uint8_t>& region, std::size_t dim, double tau) {
  const std::size_t n = region.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = cosine(f, n, dim, i, j);
      if (region[i] == region[j] ? !(c > tau) : !(c < tau)) return false;
    }
  return true;
}

}  // namespace

Fixture synth_fixture(const FixtureSpec& spec) {
  if (spec.grid_height == 0 || spec.grid_width == 0 || spec.scale == 0 || spec.channels < 2)
    fail(ErrorCode::invalid_argument, "fixture dims must be positive and channels >= 2");
  Rng rng(spec.seed);
  const std::size_t gh = spec.grid_height, gw = spec.grid_width, n = gh * gw, dim = spec.channels;
  const auto region = plant_region(spec, rng);

  // Foreground and background directions are orthogonal unit vectors.
  const auto fg_dir = unit_gaussian(rng, dim);
  auto bg_dir = unit_gaussian(rng, dim);
  double proj = 0.0;
  for (std::size_t c = 0; c < dim; ++c) proj += fg_dir[c] * bg_dir[c];
  double sq = 0.0;
  for (std::size_t c = 0; c < dim; ++c) {
    bg_dir[c] -= proj * fg_dir[c];
    sq += bg_dir[c] * bg_dir[c];
  }
  for (double& x : bg_dir) x /= std::sqrt(sq);

  // Values pass through float32 so the in-memory grid equals its SPFT file.
  std::vector<double> features(dim * n);
  bool ok = false;
  for (int attempt = 0; attempt < kMaxFeatureAttempts && !ok; ++attempt) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& dir = region[i] ? fg_dir : bg_dir;
      const double magnitude = rng.uniform(0.5, 2.0);
      for (std::size_t c = 0; c < dim; ++c)
        features[c * n + i] = static_cast<float>(magnitude * (dir[c] + spec.feature_noise * rng.normal()));
    }
    ok = separated(features, region, dim, spec.tau);
  }
  if (!ok) fail(ErrorCode::invalid_argument, "fixture feature noise too large to keep the regions separated");

  std::array<double, 3> fg_color{}, bg_color{};
  for (;;) {
    double dist = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      fg_color[c] = rng.uniform(0.1, 0.9);
      bg_color[c] = rng.uniform(0.1, 0.9);
      dist += (fg_color[c] - bg_color[c]) * (fg_color[c] - bg_color[c]);
    }
    if (std::sqrt(dist) >= 0.8) break;
  }

  const std::size_t r = spec.scale, ih = gh * r, iw = gw * r, plane = ih * iw;
  std::vector<double> pixels(3 * plane);
  for (std::size_t y = 0; y < ih; ++y)
    for (std::size_t x = 0; x < iw; ++x) {
      const auto& base = region[(y / r) * gw + x / r] ? fg_color : bg_color;
      for (std::size_t c = 0; c < 3; ++c) {
        const double v = std::clamp(base[c] + rng.uniform(-spec.pixel_noise, spec.pixel_noise), 0.0, 1.0);
        pixels[c * plane + y * iw + x] = std::lround(v * 255.0) / 255.0;  // 8-bit, as stored on disk
      }
    }

  BinaryMask gt_patches(gh, gw, region);
  BinaryMask gt_pixels = upsample_nearest(gt_patches, r);
  BoundingBox box{static_cast<std::int64_t>(iw), static_cast<std::int64_t>(ih), -1, -1};
  for (std::size_t y = 0; y < ih; ++y)
    for (std::size_t x = 0; x < iw; ++x)
      if (gt_pixels.at(y, x)) {
        box.x_min = std::min<std::int64_t>(box.x_min, x);
        box.y_min = std::min<std::int64_t>(box.y_min, y);
        box.x_max = std::max<std::int64_t>(box.x_max, x);
        box.y_max = std::max<std::int64_t>(box.y_max, y);
      }
  return Fixture{FeatureGrid(dim, gh, gw, std::move(features)), RgbImage(ih, iw, std::move(pixels)),
                 std::move(gt_patches), std::move(gt_pixels), box};
}

ManifestRecord write_fixture(const Fixture& fixture, const std::string& id, const std::filesystem::path& root) {
  ManifestRecord rec;
  rec.id = id;
  rec.features = std::filesystem::path("features") / (id + ".spft");
  rec.image = std::filesystem::path("images") / (id + ".ppm");
  rec.gt_mask = std::filesystem::path("gt") / (id + ".pgm");
  rec.boxes = {fixture.box};
  write_spft(fixture.features, root / rec.features);
  write_image(fixture.image, root / *rec.image);
  write_mask(fixture.gt_pixels, root / *rec.gt_mask);
  return rec;
}

}  // namespace semcut
