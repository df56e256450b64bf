#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "core.hpp"
#include "io.hpp"

namespace semcut {

enum class FixtureShape { random, rect, ellipse };

struct FixtureSpec {
  std::uint64_t seed = 0;
  std::size_t grid_height = 16;
  std::size_t grid_width = 16;
  std::size_t scale = 8;      // pixels per patch side
  std::size_t channels = 32;
  FixtureShape shape = FixtureShape::random;
  std::size_t rect_height = 0;  // patches; 0 picks a random size
  std::size_t rect_width = 0;
  double feature_noise = 0.02;  // per-channel std of the feature perturbation
  double pixel_noise = 0.04;    // half-width of uniform per-channel color noise
  double tau = 0.2;             // cosine separation the features must satisfy
};

// Planted two-region instance. The foreground never touches the grid border.
struct Fixture {
  FeatureGrid features;
  RgbImage image;
  BinaryMask gt_patches;
  BinaryMask gt_pixels;
  BoundingBox box;  // pixel coordinates
};

Fixture synth_fixture(const FixtureSpec& spec);

// Writes features/<id>.spft, images/<id>.ppm, gt/<id>.pgm under `root` and
// returns the manifest record with paths relative to `root`.
ManifestRecord write_fixture(const Fixture& fixture, const std::string& id, const std::filesystem::path& root);

}  // namespace semcut
