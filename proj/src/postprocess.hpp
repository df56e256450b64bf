#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"

namespace semcut {

enum class ForegroundStrategy { centrality, framing_prior, total_attention, least_corners };

const char* to_string(ForegroundStrategy s);
ForegroundStrategy parse_foreground_strategy(const std::string& s);

// Pixel = 1 iff value > threshold.
BinaryMask binarize(const SoftMask& mask, double threshold = 0.5);

struct ForegroundSelection {
  BinaryMask mask;
  bool flipped = false;
  bool degenerate = false;  // input was all-zero or all-one; returned unchanged
};

// Returns the input or its complement so that the 1-region is the foreground.
// `attention` is required for total_attention; its dims must equal the mask's
// or divide them by a common integer factor.
ForegroundSelection select_foreground(const BinaryMask& mask, ForegroundStrategy strategy,
                                      const SoftMask* attention = nullptr);

struct Component {
  int label = 0;
  std::size_t pixel_count = 0;
  BoundingBox bbox;
};

struct ComponentSet {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<int> labels;  // 0 = background, 1..k in raster order of first pixel
  std::vector<Component> components;
};

ComponentSet connected_components(const BinaryMask& mask);

// Largest inclusive bbox area; ties go to more pixels, then the lower label.
BoundingBox largest_bbox(const ComponentSet& components);

}  // namespace semcut
