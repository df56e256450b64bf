#include "postprocess.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace semcut {

const char* to_string(ForegroundStrategy s) {
  switch (s) {
    case ForegroundStrategy::centrality: return "centrality";
    case ForegroundStrategy::framing_prior: return "framing_prior";
    case ForegroundStrategy::total_attention: return "total_attention";
    case ForegroundStrategy::least_corners: return "least_corners";
  }
  return "?";
}

ForegroundStrategy parse_foreground_strategy(const std::string& s) {
  if (s == "centrality") return ForegroundStrategy::centrality;
  if (s == "framing_prior") return ForegroundStrategy::framing_prior;
  if (s == "total_attention") return ForegroundStrategy::total_attention;
  if (s == "least_corners") return ForegroundStrategy::least_corners;
  fail(ErrorCode::config, "unknown foreground strategy '" + s + "'");
}

BinaryMask binarize(const SoftMask& mask, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) fail(ErrorCode::invalid_argument, "threshold must lie in [0,1]");
  std::vector<std::uint8_t> out(mask.size());
  auto v = mask.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i] > threshold ? 1 : 0;
  return BinaryMask(mask.height(), mask.width(), std::move(out), threshold);
}

namespace {

// Negative: side 1 is the foreground. Positive: side 0. Zero: undecided.
int prefer_smaller(const BinaryMask& mask) {
  const std::size_t ones = mask.count(), zeros = mask.size() - ones;
  if (ones < zeros) return -1;
  if (zeros < ones) return 1;
  return 0;
}

int centrality(const BinaryMask& mask) {
  const double cy = (static_cast<double>(mask.height()) - 1.0) / 2.0;
  const double cx = (static_cast<double>(mask.width()) - 1.0) / 2.0;
  double sum[2] = {0.0, 0.0};
  std::size_t count[2] = {0, 0};
  for (std::size_t y = 0; y < mask.height(); ++y)
    for (std::size_t x = 0; x < mask.width(); ++x) {
      const int side = mask.at(y, x) ? 1 : 0;
      sum[side] += std::hypot(static_cast<double>(y) - cy, static_cast<double>(x) - cx);
      ++count[side];
    }
  const double mean0 = sum[0] / static_cast<double>(count[0]);
  const double mean1 = sum[1] / static_cast<double>(count[1]);
  if (mean1 < mean0) return -1;
  if (mean0 < mean1) return 1;
  return prefer_smaller(mask);
}

// A side frames the image when its pixels reach every column or every row.
bool frames(const BinaryMask& mask, bool side) {
  std::vector<bool> rows(mask.height(), false), cols(mask.width(), false);
  for (std::size_t y = 0; y < mask.height(); ++y)
    for (std::size_t x = 0; x < mask.width(); ++x)
      if (mask.at(y, x) == side) rows[y] = cols[x] = true;
  const bool all_cols = std::all_of(cols.begin(), cols.end(), [](bool b) { return b; });
  const bool all_rows = std::all_of(rows.begin(), rows.end(), [](bool b) { return b; });
  return all_cols || all_rows;
}

int framing_prior(const BinaryMask& mask) {
  const bool ones_frame = frames(mask, true), zeros_frame = frames(mask, false);
  if (ones_frame && !zeros_frame) return 1;
  if (zeros_frame && !ones_frame) return -1;
  return prefer_smaller(mask);
}

int total_attention(const BinaryMask& mask, const SoftMask& attention) {
  const std::size_t fy = mask.height() / attention.height();
  const std::size_t fx = mask.width() / attention.width();
  double sum[2] = {0.0, 0.0};
  for (std::size_t y = 0; y < mask.height(); ++y)
    for (std::size_t x = 0; x < mask.width(); ++x) sum[mask.at(y, x) ? 1 : 0] += attention.at(y / fy, x / fx);
  if (sum[1] > sum[0]) return -1;
  if (sum[0] > sum[1]) return 1;
  return prefer_smaller(mask);
}

int least_corners(const BinaryMask& mask) {
  const std::size_t h = mask.height() - 1, w = mask.width() - 1;
  const int ones = mask.at(0, 0) + mask.at(0, w) + mask.at(h, 0) + mask.at(h, w);
  const int zeros = 4 - ones;
  if (ones < zeros) return -1;
  if (zeros < ones) return 1;
  return prefer_smaller(mask);
}

}  // namespace

ForegroundSelection select_foreground(const BinaryMask& mask, ForegroundStrategy strategy, const SoftMask* attention) {
  if (strategy == ForegroundStrategy::total_attention) {
    if (attention == nullptr) fail(ErrorCode::missing_attention, "total_attention requires an attention map");
    const bool divisible = mask.height() % attention->height() == 0 && mask.width() % attention->width() == 0 &&
                           mask.height() / attention->height() == mask.width() / attention->width();
    if (!divisible) fail(ErrorCode::dimension, "attention map dims do not match the mask");
  }
  const std::size_t ones = mask.count();
  if (ones == 0 || ones == mask.size()) return {mask, false, true};

  int decision = 0;
  switch (strategy) {
    case ForegroundStrategy::centrality: decision = centrality(mask); break;
    case ForegroundStrategy::framing_prior: decision = framing_prior(mask); break;
    case ForegroundStrategy::total_attention: decision = total_attention(mask, *attention); break;
    case ForegroundStrategy::least_corners: decision = least_corners(mask); break;
  }
  if (decision > 0) return {mask.complement(), true, false};
  return {mask, false, false};
}

ComponentSet connected_components(const BinaryMask& mask) {
  const std::size_t h = mask.height(), w = mask.width();
  ComponentSet out{h, w, std::vector<int>(h * w, 0), {}};
  std::vector<std::size_t> queue;
  auto values = mask.values();
  for (std::size_t start = 0; start < h * w; ++start) {
    if (values[start] == 0 || out.labels[start] != 0) continue;
    Component comp;
    comp.label = static_cast<int>(out.components.size()) + 1;
    const auto sx = static_cast<std::int64_t>(start % w), sy = static_cast<std::int64_t>(start / w);
    comp.bbox = {sx, sy, sx, sy};
    queue.assign(1, start);
    out.labels[start] = comp.label;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t p = queue[head];
      const std::size_t y = p / w, x = p % w;
      ++comp.pixel_count;
      comp.bbox.x_min = std::min(comp.bbox.x_min, static_cast<std::int64_t>(x));
      comp.bbox.x_max = std::max(comp.bbox.x_max, static_cast<std::int64_t>(x));
      comp.bbox.y_min = std::min(comp.bbox.y_min, static_cast<std::int64_t>(y));
      comp.bbox.y_max = std::max(comp.bbox.y_max, static_cast<std::int64_t>(y));
      auto visit = [&](std::size_t q) {
        if (values[q] != 0 && out.labels[q] == 0) {
          out.labels[q] = comp.label;
          queue.push_back(q);
        }
      };
      if (x > 0) visit(p - 1);
      if (x + 1 < w) visit(p + 1);
      if (y > 0) visit(p - w);
      if (y + 1 < h) visit(p + w);
    }
    out.components.push_back(comp);
  }
  return out;
}

BoundingBox largest_bbox(const ComponentSet& components) {
  if (components.components.empty()) fail(ErrorCode::empty_input, "largest_bbox: mask has no foreground component");
  const Component* best = &components.components.front();
  for (const Component& c : components.components) {
    const auto area = c.bbox.area(), best_area = best->bbox.area();
    if (area > best_area || (area == best_area && c.pixel_count > best->pixel_count)) best = &c;
  }
  return best->bbox;
}

}  // namespace semcut
