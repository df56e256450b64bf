#include "core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace semcut {

namespace {

void require_positive(std::size_t v, const char* what) {
  if (v == 0) fail(ErrorCode::dimension, std::string(what) + " must be positive");
}

}  // namespace

FeatureGrid::FeatureGrid(std::size_t channels, std::size_t height, std::size_t width, std::vector<double> data)
    : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
  require_positive(channels, "feature channels");
  require_positive(height, "feature height");
  require_positive(width, "feature width");
  if (data_.size() != channels * height * width)
    fail(ErrorCode::dimension, "feature data length " + std::to_string(data_.size()) + " != channels*height*width");
  if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); }))
    fail(ErrorCode::non_finite, "feature grid contains non-finite values");
}

std::vector<double> FeatureGrid::node_feature(std::size_t node) const {
  std::vector<double> f(channels_);
  const std::size_t plane = height_ * width_;
  for (std::size_t c = 0; c < channels_; ++c) f[c] = data_[c * plane + node];
  return f;
}

RgbImage::RgbImage(std::size_t height, std::size_t width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  require_positive(height, "image height");
  require_positive(width, "image width");
  if (data_.size() != 3 * height * width) fail(ErrorCode::dimension, "image data length != 3*height*width");
  for (double v : data_) {
    if (!std::isfinite(v)) fail(ErrorCode::non_finite, "image contains non-finite values");
    if (v < 0.0 || v > 1.0) fail(ErrorCode::invalid_argument, "image values must lie in [0,1]");
  }
}

SoftMask::SoftMask(std::size_t height, std::size_t width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  require_positive(height, "mask height");
  require_positive(width, "mask width");
  if (values_.size() != height * width) fail(ErrorCode::dimension, "mask length != height*width");
  for (double v : values_) {
    if (!std::isfinite(v)) fail(ErrorCode::non_finite, "mask contains non-finite values");
    if (v < 0.0 || v > 1.0) fail(ErrorCode::invalid_argument, "soft mask values must lie in [0,1]");
  }
}

SoftMask SoftMask::constant(std::size_t height, std::size_t width, double value) {
  return SoftMask(height, width, std::vector<double>(height * width, value));
}

BinaryMask::BinaryMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> values,
                       double threshold_used)
    : height_(height), width_(width), values_(std::move(values)), threshold_used_(threshold_used) {
  require_positive(height, "mask height");
  require_positive(width, "mask width");
  if (values_.size() != height * width) fail(ErrorCode::dimension, "mask length != height*width");
  for (auto v : values_)
    if (v > 1) fail(ErrorCode::invalid_argument, "binary mask values must be 0 or 1");
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::complement() const {
  std::vector<std::uint8_t> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](std::uint8_t v) -> std::uint8_t { return 1 - v; });
  return BinaryMask(height_, width_, std::move(out), threshold_used_);
}

SoftMask BinaryMask::to_soft() const {
  return SoftMask(height_, width_, std::vector<double>(values_.begin(), values_.end()));
}

std::vector<double> avg_pool(std::span<const double> values, std::size_t height, std::size_t width,
                             std::size_t window) {
  if (window == 0) fail(ErrorCode::invalid_argument, "pooling window must be positive");
  if (values.size() != height * width) fail(ErrorCode::dimension, "pool input length != height*width");
  if (height % window != 0)
    fail(ErrorCode::dimension, "height " + std::to_string(height) + " not divisible by " + std::to_string(window));
  if (width % window != 0)
    fail(ErrorCode::dimension, "width " + std::to_string(width) + " not divisible by " + std::to_string(window));
  const std::size_t oh = height / window, ow = width / window;
  std::vector<double> out(oh * ow, 0.0);
  // Each output sums its block in raster order before dividing once.
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      double sum = 0.0;
      for (std::size_t dy = 0; dy < window; ++dy) {
        const double* row = values.data() + (oy * window + dy) * width + ox * window;
        for (std::size_t dx = 0; dx < window; ++dx) sum += row[dx];
      }
      out[oy * ow + ox] = sum / static_cast<double>(window * window);
    }
  }
  return out;
}

std::vector<double> upsample_nearest(std::span<const double> values, std::size_t height, std::size_t width,
                                     std::size_t factor) {
  if (factor == 0) fail(ErrorCode::invalid_argument, "upsampling factor must be positive");
  if (values.size() != height * width) fail(ErrorCode::dimension, "upsample input length != height*width");
  const std::size_t oh = height * factor, ow = width * factor;
  std::vector<double> out(oh * ow);
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t x = 0; x < ow; ++x) out[y * ow + x] = values[(y / factor) * width + x / factor];
  return out;
}

SoftMask avg_pool(const SoftMask& mask, std::size_t window) {
  auto pooled = avg_pool(mask.values(), mask.height(), mask.width(), window);
  // Rounding can push a block mean of values near 1 a hair past the bound.
  for (double& v : pooled) v = std::clamp(v, 0.0, 1.0);
  return SoftMask(mask.height() / window, mask.width() / window, std::move(pooled));
}

SoftMask upsample_nearest(const SoftMask& mask, std::size_t factor) {
  return SoftMask(mask.height() * factor, mask.width() * factor,
                  upsample_nearest(mask.values(), mask.height(), mask.width(), factor));
}

BinaryMask upsample_nearest(const BinaryMask& mask, std::size_t factor) {
  if (factor == 0) fail(ErrorCode::invalid_argument, "upsampling factor must be positive");
  const std::size_t oh = mask.height() * factor, ow = mask.width() * factor;
  std::vector<std::uint8_t> out(oh * ow);
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t x = 0; x < ow; ++x) out[y * ow + x] = mask.at(y / factor, x / factor) ? 1 : 0;
  return BinaryMask(oh, ow, std::move(out), mask.threshold_used());
}

}  // namespace semcut
