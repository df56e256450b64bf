#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace semcut {

// Patch feature grid, channel-major (channel, row, column).
class FeatureGrid {
 public:
  FeatureGrid(std::size_t channels, std::size_t height, std::size_t width, std::vector<double> data);

  std::size_t channels() const { return channels_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t node_count() const { return height_ * width_; }
  std::span<const double> data() const { return data_; }

  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * height_ + y) * width_ + x];
  }
  // Feature vector of node (row-major node index), gathered across channels.
  std::vector<double> node_feature(std::size_t node) const;

 private:
  std::size_t channels_;
  std::size_t height_;
  std::size_t width_;
  std::vector<double> data_;
};

// RGB image with values in [0,1], channel-major.
class RgbImage {
 public:
  RgbImage(std::size_t height, std::size_t width, std::vector<double> data);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t pixel_count() const { return height_ * width_; }
  std::span<const double> data() const { return data_; }
  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * height_ + y) * width_ + x];
  }

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<double> data_;
};

// Real-valued partition indicator in [0,1], row-major.
class SoftMask {
 public:
  SoftMask(std::size_t height, std::size_t width, std::vector<double> values);
  static SoftMask constant(std::size_t height, std::size_t width, double value);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double at(std::size_t y, std::size_t x) const { return values_[y * width_ + x]; }

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<double> values_;
};

class BinaryMask {
 public:
  BinaryMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> values,
             double threshold_used = 0.5);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return values_.size(); }
  std::span<const std::uint8_t> values() const { return values_; }
  bool at(std::size_t y, std::size_t x) const { return values_[y * width_ + x] != 0; }
  double threshold_used() const { return threshold_used_; }
  std::size_t count() const;

  BinaryMask complement() const;
  SoftMask to_soft() const;
  friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
    return a.height_ == b.height_ && a.width_ == b.width_ && a.values_ == b.values_;
  }

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<std::uint8_t> values_;
  double threshold_used_;
};

// Inclusive pixel-index box.
struct BoundingBox {
  std::int64_t x_min = 0;
  std::int64_t y_min = 0;
  std::int64_t x_max = 0;
  std::int64_t y_max = 0;

  std::int64_t width() const { return x_max - x_min + 1; }
  std::int64_t height() const { return y_max - y_min + 1; }
  std::int64_t area() const { return width() * height(); }
  bool valid() const { return x_min <= x_max && y_min <= y_max; }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Plain-array kernels shared by the mask types and the loss gradients.
std::vector<double> avg_pool(std::span<const double> values, std::size_t height, std::size_t width,
                             std::size_t window);
std::vector<double> upsample_nearest(std::span<const double> values, std::size_t height, std::size_t width,
                                     std::size_t factor);

SoftMask avg_pool(const SoftMask& mask, std::size_t window);
SoftMask upsample_nearest(const SoftMask& mask, std::size_t factor);
BinaryMask upsample_nearest(const BinaryMask& mask, std::size_t factor);

}  // namespace semcut
