#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "stride/error.hpp"

namespace stride::perceptpost {

/// Network output resolution relative to the input image.
constexpr int output_stride = 4;

/// Row-major grid of non-negative cell values. Cell (x, y) is centred on
/// the integer coordinates (x, y).
class Heatmap
{
public:
  Heatmap() = default;
  Heatmap(int width, int height, double fill = 0.0);

  /// Output map for an input image of the given size.
  static Heatmap for_input(int image_width, int image_height);

  int width() const { return width_; }
  int height() const { return height_; }
  double& at(int x, int y) { return values_[index(x, y)]; }
  double at(int x, int y) const { return values_[index(x, y)]; }
  const std::vector<double>& values() const { return values_; }

  /// Throws InvalidState on negative or non-finite values.
  void validate() const;

private:
  std::size_t index(int x, int y) const
  {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

/// Blob radius per object class, in output cells.
struct BlobSigma
{
  double ball = 2.0;
  double goalpost = 2.0;
  double robot = 4.0;
};

/// Max-composition of unit-height Gaussians, so overlapping blobs keep
/// their peaks at 1.
Heatmap encode_targets(const std::vector<Eigen::Vector2d>& centers, double sigma, int width, int height);

struct BlobDetection
{
  double x = 0.0;
  double y = 0.0;
  double score = 0.0;
  std::size_t area = 0;
};

/// Cells above `threshold` grouped into 8-connected regions, each region
/// split at its saddles so that every regional maximum yields one detection
/// at the intensity-weighted centroid of its cells. Sorted by descending
/// score.
std::vector<BlobDetection> decode_blobs(const Heatmap& map, double threshold);

/// Binary 16-bit PGM; values in [0, 1] map linearly onto [0, 65535].
void write_pgm(const Heatmap& map, std::ostream& out);
Heatmap read_pgm(std::istream& in);

} // namespace stride::perceptpost
