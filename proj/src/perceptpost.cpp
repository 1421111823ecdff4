#include "stride/perceptpost.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

namespace stride::perceptpost {

namespace {

struct DisjointSet
{
  std::vector<std::size_t> parent;

  explicit DisjointSet(std::size_t n)
    : parent(n)
  {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }

  std::size_t find(std::size_t i)
  {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b)
  {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
    }
  }
};

constexpr int dx8[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
constexpr int dy8[8] = {-1, -1, -1, 0, 0, 1, 1, 1};

} // namespace

Heatmap::Heatmap(int width, int height, double fill)
  : width_(width)
  , height_(height)
{
  if (width <= 0 || height <= 0) {
    throw InvalidState("heatmap size must be positive");
  }
  values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Heatmap Heatmap::for_input(int image_width, int image_height)
{
  return Heatmap(image_width / output_stride, image_height / output_stride);
}

void Heatmap::validate() const
{
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidState("heatmap values must be finite and non-negative");
    }
  }
}

Heatmap encode_targets(const std::vector<Eigen::Vector2d>& centers, double sigma, int width, int height)
{
  if (!(sigma > 0.0)) {
    throw InvalidState("blob sigma must be positive");
  }
  Heatmap map(width, height);
  for (const auto& c : centers) {
    if (!(c.x() >= 0.0 && c.x() < width && c.y() >= 0.0 && c.y() < height)) {
      throw InvalidState("blob center outside the heatmap");
    }
  }
  const double k = -0.5 / (sigma * sigma);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double v = 0.0;
      for (const auto& c : centers) {
        const double ddx = x - c.x();
        const double ddy = y - c.y();
        v = std::max(v, std::exp(k * (ddx * ddx + ddy * ddy)));
      }
      map.at(x, y) = v;
    }
  }
  return map;
}

std::vector<BlobDetection> decode_blobs(const Heatmap& map, double threshold)
{
  if (!(threshold > 0.0)) {
    throw InvalidState("decode threshold must be positive");
  }
  const int w = map.width();
  const int h = map.height();
  const std::size_t n = map.values().size();
  auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x); };

  // Each cell above threshold points at its steepest higher neighbour; cells
  // without one are tops, and touching tops (equal by construction) merge.
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> uphill(n, none);
  DisjointSet tops(n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = map.at(x, y);
      if (!(v > threshold)) {
        continue;
      }
      double best = v;
      for (int k = 0; k < 8; ++k) {
        const int nx = x + dx8[k];
        const int ny = y + dy8[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
          continue;
        }
        if (map.at(nx, ny) > best) {
          best = map.at(nx, ny);
          uphill[idx(x, y)] = idx(nx, ny);
        }
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!(map.at(x, y) > threshold) || uphill[idx(x, y)] != none) {
        continue;
      }
      for (int k = 0; k < 8; ++k) {
        const int nx = x + dx8[k];
        const int ny = y + dy8[k];
        if (nx >= 0 && ny >= 0 && nx < w && ny < h && map.at(nx, ny) > threshold && uphill[idx(nx, ny)] == none) {
          tops.unite(idx(x, y), idx(nx, ny));
        }
      }
    }
  }

  struct Accum
  {
    double sx = 0.0;
    double sy = 0.0;
    double sw = 0.0;
    double peak = 0.0;
    std::size_t area = 0;
  };
  std::vector<std::size_t> label(n, none);
  std::vector<Accum> blobs;
  std::vector<std::size_t> blob_of_top(n, none);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = map.at(x, y);
      if (!(v > threshold)) {
        continue;
      }
      std::size_t c = idx(x, y);
      while (uphill[c] != none) {
        c = uphill[c];
      }
      const std::size_t root = tops.find(c);
      if (blob_of_top[root] == none) {
        blob_of_top[root] = blobs.size();
        blobs.emplace_back();
      }
      Accum& b = blobs[blob_of_top[root]];
      b.sx += v * x;
      b.sy += v * y;
      b.sw += v;
      b.peak = std::max(b.peak, v);
      ++b.area;
    }
  }

  std::vector<BlobDetection> out;
  out.reserve(blobs.size());
  for (const auto& b : blobs) {
    out.push_back({b.sx / b.sw, b.sy / b.sw, b.peak, b.area});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  return out;
}

void write_pgm(const Heatmap& map, std::ostream& out)
{
  out << "P5\n" << map.width() << ' ' << map.height() << "\n65535\n";
  for (double v : map.values()) {
    const auto q = static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
    out.put(static_cast<char>((q >> 8) & 0xff));
    out.put(static_cast<char>(q & 0xff));
  }
}

Heatmap read_pgm(std::istream& in)
{
  std::string magic;
  int width = 0;
  int height = 0;
  int maxval = 0;
  in >> magic >> width >> height >> maxval;
  if (!in || magic != "P5" || maxval != 65535) {
    throw ConfigError("pgm", "expected a 16-bit binary PGM");
  }
  in.get();
  Heatmap map(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int hi = in.get();
      const int lo = in.get();
      if (!in) {
        throw ConfigError("pgm", "truncated pixel data");
      }
      map.at(x, y) = static_cast<double>((hi << 8) | lo) / 65535.0;
    }
  }
  return map;
}

} // namespace stride::perceptpost
