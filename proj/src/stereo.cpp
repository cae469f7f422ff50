#include "maeb/stereo.hpp"

#include "maeb/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace maeb {

namespace {

using CostVolume = std::vector<std::uint8_t>;

struct VolumeShape {
  int width = 0;
  int height = 0;
  int disparities = 0;  // d_max + 1
  std::size_t index(int x, int y) const
  {
    return (static_cast<std::size_t>(y) * width + x) * static_cast<std::size_t>(disparities);
  }
};

void check_pair(const Image& left, const Image& right)
{
  if (left.width != right.width || left.height != right.height) {
    throw std::invalid_argument("stereo images must have equal sizes");
  }
  if (left.width <= 0 || left.height <= 0) {
    throw std::invalid_argument("stereo images must be non-empty");
  }
}

int census_bits(int window)
{
  return window * window - 1;
}

// Hamming cost of left (x, y) against right (x - d, y); the census bit count
// where either pixel has no signature or x - d leaves the image.
CostVolume census_cost_volume(const CensusImage& cl, const CensusImage& cr, const VolumeShape& shape, int max_cost)
{
  CostVolume c(static_cast<std::size_t>(shape.width) * shape.height * shape.disparities,
               static_cast<std::uint8_t>(max_cost));
  parallel_for(static_cast<std::size_t>(shape.height), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < shape.width; ++x) {
      if (!cl.valid(x, y)) {
        continue;
      }
      std::uint8_t* out = c.data() + shape.index(x, y);
      const std::uint64_t l = cl.at(x, y);
      const int d_hi = std::min(shape.disparities - 1, x - cr.radius);
      for (int d = 0; d <= d_hi; ++d) {
        out[d] = static_cast<std::uint8_t>(std::popcount(l ^ cr.at(x - d, y)));
      }
    }
  });
  return c;
}

struct WtaResult {
  int best = -1;
  std::uint32_t best_cost = 0;
  bool unique = false;
};

template <typename T>
WtaResult winner_take_all(const T* cost, int d_hi, double uniqueness)
{
  WtaResult r;
  if (d_hi < 0) {
    return r;
  }
  std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
  for (int d = 0; d <= d_hi; ++d) {
    if (cost[d] < best) {
      best = cost[d];
      r.best = d;
    }
  }
  std::uint32_t second = std::numeric_limits<std::uint32_t>::max();
  for (int d = 0; d <= d_hi; ++d) {
    if (std::abs(d - r.best) > 1 && cost[d] < second) {
      second = cost[d];
    }
  }
  r.best_cost = best;
  r.unique = second != std::numeric_limits<std::uint32_t>::max() &&
             static_cast<double>(best) < uniqueness * static_cast<double>(second);
  return r;
}

constexpr std::int16_t kPathSentinel = 0x3fff;

void aggregate_direction(const CostVolume& c, std::vector<std::uint16_t>& s, const VolumeShape& shape, int dx,
                         int dy, int p1, int p2)
{
  const int w = shape.width;
  const int h = shape.height;
  const int nd = shape.disparities;
  const int stride = nd + 2;
  std::vector<std::int16_t> prev(static_cast<std::size_t>(w) * stride, kPathSentinel);
  std::vector<std::int16_t> cur(static_cast<std::size_t>(w) * stride, kPathSentinel);
  std::vector<std::int16_t> prev_min(static_cast<std::size_t>(w), 0);
  std::vector<std::int16_t> cur_min(static_cast<std::size_t>(w), 0);

  const int y_begin = dy >= 0 ? 0 : h - 1;
  const int y_step = dy >= 0 ? 1 : -1;
  const int x_begin = dx >= 0 ? 0 : w - 1;
  const int x_step = dx >= 0 ? 1 : -1;

  for (int yi = 0; yi < h; ++yi) {
    const int y = y_begin + yi * y_step;
    for (int xi = 0; xi < w; ++xi) {
      const int x = x_begin + xi * x_step;
      const std::uint8_t* cost = c.data() + shape.index(x, y);
      std::int16_t* l = cur.data() + static_cast<std::size_t>(x) * stride + 1;
      const int px = x - dx;
      const int py = y - dy;
      const bool has_pred = px >= 0 && px < w && py >= 0 && py < h && (dy != 0 || dx != 0);
      std::int16_t lmin = kPathSentinel;
      if (!has_pred) {
        for (int d = 0; d < nd; ++d) {
          l[d] = cost[d];
          lmin = std::min(lmin, l[d]);
        }
      } else {
        const bool same_row = dy == 0;
        const std::int16_t* lp = (same_row ? cur.data() : prev.data()) + static_cast<std::size_t>(px) * stride + 1;
        const std::int16_t mp = same_row ? cur_min[static_cast<std::size_t>(px)] : prev_min[static_cast<std::size_t>(px)];
        const std::int16_t jump = static_cast<std::int16_t>(mp + p2);
        const auto sp1 = static_cast<std::int16_t>(p1);
        for (int d = 0; d < nd; ++d) {
          std::int16_t v = lp[d];
          v = std::min<std::int16_t>(v, static_cast<std::int16_t>(lp[d - 1] + sp1));
          v = std::min<std::int16_t>(v, static_cast<std::int16_t>(lp[d + 1] + sp1));
          v = std::min(v, jump);
          l[d] = static_cast<std::int16_t>(cost[d] + v - mp);
          lmin = std::min(lmin, l[d]);
        }
      }
      cur_min[static_cast<std::size_t>(x)] = lmin;
      std::uint16_t* acc = s.data() + shape.index(x, y);
      for (int d = 0; d < nd; ++d) {
        acc[d] = static_cast<std::uint16_t>(acc[d] + l[d]);
      }
    }
    std::swap(prev, cur);
    std::swap(prev_min, cur_min);
  }
}

// Raw cost at disparity d summed over a (2 rb + 1)^2 window, clamped at the
// image border.
double block_cost(const CostVolume& c, const VolumeShape& shape, int x, int y, int d, int rb)
{
  double acc = 0.0;
  for (int j = -rb; j <= rb; ++j) {
    const int yy = std::clamp(y + j, 0, shape.height - 1);
    for (int i = -rb; i <= rb; ++i) {
      const int xx = std::clamp(x + i, 0, shape.width - 1);
      acc += c[shape.index(xx, yy) + static_cast<std::size_t>(d)];
    }
  }
  return acc;
}

}  // namespace

std::size_t DisparityMap::valid_count() const
{
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](float v) { return v >= 0.0f; }));
}

double DisparityMap::valid_fraction() const
{
  return values.empty() ? 0.0 : static_cast<double>(valid_count()) / static_cast<double>(values.size());
}

void MatchingParams::validate() const
{
  if (d_max < 1 || d_max > 255) {
    throw std::invalid_argument("matching.d_max must lie in [1, 255]");
  }
  if (census_window < 3 || census_window > 7 || census_window % 2 == 0) {
    throw std::invalid_argument("matching.census_window must be odd and in [3, 7]");
  }
  if (census_threshold < 0 || census_threshold > 64) {
    throw std::invalid_argument("matching.census_threshold must lie in [0, 64]");
  }
  if (block_window < 1 || block_window % 2 == 0 || block_window > 31) {
    throw std::invalid_argument("matching.block_window must be odd and in [1, 31]");
  }
  if (!(p1 > 0 && p2 >= p1) || p2 > 1000) {
    throw std::invalid_argument("matching penalties must satisfy 0 < p1 <= p2 <= 1000");
  }
  if (paths != 4 && paths != 8) {
    throw std::invalid_argument("matching.paths must be 4 or 8");
  }
  if (!(lr_threshold >= 0.0)) {
    throw std::invalid_argument("matching.lr_threshold must be >= 0");
  }
  if (!(uniqueness > 0.0 && uniqueness <= 1.0)) {
    throw std::invalid_argument("matching.uniqueness must lie in (0, 1]");
  }
}

CensusImage census_transform(const Image& img, int window, int threshold)
{
  CensusImage c;
  c.width = img.width;
  c.height = img.height;
  c.radius = window / 2;
  c.bits.assign(img.pixels.size(), 0);
  c.textured.assign(img.pixels.size(), 0);
  const int r = c.radius;
  parallel_for(static_cast<std::size_t>(img.height), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    if (y < r || y >= img.height - r) {
      return;
    }
    for (int x = r; x < img.width - r; ++x) {
      const int center = img.at(x, y) - threshold;
      std::uint64_t bits = 0;
      int lo = 255;
      int hi = 0;
      for (int j = -r; j <= r; ++j) {
        for (int i = -r; i <= r; ++i) {
          const int v = img.at(x + i, y + j);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
          if (i == 0 && j == 0) {
            continue;
          }
          bits = (bits << 1) | (v < center ? 1u : 0u);
        }
      }
      const std::size_t k = static_cast<std::size_t>(y) * img.width + x;
      c.bits[k] = bits;
      c.textured[k] = hi - lo > 2 * threshold ? 1 : 0;
    }
  });
  return c;
}

DisparityMap compute_disparity_bm(const Image& left, const Image& right, const MatchingParams& p)
{
  p.validate();
  check_pair(left, right);
  const CensusImage cl = census_transform(left, p.census_window, p.census_threshold);
  const CensusImage cr = census_transform(right, p.census_window, p.census_threshold);
  const VolumeShape shape{left.width, left.height, p.d_max + 1};
  const int max_cost = census_bits(p.census_window);
  const CostVolume c = census_cost_volume(cl, cr, shape, max_cost);

  const int w = shape.width;
  const int h = shape.height;
  const int nd = shape.disparities;
  const int rb = p.block_window / 2;
  const int r = cl.radius;
  DisparityMap out(w, h);

  parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    if (y < r + rb || y >= h - r - rb) {
      return;
    }
    // Column sums over the block rows, then a sliding horizontal sum.
    std::vector<std::uint32_t> col(static_cast<std::size_t>(w) * nd, 0);
    for (int j = -rb; j <= rb; ++j) {
      for (int x = 0; x < w; ++x) {
        const std::uint8_t* src = c.data() + shape.index(x, y + j);
        std::uint32_t* dst = col.data() + static_cast<std::size_t>(x) * nd;
        for (int d = 0; d < nd; ++d) {
          dst[d] += src[d];
        }
      }
    }
    // Block costs for the whole row; BIG where the block leaves the image.
    constexpr std::uint32_t kOut = std::numeric_limits<std::uint32_t>::max() / 2;
    std::vector<std::uint32_t> block(static_cast<std::size_t>(w) * nd, kOut);
    for (int x = r + rb; x < w - r - rb; ++x) {
      std::uint32_t* dst = block.data() + static_cast<std::size_t>(x) * nd;
      const int d_hi = std::min(nd - 1, x - r - rb);
      for (int i = -rb; i <= rb; ++i) {
        const std::uint32_t* src = col.data() + static_cast<std::size_t>(x + i) * nd;
        for (int d = 0; d <= d_hi; ++d) {
          dst[d] = (i == -rb ? 0u : dst[d]) + src[d];
        }
      }
    }
    // Right-view winners for the left-right check.
    std::vector<int> right_best(static_cast<std::size_t>(w), -1);
    std::vector<std::uint32_t> column(static_cast<std::size_t>(nd));
    for (int xr = r + rb; xr < w - r - rb; ++xr) {
      const int d_hi = std::min(nd - 1, w - r - rb - 1 - xr);
      for (int d = 0; d <= d_hi; ++d) {
        column[static_cast<std::size_t>(d)] = block[static_cast<std::size_t>(xr + d) * nd + d];
      }
      right_best[static_cast<std::size_t>(xr)] = winner_take_all(column.data(), d_hi, 1.0).best;
    }
    for (int x = r + rb; x < w - r - rb; ++x) {
      if (!cl.textured[static_cast<std::size_t>(y) * w + x]) {
        continue;
      }
      const int d_hi = std::min(nd - 1, x - r - rb);
      const WtaResult wta = winner_take_all(block.data() + static_cast<std::size_t>(x) * nd, d_hi, p.uniqueness);
      // a winner on the last searchable candidate is not a confirmed minimum
      if (wta.best < 0 || !wta.unique || wta.best == d_hi) {
        continue;
      }
      const int dr = right_best[static_cast<std::size_t>(x - wta.best)];
      if (dr < 0 || std::abs(dr - wta.best) > p.lr_threshold) {
        continue;
      }
      out.at(x, y) = static_cast<float>(wta.best);
    }
  });
  return out;
}

DisparityMap compute_disparity_sgm(const Image& left, const Image& right, const MatchingParams& p)
{
  p.validate();
  check_pair(left, right);
  const CensusImage cl = census_transform(left, p.census_window, p.census_threshold);
  const CensusImage cr = census_transform(right, p.census_window, p.census_threshold);
  const VolumeShape shape{left.width, left.height, p.d_max + 1};
  const int max_cost = census_bits(p.census_window);
  const CostVolume c = census_cost_volume(cl, cr, shape, max_cost);

  std::vector<std::uint16_t> s(c.size(), 0);
  static constexpr int kDirs[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
  for (int k = 0; k < p.paths; ++k) {
    aggregate_direction(c, s, shape, kDirs[k][0], kDirs[k][1], p.p1, p.p2);
  }

  const int w = shape.width;
  const int h = shape.height;
  const int nd = shape.disparities;
  const int r = cl.radius;
  const int rb = p.block_window / 2;

  // Right-view disparities from the same aggregated volume.
  std::vector<int> right_disp(static_cast<std::size_t>(w) * h, -1);
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    std::vector<std::uint16_t> column(static_cast<std::size_t>(nd));
    for (int xr = r; xr < w - r; ++xr) {
      const int d_hi = std::min(nd - 1, w - r - 1 - xr);
      for (int d = 0; d <= d_hi; ++d) {
        column[static_cast<std::size_t>(d)] = s[shape.index(xr + d, y) + static_cast<std::size_t>(d)];
      }
      const WtaResult wta = winner_take_all(column.data(), d_hi, 1.0);
      right_disp[static_cast<std::size_t>(y) * w + xr] = wta.best;
    }
  });

  DisparityMap out(w, h);
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    if (y < r || y >= h - r) {
      return;
    }
    for (int x = r; x < w - r; ++x) {
      const std::uint16_t* agg = s.data() + shape.index(x, y);
      const int d_hi = std::min(nd - 1, x - r);
      // Aggregation would fill textureless areas from their surroundings.
      if (!cl.textured[static_cast<std::size_t>(y) * w + x]) {
        continue;
      }
      const WtaResult wta = winner_take_all(agg, d_hi, p.uniqueness);
      if (wta.best < 0 || !wta.unique || wta.best == d_hi) {
        continue;
      }
      const int dr = right_disp[static_cast<std::size_t>(y) * w + (x - wta.best)];
      if (dr < 0 || std::abs(dr - wta.best) > p.lr_threshold) {
        continue;
      }
      double d = wta.best;
      if (wta.best > 0 && wta.best < d_hi) {
        // Parabola through the block-summed raw cost: the aggregated cost is
        // flattened by P1 around its minimum and locks to integers.
        const double cm = block_cost(c, shape, x, y, wta.best - 1, rb);
        const double c0 = block_cost(c, shape, x, y, wta.best, rb);
        const double cp = block_cost(c, shape, x, y, wta.best + 1, rb);
        const double denom = cm - 2.0 * c0 + cp;
        if (denom > 0.0) {
          d += std::clamp(0.5 * (cm - cp) / denom, -0.5, 0.5);
        }
      }
      out.at(x, y) = static_cast<float>(d);
    }
  });
  return out;
}

PointCloud disparity_to_pointcloud(const DisparityMap& d, const CameraModel& cam, double baseline, double d_min)
{
  if (!(baseline > 0.0)) {
    throw std::invalid_argument("baseline must be > 0");
  }
  PointCloud cloud;
  for (int y = 0; y < d.height; ++y) {
    for (int x = 0; x < d.width; ++x) {
      const float disp = d.at(x, y);
      if (!(disp >= 0.0f) || disp < d_min) {
        continue;
      }
      const double z = cam.focal * baseline / disp;
      const Vec3 optical((x + 0.5 - cam.cx) * z / cam.focal, (y + 0.5 - cam.cy) * z / cam.focal, z);
      CloudPoint pt;
      pt.position = optical_to_body(optical) + Vec3(0.0, 0.5 * baseline, 0.0);
      pt.u = x;
      pt.v = y;
      pt.disparity = disp;
      cloud.points.push_back(pt);
    }
  }
  return cloud;
}

std::vector<std::uint16_t> encode_disparity_fixed(const DisparityMap& d)
{
  std::vector<std::uint16_t> out(d.values.size(), 0);
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    const float v = d.values[i];
    if (v >= 0.0f) {
      out[i] = static_cast<std::uint16_t>(std::clamp(std::lround(16.0 * v), 1L, 65535L));
    }
  }
  return out;
}

DisparityMap decode_disparity_fixed(int width, int height, const std::vector<std::uint16_t>& v)
{
  DisparityMap d(width, height);
  if (v.size() != d.values.size()) {
    throw std::invalid_argument("disparity raster size mismatch");
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0) {
      d.values[i] = static_cast<float>(v[i]) / 16.0f;
    }
  }
  return d;
}

void write_disparity_pgm16(const std::string& path, const DisparityMap& d)
{
  write_pgm16(path, d.width, d.height, encode_disparity_fixed(d));
}

DisparityMap read_disparity_pgm16(const std::string& path)
{
  int w = 0;
  int h = 0;
  const auto v = read_pgm16(path, w, h);
  return decode_disparity_fixed(w, h, v);
}

std::string encode_ply(const PointCloud& cloud)
{
  std::string out = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(cloud.points.size()) +
                    "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
  char line[96];
  for (const auto& p : cloud.points) {
    std::snprintf(line, sizeof(line), "%.6f %.6f %.6f\n", p.position.x(), p.position.y(), p.position.z());
    out += line;
  }
  return out;
}

void write_ply(const std::string& path, const PointCloud& cloud)
{
  write_file_atomic(path, encode_ply(cloud));
}

DepthMetrics depth_metrics(const DisparityMap& d, const DepthMap& truth, const CameraModel& cam, double baseline,
                           double max_depth)
{
  DepthMetrics m;
  std::size_t surface = 0;
  double sq = 0.0;
  std::vector<double> rel;
  for (int y = 0; y < d.height; ++y) {
    for (int x = 0; x < d.width; ++x) {
      const double z_gt = truth.at(x, y);
      if (!std::isfinite(z_gt) || z_gt <= 0.0 || z_gt > max_depth) {
        continue;
      }
      ++surface;
      const float disp = d.at(x, y);
      if (!(disp >= kMinDisparity)) {
        continue;
      }
      const double z = cam.focal * baseline / disp;
      sq += (z - z_gt) * (z - z_gt);
      rel.push_back(std::fabs(z - z_gt) / z_gt);
    }
  }
  m.compared = rel.size();
  m.valid_fraction = surface > 0 ? static_cast<double>(rel.size()) / static_cast<double>(surface) : 0.0;
  if (surface > 0) {
    const auto accurate = std::count_if(rel.begin(), rel.end(), [](double e) { return e <= kAccurateRelError; });
    m.accurate_fraction = static_cast<double>(accurate) / static_cast<double>(surface);
  }
  if (!rel.empty()) {
    m.depth_rmse = std::sqrt(sq / static_cast<double>(rel.size()));
    std::sort(rel.begin(), rel.end());
    m.median_rel_error = rel[rel.size() / 2];
    m.p95_rel_error = rel[std::min(rel.size() - 1, static_cast<std::size_t>(0.95 * static_cast<double>(rel.size())))];
  }
  return m;
}

}  // namespace maeb
