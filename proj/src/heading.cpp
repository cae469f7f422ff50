#include "maeb/heading.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace maeb {

void HeadingParams::validate() const
{
  if (!(inlier_threshold > 0.0)) {
    throw std::invalid_argument("heading inlier_threshold must be > 0");
  }
  if (iterations < 1) {
    throw std::invalid_argument("heading iterations must be >= 1");
  }
  if (min_inliers < 2) {
    throw std::invalid_argument("heading min_inliers must be >= 2");
  }
}

LineFit fit_line_tls(const std::vector<Vec2>& points)
{
  if (points.size() < 2) {
    throw std::invalid_argument("line fit needs at least two points");
  }
  double mx = 0.0;
  double my = 0.0;
  for (const Vec2& p : points) {
    mx += p.x;
    my += p.y;
  }
  const double n = static_cast<double>(points.size());
  mx /= n;
  my /= n;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const Vec2& p : points) {
    const Eigen::Vector2d q(p.x - mx, p.y - my);
    cov += q * q.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  const Eigen::Vector2d dir = es.eigenvectors().col(1);
  LineFit fit;
  fit.centroid = {mx, my};
  fit.direction = {dir.x(), dir.y()};
  fit.rms = std::sqrt(std::max(0.0, es.eigenvalues()(0)) / n);
  return fit;
}

HeadingEstimate estimate_heading(const PointCloud& cloud, const GroundRoi& roi, double roll, const HeadingParams& p,
                                 std::optional<Vec2> approach)
{
  p.validate();
  if (cloud.points.empty()) {
    throw InsufficientInliers();
  }
  // The rig frame is rolled by `roll` about its x axis; rotate points back.
  const Mat3 level = Eigen::AngleAxisd(roll, Vec3::UnitX()).toRotationMatrix();
  std::vector<Vec2> pts;
  pts.reserve(cloud.points.size());
  for (const auto& cp : cloud.points) {
    const Vec3 q = level * cp.position;
    if (q.z() + p.camera_height < p.ground_threshold) {
      continue;
    }
    const Vec2 g{q.x(), q.y()};
    if (roi.contains(g)) {
      pts.push_back(g);
    }
  }
  if (pts.size() < p.min_inliers) {
    throw InsufficientInliers();
  }

  std::mt19937_64 rng(p.seed);
  const auto n = static_cast<std::uint64_t>(pts.size());
  std::size_t best_count = 0;
  Vec2 best_point;
  Vec2 best_normal;
  for (int it = 0; it < p.iterations; ++it) {
    const Vec2 a = pts[rng() % n];
    const Vec2 b = pts[rng() % n];
    const Vec2 ab = b - a;
    const double len = ab.norm();
    if (len < 1e-6) {
      continue;
    }
    const Vec2 normal{-ab.y / len, ab.x / len};
    std::size_t count = 0;
    for (const Vec2& q : pts) {
      if (std::fabs((q - a).dot(normal)) <= p.inlier_threshold) {
        ++count;
      }
    }
    if (count > best_count) {
      best_count = count;
      best_point = a;
      best_normal = normal;
    }
  }
  std::vector<Vec2> inliers;
  for (const Vec2& q : pts) {
    if (std::fabs((q - best_point).dot(best_normal)) <= p.inlier_threshold) {
      inliers.push_back(q);
    }
  }
  if (inliers.size() < p.min_inliers) {
    throw InsufficientInliers();
  }

  const LineFit fit = fit_line_tls(inliers);
  Vec2 dir = fit.direction;
  if (approach) {
    if (dir.dot(*approach) < 0.0) {
      dir = -1.0 * dir;
    }
  } else if (dir.x < 0.0 || (dir.x == 0.0 && dir.y < 0.0)) {
    dir = -1.0 * dir;
  }

  HeadingEstimate est;
  est.direction = dir;
  est.heading_deg = wrap_degrees(rad2deg(std::atan2(dir.y, dir.x)));
  est.inlier_count = inliers.size();
  est.rms_plane_residual = fit.rms;
  auto [xmin, xmax] = std::minmax_element(inliers.begin(), inliers.end(), [](Vec2 a, Vec2 b) { return a.x < b.x; });
  auto [ymin, ymax] = std::minmax_element(inliers.begin(), inliers.end(), [](Vec2 a, Vec2 b) { return a.y < b.y; });
  est.extent_x = xmax->x - xmin->x;
  est.extent_y = ymax->y - ymin->y;
  return est;
}

}  // namespace maeb
