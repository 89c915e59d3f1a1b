#include "gspt/polyline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gspt/errors.hpp"

namespace gspt {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double L2 = dot(ab, ab);
  if (L2 == 0.0) return distance(p, a);
  const double s = std::clamp(dot(p - a, ab) / L2, 0.0, 1.0);
  return distance(p, a + s * ab);
}

double point_polyline_distance(const Vec2& p, const Polyline& poly, bool closed) {
  if (poly.empty()) throw PreconditionError("point_polyline_distance: empty polyline");
  if (poly.size() == 1) return distance(p, poly[0]);
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  const std::size_t segs = closed ? n : n - 1;
  for (std::size_t i = 0; i < segs; ++i) best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
  return best;
}

Window bounds(const Polyline& poly) {
  Window w{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : poly) {
    w.x_min = std::min(w.x_min, p.x);
    w.x_max = std::max(w.x_max, p.x);
    w.y_min = std::min(w.y_min, p.y);
    w.y_max = std::max(w.y_max, p.y);
  }
  return w;
}

namespace {

// Segments of a closed polyline bucketed on a uniform grid.
class SegmentGrid {
 public:
  explicit SegmentGrid(const Polyline& poly) : poly_(poly) {
    box_ = bounds(poly);
    const std::size_t n = poly.size();
    const double w = std::max(box_.width(), 1e-12), h = std::max(box_.height(), 1e-12);
    const double cells = std::max<double>(1.0, static_cast<double>(n));
    const double side = std::sqrt(w * h / cells);
    nx_ = std::clamp(static_cast<int>(std::ceil(w / side)), 1, 4096);
    ny_ = std::clamp(static_cast<int>(std::ceil(h / side)), 1, 4096);
    cw_ = w / nx_;
    ch_ = h / ny_;
    buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 &a = poly[i], &b = poly[(i + 1) % n];
      const int i0 = cx(std::min(a.x, b.x)), i1 = cx(std::max(a.x, b.x));
      const int j0 = cy(std::min(a.y, b.y)), j1 = cy(std::max(a.y, b.y));
      for (int j = j0; j <= j1; ++j)
        for (int k = i0; k <= i1; ++k) buckets_[static_cast<std::size_t>(j) * nx_ + k].push_back(i);
    }
  }

  double nearest(const Vec2& p) const {
    const std::size_t n = poly_.size();
    const int pi = cx(p.x), pj = cy(p.y);
    double best = std::numeric_limits<double>::infinity();
    const int kmax = std::max(nx_, ny_);
    for (int k = 0; k <= kmax; ++k) {
      double ring_min = std::numeric_limits<double>::infinity();
      for (int j = pj - k; j <= pj + k; ++j) {
        if (j < 0 || j >= ny_) continue;
        for (int i = pi - k; i <= pi + k; ++i) {
          if (i < 0 || i >= nx_) continue;
          if (std::max(std::abs(i - pi), std::abs(j - pj)) != k) continue;
          const double dcell = cell_distance(p, i, j);
          ring_min = std::min(ring_min, dcell);
          if (dcell >= best) continue;
          for (std::size_t s : buckets_[static_cast<std::size_t>(j) * nx_ + i])
            best = std::min(best, point_segment_distance(p, poly_[s], poly_[(s + 1) % n]));
        }
      }
      if (ring_min >= best) break;
    }
    return best;
  }

 private:
  int cx(double x) const { return std::clamp(static_cast<int>(std::floor((x - box_.x_min) / cw_)), 0, nx_ - 1); }
  int cy(double y) const { return std::clamp(static_cast<int>(std::floor((y - box_.y_min) / ch_)), 0, ny_ - 1); }
  double cell_distance(const Vec2& p, int i, int j) const {
    const double x0 = box_.x_min + i * cw_, y0 = box_.y_min + j * ch_;
    const double dx = std::max({x0 - p.x, 0.0, p.x - (x0 + cw_)});
    const double dy = std::max({y0 - p.y, 0.0, p.y - (y0 + ch_)});
    return std::hypot(dx, dy);
  }

  const Polyline& poly_;
  Window box_;
  int nx_ = 1, ny_ = 1;
  double cw_ = 1.0, ch_ = 1.0;
  std::vector<std::vector<std::size_t>> buckets_;
};

double directed(const Polyline& from, const Polyline& to) {
  if (to.size() == 1) {
    double m = 0.0;
    for (const auto& p : from) m = std::max(m, distance(p, to[0]));
    return m;
  }
  const SegmentGrid grid(to);
  double m = 0.0;
  for (const auto& p : from) m = std::max(m, grid.nearest(p));
  return m;
}

}  // namespace

double hausdorff_distance(const Polyline& a, const Polyline& b) {
  if (a.empty() || b.empty()) throw PreconditionError("hausdorff_distance: empty polyline");
  return std::max(directed(a, b), directed(b, a));
}

int winding_number(const Polyline& poly, const Vec2& p) {
  // accumulated signed angle
  double total = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i] - p, b = poly[(i + 1) % n] - p;
    total += std::atan2(cross(a, b), dot(a, b));
  }
  return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

double arclength(const Polyline& poly, bool closed) {
  double L = 0.0;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) L += distance(poly[i], poly[i + 1]);
  if (closed && poly.size() > 1) L += distance(poly.back(), poly.front());
  return L;
}

}  // namespace gspt
