#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace zdsec {

struct HullPoint {
  double x;
  double y;
  int tag = -1;  // caller-owned index (witness id etc.)
};

// Lower convex hull, vertices sorted by x. Collinear interior points are
// dropped so the vertex set is canonical; ties at equal x keep the lowest y.
inline std::vector<HullPoint> lower_convex_hull(std::vector<HullPoint> pts, double eps = 1e-12) {
  if (pts.empty()) throw std::invalid_argument("lower_convex_hull: no points");
  std::sort(pts.begin(), pts.end(), [](const HullPoint& a, const HullPoint& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  });
  std::vector<HullPoint> filtered;
  for (const HullPoint& p : pts) {
    if (!filtered.empty() && std::fabs(p.x - filtered.back().x) <= eps) continue;
    filtered.push_back(p);
  }
  std::vector<HullPoint> hull;
  for (const HullPoint& p : filtered) {
    while (hull.size() >= 2) {
      const HullPoint& a = hull[hull.size() - 2];
      const HullPoint& b = hull[hull.size() - 1];
      double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
      // b survives only if the chain a->b->p turns strictly convex; collinear
      // b is dropped to keep the vertex set canonical.
      if (cross <= eps * std::max(1.0, std::fabs(p.x - a.x))) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }
  return hull;
}

// Piecewise-linear evaluation of a lower hull as a function of x. Queries
// left of the first vertex are infeasible; queries right of the last vertex
// clamp to the last value (our envelopes are non-increasing there).
class LowerEnvelope {
 public:
  LowerEnvelope() = default;
  explicit LowerEnvelope(std::vector<HullPoint> verts, double eps = 1e-12)
      : verts_(std::move(verts)), eps_(eps) {
    if (verts_.empty()) throw std::invalid_argument("LowerEnvelope: empty hull");
  }

  struct Value {
    double y;
    // Endpoints of the active segment and the mixing weight on `left`.
    int left_tag;
    int right_tag;
    double lambda;
  };

  std::optional<Value> value(double x) const {
    if (x < verts_.front().x - eps_) return std::nullopt;
    if (x <= verts_.front().x) return Value{verts_.front().y, verts_.front().tag, verts_.front().tag, 1.0};
    if (x >= verts_.back().x) return Value{verts_.back().y, verts_.back().tag, verts_.back().tag, 1.0};
    size_t hi = 1;
    while (verts_[hi].x < x) ++hi;
    const HullPoint& a = verts_[hi - 1];
    const HullPoint& b = verts_[hi];
    double lambda = (b.x - x) / (b.x - a.x);
    return Value{lambda * a.y + (1.0 - lambda) * b.y, a.tag, b.tag, lambda};
  }

  double min_x() const { return verts_.front().x; }
  double max_x() const { return verts_.back().x; }
  const std::vector<HullPoint>& vertices() const { return verts_; }

 private:
  std::vector<HullPoint> verts_;
  double eps_ = 1e-12;
};

}
