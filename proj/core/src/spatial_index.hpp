#pragma once

// Uniform-bucket nearest-distance queries with a cutoff, for building
// truncated distance fields.

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>
#include <vector>

namespace mcf::detail {

inline double point_segment_distance(double px, double py, const std::array<double, 4>& s) {
  const double dx = s[2] - s[0], dy = s[3] - s[1];
  const double L2 = dx * dx + dy * dy;
  double t = L2 > 0.0 ? ((px - s[0]) * dx + (py - s[1]) * dy) / L2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(px - (s[0] + t * dx), py - (s[1] + t * dy));
}

class SegmentIndex2D {
 public:
  SegmentIndex2D(const std::vector<std::array<double, 4>>& segs, double cell) : cell_(cell) {
    for (const auto& s : segs) {
      // split long pieces so each bucket entry stays local
      const double L = std::hypot(s[2] - s[0], s[3] - s[1]);
      const int k = std::max(1, static_cast<int>(std::ceil(L / cell)));
      for (int i = 0; i < k; ++i) {
        const double t0 = static_cast<double>(i) / k, t1 = static_cast<double>(i + 1) / k;
        std::array<double, 4> p{s[0] + t0 * (s[2] - s[0]), s[1] + t0 * (s[3] - s[1]),
                                s[0] + t1 * (s[2] - s[0]), s[1] + t1 * (s[3] - s[1])};
        const long id = static_cast<long>(segs_.size());
        segs_.push_back(p);
        const long x0 = key(std::min(p[0], p[2])), x1 = key(std::max(p[0], p[2]));
        const long y0 = key(std::min(p[1], p[3])), y1 = key(std::max(p[1], p[3]));
        for (long a = x0; a <= x1; ++a)
          for (long b = y0; b <= y1; ++b) buckets_[pack(a, b)].push_back(id);
      }
    }
  }

  // Distance to the nearest segment, capped at `cutoff`.
  double distance(double x, double y, double cutoff) const {
    const long cx = key(x), cy = key(y);
    double best = cutoff;
    const long rings = static_cast<long>(std::ceil(cutoff / cell_)) + 1;
    for (long k = 0; k <= rings; ++k) {
      if ((k - 1) * cell_ > best) break;
      for (long a = cx - k; a <= cx + k; ++a)
        for (long b = cy - k; b <= cy + k; ++b) {
          if (std::max(std::labs(a - cx), std::labs(b - cy)) != k) continue;
          auto it = buckets_.find(pack(a, b));
          if (it == buckets_.end()) continue;
          for (long id : it->second) best = std::min(best, point_segment_distance(x, y, segs_[id]));
        }
    }
    return best;
  }

 private:
  long key(double v) const { return static_cast<long>(std::floor(v / cell_)); }
  static long long pack(long a, long b) { return (static_cast<long long>(a) << 32) ^ (b & 0xffffffffLL); }
  double cell_;
  std::vector<std::array<double, 4>> segs_;
  std::unordered_map<long long, std::vector<long>> buckets_;
};

class PointIndex3D {
 public:
  PointIndex3D(const std::vector<std::array<double, 3>>& pts, double cell) : cell_(cell), pts_(pts) {
    for (long i = 0; i < static_cast<long>(pts_.size()); ++i)
      buckets_[pack(key(pts_[i][0]), key(pts_[i][1]), key(pts_[i][2]))].push_back(i);
  }

  double distance(double x, double y, double z, double cutoff) const {
    const long cx = key(x), cy = key(y), cz = key(z);
    double best2 = cutoff * cutoff;
    const long rings = static_cast<long>(std::ceil(cutoff / cell_)) + 1;
    for (long k = 0; k <= rings; ++k) {
      const double lower = (k - 1) * cell_;
      if (lower > 0 && lower * lower > best2) break;
      for (long a = cx - k; a <= cx + k; ++a)
        for (long b = cy - k; b <= cy + k; ++b)
          for (long c = cz - k; c <= cz + k; ++c) {
            if (std::max({std::labs(a - cx), std::labs(b - cy), std::labs(c - cz)}) != k) continue;
            auto it = buckets_.find(pack(a, b, c));
            if (it == buckets_.end()) continue;
            for (long id : it->second) {
              const auto& p = pts_[id];
              const double d2 = (p[0] - x) * (p[0] - x) + (p[1] - y) * (p[1] - y) + (p[2] - z) * (p[2] - z);
              best2 = std::min(best2, d2);
            }
          }
    }
    return std::sqrt(best2);
  }

 private:
  long key(double v) const { return static_cast<long>(std::floor(v / cell_)); }
  static long long pack(long a, long b, long c) {
    return ((static_cast<long long>(a) & 0x1fffff) << 42) | ((static_cast<long long>(b) & 0x1fffff) << 21) |
           (static_cast<long long>(c) & 0x1fffff);
  }
  double cell_;
  std::vector<std::array<double, 3>> pts_;
  std::unordered_map<long long, std::vector<long>> buckets_;
};

}  // namespace mcf::detail
