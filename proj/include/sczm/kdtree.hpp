#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

namespace sczm {

/// Minimal kd-tree over fixed-dimension points with radius and k-nearest
/// queries. Build and queries are deterministic for identical input order.
template <int DIM>
class KdTree {
 public:
  using Point = Eigen::Matrix<double, DIM, 1>;

  KdTree() = default;

  explicit KdTree(std::vector<Point> points) : pts_(std::move(points)) {
    idx_.resize(pts_.size());
    std::iota(idx_.begin(), idx_.end(), 0);
    if (!idx_.empty()) root_ = build_(0, static_cast<int>(idx_.size()), 0);
  }

  int size() const { return static_cast<int>(pts_.size()); }
  const Point& point(int i) const { return pts_[i]; }

  /// Indices of all points within `radius` of q (inclusive), sorted.
  std::vector<int> radius_search(const Point& q, double radius) const {
    std::vector<int> out;
    if (root_ >= 0) radius_(root_, q, radius * radius, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Indices of the k nearest points, closest first; ties by index.
  std::vector<int> nearest(const Point& q, int k) const {
    // (distance^2, index) max-heap of the current best k
    std::priority_queue<std::pair<double, int>> heap;
    if (root_ >= 0) nearest_(root_, q, k, heap);
    std::vector<std::pair<double, int>> best;
    while (!heap.empty()) {
      best.push_back(heap.top());
      heap.pop();
    }
    std::sort(best.begin(), best.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : a.second < b.second;
    });
    std::vector<int> out;
    out.reserve(best.size());
    for (const auto& [d2, i] : best) out.push_back(i);
    return out;
  }

 private:
  struct Node {
    int point = -1;
    int axis = 0;
    int left = -1, right = -1;
  };

  int build_(int lo, int hi, int depth) {
    if (lo >= hi) return -1;
    const int axis = depth % DIM;
    const int mid = (lo + hi) / 2;
    std::nth_element(idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi,
                     [&](int a, int b) {
                       if (pts_[a][axis] != pts_[b][axis]) return pts_[a][axis] < pts_[b][axis];
                       return a < b;
                     });
    Node node;
    node.point = idx_[mid];
    node.axis = axis;
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    const int l = build_(lo, mid, depth + 1);
    const int r = build_(mid + 1, hi, depth + 1);
    nodes_[self].left = l;
    nodes_[self].right = r;
    return self;
  }

  void radius_(int ni, const Point& q, double r2, std::vector<int>& out) const {
    const Node& n = nodes_[ni];
    const Point& p = pts_[n.point];
    if ((p - q).squaredNorm() <= r2) out.push_back(n.point);
    const double d = q[n.axis] - p[n.axis];
    const int near = d < 0 ? n.left : n.right;
    const int far = d < 0 ? n.right : n.left;
    if (near >= 0) radius_(near, q, r2, out);
    if (far >= 0 && d * d <= r2) radius_(far, q, r2, out);
  }

  void nearest_(int ni, const Point& q, int k,
                std::priority_queue<std::pair<double, int>>& heap) const {
    const Node& n = nodes_[ni];
    const Point& p = pts_[n.point];
    const double d2 = (p - q).squaredNorm();
    if (static_cast<int>(heap.size()) < k) {
      heap.emplace(d2, n.point);
    } else if (d2 < heap.top().first) {
      heap.pop();
      heap.emplace(d2, n.point);
    }
    const double d = q[n.axis] - p[n.axis];
    const int near = d < 0 ? n.left : n.right;
    const int far = d < 0 ? n.right : n.left;
    if (near >= 0) nearest_(near, q, k, heap);
    const bool cross = static_cast<int>(heap.size()) < k || d * d < heap.top().first;
    if (far >= 0 && cross) nearest_(far, q, k, heap);
  }

  std::vector<Point> pts_;
  std::vector<int> idx_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace sczm
