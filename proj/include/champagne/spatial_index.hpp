#pragma once

#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "field.hpp"

namespace champagne {

/// Result of a nearest-surface query; id = -1 and distance = +inf when nothing was found.
struct NearestHit {
  double distance = std::numeric_limits<double>::infinity();
  std::int64_t id = -1;

  bool improvedBy(double dist, std::int64_t candidate) const {
    return dist < distance || (dist == distance && (id < 0 || candidate < id));
  }
};

namespace detail {
// Absolute slack on pruning bounds; covers rounding in box distances (|x| <= 1, so errors are ~1e-15).
inline constexpr double kPruneSlack = 1e-12;
}  // namespace detail

/// k-d tree over a subset of a field's obstacles. Nodes carry the bounding box of their centres
/// and the largest radius below them, so surface distances can be bounded from below.
class KdTree {
 public:
  KdTree() = default;

  KdTree(const ObstacleField& field, std::vector<std::uint32_t> ids) : d_(field.dimension()), ids_(std::move(ids)) {
    const auto d = static_cast<std::size_t>(d_);
    if (ids_.empty()) return;
    // Build over positions into ids_, then materialize reordered arrays.
    std::vector<std::uint32_t> perm(ids_.size());
    std::iota(perm.begin(), perm.end(), 0u);
    nodes_.reserve(2 * ids_.size() / kLeafSize + 2);
    build(field, perm, 0, static_cast<std::uint32_t>(perm.size()));
    std::vector<std::uint32_t> newIds(ids_.size());
    pts_.resize(ids_.size() * d);
    radii_.resize(ids_.size());
    for (std::size_t k = 0; k < perm.size(); ++k) {
      const std::uint32_t id = ids_[perm[k]];
      newIds[k] = id;
      std::copy(field.center(id), field.center(id) + d_, pts_.begin() + static_cast<std::ptrdiff_t>(k * d));
      radii_[k] = field.radius(id);
    }
    ids_ = std::move(newIds);
  }

  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }

  /// Updates `best` with the obstacle whose surface is nearest to x (ties: lowest id).
  void nearestSurface(const double* x, NearestHit& best) const {
    if (!nodes_.empty()) nearestSurfaceAt(0, x, best);
  }

  /// Calls fn(id, surfaceDistance) for every obstacle with |x - c| - r <= radius.
  template <class Fn>
  void forEachSurfaceWithin(const double* x, double radius, Fn&& fn) const {
    if (!nodes_.empty()) surfaceWithinAt(0, x, radius, fn);
  }

  /// Calls fn(id) for every obstacle (as a closed ball) meeting the box [lo, hi].
  template <class Fn>
  void forEachIntersectingBox(const double* lo, const double* hi, Fn&& fn) const {
    if (!nodes_.empty()) boxAt(0, lo, hi, fn);
  }

  /// Calls fn(id, centreDistance) for every centre with |x - c| <= radius.
  template <class Fn>
  void forEachCenterWithin(const double* x, double radius, Fn&& fn) const {
    if (!nodes_.empty()) centerWithinAt(0, x, radius, fn);
  }

  /// Nearest centre to x among obstacles accepted by pred(id); ties broken by lowest id.
  template <class Pred>
  void nearestCenter(const double* x, Pred&& accept, NearestHit& best) const {
    if (!nodes_.empty()) nearestCenterAt(0, x, accept, best);
  }

 private:
  static constexpr std::uint32_t kLeafSize = 8;

  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double maxRadius = 0.0;
  };

  const double* lo(std::size_t n) const { return boxes_.data() + n * 2 * static_cast<std::size_t>(d_); }
  const double* hi(std::size_t n) const { return lo(n) + d_; }

  std::int32_t build(const ObstacleField& field, std::vector<std::uint32_t>& perm, std::uint32_t begin,
                     std::uint32_t end) {
    const auto nodeIndex = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end, -1, -1, 0.0});
    const auto d = static_cast<std::size_t>(d_);
    boxes_.resize(boxes_.size() + 2 * d);
    double* bl = boxes_.data() + static_cast<std::size_t>(nodeIndex) * 2 * d;
    double* bh = bl + d;
    std::fill(bl, bl + d, std::numeric_limits<double>::infinity());
    std::fill(bh, bh + d, -std::numeric_limits<double>::infinity());
    double maxR = 0.0;
    for (std::uint32_t k = begin; k < end; ++k) {
      const std::uint32_t id = ids_[perm[k]];
      const double* c = field.center(id);
      for (std::size_t i = 0; i < d; ++i) {
        bl[i] = std::min(bl[i], c[i]);
        bh[i] = std::max(bh[i], c[i]);
      }
      maxR = std::max(maxR, field.radius(id));
    }
    nodes_[static_cast<std::size_t>(nodeIndex)].maxRadius = maxR;
    if (end - begin <= kLeafSize) return nodeIndex;

    std::size_t axis = 0;
    double widest = -1.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (bh[i] - bl[i] > widest) {
        widest = bh[i] - bl[i];
        axis = i;
      }
    }
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(perm.begin() + begin, perm.begin() + mid, perm.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       const double ca = field.center(ids_[a])[axis];
                       const double cb = field.center(ids_[b])[axis];
                       return ca < cb || (ca == cb && ids_[a] < ids_[b]);
                     });
    const std::int32_t left = build(field, perm, begin, mid);
    const std::int32_t right = build(field, perm, mid, end);
    nodes_[static_cast<std::size_t>(nodeIndex)].left = left;
    nodes_[static_cast<std::size_t>(nodeIndex)].right = right;
    return nodeIndex;
  }

  double surfaceLowerBound(std::size_t n, const double* x) const {
    return std::sqrt(boxDistanceSquared(x, lo(n), hi(n), d_)) - nodes_[n].maxRadius - detail::kPruneSlack;
  }

  void nearestSurfaceAt(std::size_t n, const double* x, NearestHit& best) const {
    const Node& node = nodes_[n];
    if (node.left < 0) {
      const auto d = static_cast<std::size_t>(d_);
      for (std::uint32_t k = node.begin; k < node.end; ++k) {
        const double dist = distance(x, pts_.data() + k * d, d_) - radii_[k];
        if (best.improvedBy(dist, ids_[k])) {
          best.distance = dist;
          best.id = ids_[k];
        }
      }
      return;
    }
    const auto l = static_cast<std::size_t>(node.left);
    const auto r = static_cast<std::size_t>(node.right);
    const double bl = surfaceLowerBound(l, x);
    const double br = surfaceLowerBound(r, x);
    if (bl <= br) {
      if (bl <= best.distance) nearestSurfaceAt(l, x, best);
      if (br <= best.distance) nearestSurfaceAt(r, x, best);
    } else {
      if (br <= best.distance) nearestSurfaceAt(r, x, best);
      if (bl <= best.distance) nearestSurfaceAt(l, x, best);
    }
  }

  template <class Fn>
  void surfaceWithinAt(std::size_t n, const double* x, double radius, Fn& fn) const {
    if (surfaceLowerBound(n, x) > radius) return;
    const Node& node = nodes_[n];
    if (node.left < 0) {
      const auto d = static_cast<std::size_t>(d_);
      for (std::uint32_t k = node.begin; k < node.end; ++k) {
        const double dist = distance(x, pts_.data() + k * d, d_) - radii_[k];
        if (dist <= radius) fn(static_cast<std::size_t>(ids_[k]), dist);
      }
      return;
    }
    surfaceWithinAt(static_cast<std::size_t>(node.left), x, radius, fn);
    surfaceWithinAt(static_cast<std::size_t>(node.right), x, radius, fn);
  }

  template <class Fn>
  void centerWithinAt(std::size_t n, const double* x, double radius, Fn& fn) const {
    if (std::sqrt(boxDistanceSquared(x, lo(n), hi(n), d_)) - detail::kPruneSlack > radius) return;
    const Node& node = nodes_[n];
    if (node.left < 0) {
      const auto d = static_cast<std::size_t>(d_);
      for (std::uint32_t k = node.begin; k < node.end; ++k) {
        const double dist = distance(x, pts_.data() + k * d, d_);
        if (dist <= radius) fn(static_cast<std::size_t>(ids_[k]), dist);
      }
      return;
    }
    centerWithinAt(static_cast<std::size_t>(node.left), x, radius, fn);
    centerWithinAt(static_cast<std::size_t>(node.right), x, radius, fn);
  }

  template <class Fn>
  void boxAt(std::size_t n, const double* qlo, const double* qhi, Fn& fn) const {
    const Node& node = nodes_[n];
    double gap2 = 0.0;
    for (int i = 0; i < d_; ++i) {
      double t = 0.0;
      if (hi(n)[i] < qlo[i]) {
        t = qlo[i] - hi(n)[i];
      } else if (lo(n)[i] > qhi[i]) {
        t = lo(n)[i] - qhi[i];
      }
      gap2 += t * t;
    }
    if (std::sqrt(gap2) - detail::kPruneSlack > node.maxRadius) return;
    if (node.left < 0) {
      const auto d = static_cast<std::size_t>(d_);
      for (std::uint32_t k = node.begin; k < node.end; ++k) {
        const double* c = pts_.data() + k * d;
        if (boxDistanceSquared(c, qlo, qhi, d_) <= radii_[k] * radii_[k]) fn(static_cast<std::size_t>(ids_[k]));
      }
      return;
    }
    boxAt(static_cast<std::size_t>(node.left), qlo, qhi, fn);
    boxAt(static_cast<std::size_t>(node.right), qlo, qhi, fn);
  }

  template <class Pred>
  void nearestCenterAt(std::size_t n, const double* x, Pred& accept, NearestHit& best) const {
    const Node& node = nodes_[n];
    if (node.left < 0) {
      const auto d = static_cast<std::size_t>(d_);
      for (std::uint32_t k = node.begin; k < node.end; ++k) {
        if (!accept(static_cast<std::size_t>(ids_[k]))) continue;
        const double dist = distance(x, pts_.data() + k * d, d_);
        if (best.improvedBy(dist, ids_[k])) {
          best.distance = dist;
          best.id = ids_[k];
        }
      }
      return;
    }
    const auto l = static_cast<std::size_t>(node.left);
    const auto r = static_cast<std::size_t>(node.right);
    const double bl = std::sqrt(boxDistanceSquared(x, lo(l), hi(l), d_)) - detail::kPruneSlack;
    const double br = std::sqrt(boxDistanceSquared(x, lo(r), hi(r), d_)) - detail::kPruneSlack;
    if (bl <= br) {
      if (bl <= best.distance) nearestCenterAt(l, x, accept, best);
      if (br <= best.distance) nearestCenterAt(r, x, accept, best);
    } else {
      if (br <= best.distance) nearestCenterAt(r, x, accept, best);
      if (bl <= best.distance) nearestCenterAt(l, x, accept, best);
    }
  }

  int d_ = 3;
  std::vector<std::uint32_t> ids_;
  std::vector<double> pts_;
  std::vector<double> radii_;
  std::vector<Node> nodes_;
  std::vector<double> boxes_;
};

/// Nearest-surface index bucketed by annulus: one k-d tree per annulus index, each tagged with
/// the radial band its obstacles occupy. A query restricted to annuli <= J visits buckets in
/// order of their radial lower bound and stops once no bucket can beat the current best.
class ShellIndex {
 public:
  explicit ShellIndex(const ObstacleField& field) : d_(field.dimension()) {
    if (field.empty()) return;
    const int top = field.maxAnnulus();
    std::vector<std::vector<std::uint32_t>> groups(static_cast<std::size_t>(top) + 1);
    for (std::size_t i = 0; i < field.size(); ++i) {
      groups[static_cast<std::size_t>(field.annulus(i))].push_back(static_cast<std::uint32_t>(i));
    }
    for (int a = 0; a <= top; ++a) {
      auto& ids = groups[static_cast<std::size_t>(a)];
      if (ids.empty()) continue;
      Bucket b;
      b.annulus = a;
      b.minNorm = std::numeric_limits<double>::infinity();
      b.maxNorm = 0.0;
      for (auto id : ids) {
        b.minNorm = std::min(b.minNorm, field.centerNorm(id));
        b.maxNorm = std::max(b.maxNorm, field.centerNorm(id));
        b.maxRadius = std::max(b.maxRadius, field.radius(id));
      }
      b.tree = KdTree(field, std::move(ids));
      buckets_.push_back(std::move(b));
    }
  }

  int dimension() const { return d_; }

  /// Nearest obstacle surface among annuli <= maxAnnulus.
  NearestHit nearest(const double* x, int maxAnnulus = INT_MAX) const {
    NearestHit best;
    if (buckets_.empty()) return best;
    const double r = norm(x, d_);
    std::array<std::pair<double, std::size_t>, 64> stackOrder{};
    std::vector<std::pair<double, std::size_t>> heapOrder;
    std::pair<double, std::size_t>* order = stackOrder.data();
    if (buckets_.size() > stackOrder.size()) {
      heapOrder.resize(buckets_.size());
      order = heapOrder.data();
    }
    std::size_t count = 0;
    for (std::size_t b = 0; b < buckets_.size(); ++b) {
      const Bucket& bucket = buckets_[b];
      if (bucket.annulus > maxAnnulus) break;
      const double radial = std::max({0.0, r - bucket.maxNorm, bucket.minNorm - r});
      order[count++] = {radial - bucket.maxRadius - detail::kPruneSlack, b};
    }
    std::sort(order, order + count);
    for (std::size_t k = 0; k < count; ++k) {
      if (order[k].first > best.distance) break;
      buckets_[order[k].second].tree.nearestSurface(x, best);
    }
    return best;
  }

  template <class Fn>
  void forEachSurfaceWithin(const double* x, double radius, Fn&& fn) const {
    for (const auto& b : buckets_) b.tree.forEachSurfaceWithin(x, radius, fn);
  }

  template <class Fn>
  void forEachIntersectingBox(const double* lo, const double* hi, Fn&& fn) const {
    for (const auto& b : buckets_) b.tree.forEachIntersectingBox(lo, hi, fn);
  }

  template <class Fn>
  void forEachCenterWithin(const double* x, double radius, Fn&& fn) const {
    for (const auto& b : buckets_) b.tree.forEachCenterWithin(x, radius, fn);
  }

  template <class Pred>
  NearestHit nearestCenter(const double* x, Pred&& accept) const {
    NearestHit best;
    for (const auto& b : buckets_) b.tree.nearestCenter(x, accept, best);
    return best;
  }

 private:
  struct Bucket {
    int annulus = 0;
    double minNorm = 0.0;
    double maxNorm = 0.0;
    double maxRadius = 0.0;
    KdTree tree;
  };

  int d_ = 3;
  std::vector<Bucket> buckets_;
};

/// Distances from x to the unit sphere and to the nearest obstacle surface (annuli <= maxAnnulus).
struct NearestSurfaces {
  double outer = 0.0;
  double obstacle = std::numeric_limits<double>::infinity();
  std::int64_t obstacleId = -1;
};

/// Checked query: x must be inside the unit ball and outside every indexed obstacle.
inline NearestSurfaces nearestSurfaces(const ShellIndex& index, std::span<const double> x,
                                       int maxAnnulus = INT_MAX) {
  if (static_cast<int>(x.size()) != index.dimension()) throw DomainError("query point has the wrong dimension");
  const double r = norm(x);
  if (!(r < 1.0)) throw DomainError("query point is outside the open unit ball");
  const NearestHit hit = index.nearest(x.data(), maxAnnulus);
  if (hit.distance < 0.0) throw DomainError("query point lies inside obstacle " + std::to_string(hit.id));
  return NearestSurfaces{1.0 - r, hit.distance, hit.id};
}

}  // namespace champagne
