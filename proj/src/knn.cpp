#include "diflow/knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "diflow/error.hpp"
#include "diflow/rng.hpp"

namespace diflow {

double digamma(double v) {
    if (!(v > 0.0)) {
        throw Error(ErrorCode::DomainError, "digamma requires v > 0");
    }
    double acc = 0.0;
    while (v < 8.0) {  // recurrence up to the asymptotic regime
        acc -= 1.0 / v;
        v += 1.0;
    }
    double f = 1.0 / (v * v);
    double tail =
        f * (1.0 / 12 -
             f * (1.0 / 120 - f * (1.0 / 252 - f * (1.0 / 240 - f * (1.0 / 132 -
                                                                     f * (691.0 / 32760))))));
    return acc + std::log(v) - 0.5 / v - tail;
}

double max_norm_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        double diff = std::fabs(a[c] - b[c]);
        if (diff > d) d = diff;
    }
    return d;
}

std::size_t count_within(const PointSet& points, std::size_t center, double radius) {
    std::size_t count = 0;
    auto q = points.row(center);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i == center) continue;
        if (max_norm_distance(q, points.row(i)) < radius) ++count;
    }
    return count;
}

std::vector<std::pair<double, int>> nearest_brute(const PointSet& points,
                                                  std::span<const double> query, int k,
                                                  std::ptrdiff_t exclude) {
    std::vector<std::pair<double, int>> all;
    all.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (static_cast<std::ptrdiff_t>(i) == exclude) continue;
        all.emplace_back(max_norm_distance(query, points.row(i)), static_cast<int>(i));
    }
    if (all.size() < static_cast<std::size_t>(k)) {
        throw Error(ErrorCode::TooFewSamples, "fewer candidates than k");
    }
    std::partial_sort(all.begin(), all.begin() + k, all.end());
    all.resize(k);
    return all;
}

// ---------------------------------------------------------------------------
// KdTree

KdTree::KdTree(const PointSet& points, std::size_t leaf_size) : points_(&points) {
    order_.resize(points.size());
    std::iota(order_.begin(), order_.end(), 0u);
    if (!points.size()) return;
    nodes_.reserve(2 * points.size() / std::max<std::size_t>(leaf_size, 1) + 2);
    root_ = build(0, static_cast<std::uint32_t>(points.size()), std::max<std::size_t>(leaf_size, 1));
}

int KdTree::build(std::uint32_t begin, std::uint32_t end, std::size_t leaf_size) {
    const std::size_t dims = points_->dims();
    Node node;
    node.begin = begin;
    node.end = end;
    node.box_offset = static_cast<std::uint32_t>(boxes_.size());
    boxes_.resize(boxes_.size() + 2 * dims);
    for (std::size_t c = 0; c < dims; ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::uint32_t i = begin; i < end; ++i) {
            double v = points_->at(order_[i], c);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        boxes_[node.box_offset + c] = lo;
        boxes_[node.box_offset + dims + c] = hi;
    }
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin <= leaf_size || dims == 0) {
        return id;
    }
    // split the widest coordinate at its median
    std::size_t split_dim = 0;
    double best_spread = -1.0;
    for (std::size_t c = 0; c < dims; ++c) {
        double spread = boxes_[node.box_offset + dims + c] - boxes_[node.box_offset + c];
        if (spread > best_spread) {
            best_spread = spread;
            split_dim = c;
        }
    }
    if (best_spread <= 0.0) {
        return id;  // all points identical: keep as leaf
    }
    std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         return points_->at(a, split_dim) < points_->at(b, split_dim);
                     });
    int left = build(begin, mid, leaf_size);
    int right = build(mid, end, leaf_size);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

double KdTree::box_min_distance(const Node& node, std::span<const double> q) const {
    const std::size_t dims = points_->dims();
    double d = 0.0;
    for (std::size_t c = 0; c < dims; ++c) {
        double lo = boxes_[node.box_offset + c];
        double hi = boxes_[node.box_offset + dims + c];
        double gap = 0.0;
        if (q[c] < lo) gap = lo - q[c];
        else if (q[c] > hi) gap = q[c] - hi;
        if (gap > d) d = gap;
    }
    return d;
}

double KdTree::box_max_distance(const Node& node, std::span<const double> q) const {
    const std::size_t dims = points_->dims();
    double d = 0.0;
    for (std::size_t c = 0; c < dims; ++c) {
        double lo = boxes_[node.box_offset + c];
        double hi = boxes_[node.box_offset + dims + c];
        double far = std::max(std::fabs(q[c] - lo), std::fabs(q[c] - hi));
        if (far > d) d = far;
    }
    return d;
}

void KdTree::count_rec(int node_id, std::span<const double> q, double radius,
                       std::size_t& count) const {
    const Node& node = nodes_[node_id];
    if (box_min_distance(node, q) >= radius) return;
    if (box_max_distance(node, q) < radius) {
        count += node.end - node.begin;  // whole box strictly inside
        return;
    }
    if (node.left < 0) {
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            if (max_norm_distance(q, points_->row(order_[i])) < radius) ++count;
        }
        return;
    }
    count_rec(node.left, q, radius, count);
    count_rec(node.right, q, radius, count);
}

std::size_t KdTree::count_strictly_within(std::span<const double> query, double radius) const {
    std::size_t count = 0;
    if (root_ >= 0 && radius > 0.0) count_rec(root_, query, radius, count);
    return count;
}

namespace {
// max-heap keyed by (distance, index): top() is the current worst neighbor
inline void heap_push(std::vector<std::pair<double, int>>& heap, std::pair<double, int> v) {
    heap.push_back(v);
    std::push_heap(heap.begin(), heap.end());
}
inline void heap_replace_top(std::vector<std::pair<double, int>>& heap,
                             std::pair<double, int> v) {
    std::pop_heap(heap.begin(), heap.end());
    heap.back() = v;
    std::push_heap(heap.begin(), heap.end());
}
}  // namespace

void KdTree::nearest_rec(int node_id, std::span<const double> q, std::size_t k,
                         std::ptrdiff_t exclude,
                         std::vector<std::pair<double, int>>& heap) const {
    const Node& node = nodes_[node_id];
    if (heap.size() == k) {
        // prune only on strictly worse bounds: an equal-distance point with a
        // smaller index must still be visited to honor the tie-break
        if (box_min_distance(node, q) > heap.front().first) return;
    }
    if (node.left < 0) {
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            int idx = static_cast<int>(order_[i]);
            if (static_cast<std::ptrdiff_t>(idx) == exclude) continue;
            std::pair<double, int> cand{max_norm_distance(q, points_->row(idx)), idx};
            if (heap.size() < k) {
                heap_push(heap, cand);
            } else if (cand < heap.front()) {
                heap_replace_top(heap, cand);
            }
        }
        return;
    }
    double dl = box_min_distance(nodes_[node.left], q);
    double dr = box_min_distance(nodes_[node.right], q);
    int first = node.left, second = node.right;
    if (dr < dl) std::swap(first, second);
    nearest_rec(first, q, k, exclude, heap);
    nearest_rec(second, q, k, exclude, heap);
}

void KdTree::nearest(std::span<const double> query, int k, std::ptrdiff_t exclude,
                     std::vector<std::pair<double, int>>& out) const {
    out.clear();
    std::ptrdiff_t candidates =
        static_cast<std::ptrdiff_t>(points_->size()) - (exclude >= 0 ? 1 : 0);
    if (k < 1 || candidates < k) {
        throw Error(ErrorCode::TooFewSamples, "fewer candidates than k");
    }
    nearest_rec(root_, query, static_cast<std::size_t>(k), exclude, out);
    std::sort(out.begin(), out.end());
}

// ---------------------------------------------------------------------------
// Conditional mutual information

double estimate_cmi(std::span<const CmiSample> samples, int k, std::uint64_t jitter_seed) {
    const std::size_t n = samples.size();
    if (k < 1) {
        throw Error(ErrorCode::ConfigError, "k must be >= 1");
    }
    if (n < static_cast<std::size_t>(k) + 2) {
        throw Error(ErrorCode::TooFewSamples,
                    "need at least k + 2 samples, got " + std::to_string(n));
    }
    const std::size_t dx = samples[0].x.size();
    const std::size_t dz = samples[0].z.size();
    for (const CmiSample& s : samples) {
        if (s.x.size() != dx || s.z.size() != dz) {
            throw Error(ErrorCode::ConfigError, "inconsistent sample dimensions");
        }
    }
    const std::size_t d = dx + 1 + dz;

    // canonical order: lexicographic over (x, y, z); makes the estimate a
    // function of the sample multiset only
    std::vector<std::uint32_t> canon(n);
    std::iota(canon.begin(), canon.end(), 0u);
    auto row_less = [&](std::uint32_t a, std::uint32_t b) {
        const CmiSample& sa = samples[a];
        const CmiSample& sb = samples[b];
        for (std::size_t c = 0; c < dx; ++c) {
            if (sa.x[c] != sb.x[c]) return sa.x[c] < sb.x[c];
        }
        if (sa.y != sb.y) return sa.y < sb.y;
        for (std::size_t c = 0; c < dz; ++c) {
            if (sa.z[c] != sb.z[c]) return sa.z[c] < sb.z[c];
        }
        return false;
    };
    std::sort(canon.begin(), canon.end(), row_less);

    PointSet joint(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const CmiSample& s = samples[canon[i]];
        for (std::size_t c = 0; c < dx; ++c) joint.at(i, c) = s.x[c];
        joint.at(i, dx) = s.y;
        for (std::size_t c = 0; c < dz; ++c) joint.at(i, dx + 1 + c) = s.z[c];
    }

    // per-coordinate standardization, then deterministic tie-breaking jitter
    for (std::size_t c = 0; c < d; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += joint.at(i, c);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double dev = joint.at(i, c) - mean;
            var += dev * dev;
        }
        double sd = std::sqrt(var / static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            // jitter amplitude scales with the coordinate spread, so constant
            // coordinates stay exactly constant
            joint.at(i, c) =
                sd > 0.0 ? (joint.at(i, c) - mean) / sd +
                               (2.0 * hash_unit(jitter_seed, i, c) - 1.0) * 1e-10
                         : 0.0;
        }
    }

    PointSet xz(n, dx + dz);
    PointSet yz(n, 1 + dz);
    PointSet zz(n, dz);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < dx; ++c) xz.at(i, c) = joint.at(i, c);
        for (std::size_t c = 0; c < dz; ++c) xz.at(i, dx + c) = joint.at(i, dx + 1 + c);
        yz.at(i, 0) = joint.at(i, dx);
        for (std::size_t c = 0; c < dz; ++c) {
            yz.at(i, 1 + c) = joint.at(i, dx + 1 + c);
            zz.at(i, c) = joint.at(i, dx + 1 + c);
        }
    }

    KdTree joint_tree(joint);
    KdTree xz_tree(xz);
    KdTree yz_tree(yz);
    KdTree z_tree(zz);

    std::vector<std::pair<double, int>> nn;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        joint_tree.nearest(joint.row(i), k, static_cast<std::ptrdiff_t>(i), nn);
        double eps = nn.back().first;
        if (eps <= 0.0) {
            throw Error(ErrorCode::DegenerateGeometry,
                        "zero k-NN radius at sample " + std::to_string(i));
        }
        // counts include the query row itself (distance 0 < eps): subtract it
        double n_xz = static_cast<double>(xz_tree.count_strictly_within(xz.row(i), eps)) - 1.0;
        double n_yz = static_cast<double>(yz_tree.count_strictly_within(yz.row(i), eps)) - 1.0;
        double n_z = dz ? static_cast<double>(z_tree.count_strictly_within(zz.row(i), eps)) - 1.0
                        : static_cast<double>(n) - 1.0;
        acc += digamma(n_z + 1.0) - digamma(n_xz + 1.0) - digamma(n_yz + 1.0);
    }
    return digamma(static_cast<double>(k)) + acc / static_cast<double>(n);
}

}  // namespace diflow
