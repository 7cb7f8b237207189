#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace diflow {

/// Digamma, accurate to better than 1e-10 over [1e-3, 1e6].
double digamma(double v);

/// Dense row-major point store; all neighbor machinery works on max-norm
/// (Chebyshev) distances over these rows.
class PointSet {
public:
    PointSet() = default;
    PointSet(std::size_t n, std::size_t dims) : n_(n), d_(dims), data_(n * dims, 0.0) {}

    std::size_t size() const { return n_; }
    std::size_t dims() const { return d_; }

    double& at(std::size_t row, std::size_t col) { return data_[row * d_ + col]; }
    double at(std::size_t row, std::size_t col) const { return data_[row * d_ + col]; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * d_, d_}; }

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> data_;
};

double max_norm_distance(std::span<const double> a, std::span<const double> b);

/// Number of points (excluding `center`) strictly inside the max-norm ball.
/// Brute force; the reference all spatial indexing must match exactly.
std::size_t count_within(const PointSet& points, std::size_t center, double radius);

/// Brute-force k nearest neighbors of `query`, ordered by (distance, index),
/// optionally excluding one index. Requires k valid candidates.
std::vector<std::pair<double, int>> nearest_brute(const PointSet& points,
                                                  std::span<const double> query, int k,
                                                  std::ptrdiff_t exclude = -1);

/// Exact max-norm k-d tree. Matches the brute-force routines above on every
/// query, including tie-breaks (verified by property tests).
class KdTree {
public:
    explicit KdTree(const PointSet& points, std::size_t leaf_size = 16);

    /// Points with distance strictly below radius; the query point itself is
    /// included when it is a member row (distance 0).
    std::size_t count_strictly_within(std::span<const double> query, double radius) const;

    /// k nearest by (distance, index), ascending, excluding `exclude`.
    void nearest(std::span<const double> query, int k, std::ptrdiff_t exclude,
                 std::vector<std::pair<double, int>>& out) const;

private:
    struct Node {
        int left = -1;
        int right = -1;
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::uint32_t box_offset = 0;  // into boxes_: dims lo values then dims hi values
    };

    int build(std::uint32_t begin, std::uint32_t end, std::size_t leaf_size);
    double box_min_distance(const Node& node, std::span<const double> q) const;
    double box_max_distance(const Node& node, std::span<const double> q) const;
    void count_rec(int node_id, std::span<const double> q, double radius,
                   std::size_t& count) const;
    void nearest_rec(int node_id, std::span<const double> q, std::size_t k,
                     std::ptrdiff_t exclude, std::vector<std::pair<double, int>>& heap) const;

    const PointSet* points_ = nullptr;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
    std::vector<double> boxes_;
    int root_ = -1;
};

/// One estimation sample: source past x (dim M), target next y, target past z
/// (dim M; may be empty for plain mutual information).
struct CmiSample {
    std::vector<double> x;
    double y = 0.0;
    std::vector<double> z;
};

/// Nearest-neighbor conditional mutual information I(x; y | z) in nats,
/// Frenzel-Pompe form (Kraskov algorithm-1 analogue): with eps_i the k-th
/// neighbor max-norm radius in the joint space and strict '<' counts n_* in
/// the (x,z), (y,z) and (z) subspaces,
///   I = psi(k) + mean_i[ psi(n_z+1) - psi(n_xz+1) - psi(n_yz+1) ].
///
/// Samples are canonically ordered and each coordinate is standardized
/// internally, then deterministic jitter of amplitude 1e-10 (hashed from
/// jitter_seed, canonical index and coordinate) breaks exact ties. The result
/// is therefore a pure function of the sample multiset: exactly permutation
/// invariant and exactly invariant under power-of-two scaling of any block.
double estimate_cmi(std::span<const CmiSample> samples, int k, std::uint64_t jitter_seed);

}  // namespace diflow
