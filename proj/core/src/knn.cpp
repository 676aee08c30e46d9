#include "elliptest/knn.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "elliptest/errors.hpp"

namespace elliptest {

namespace {

// Both backends funnel every distance through this kernel, in the same
// accumulation order, so their outputs agree bitwise.
inline double squared_distance(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int t = 0; t < d; ++t) {
    const double diff = a[t] - b[t];
    s += diff * diff;
  }
  return s;
}

// Bounded k-best collector: max-heap on (squared distance, index), so ties at
// the boundary resolve to the lower index deterministically.
class BestK {
public:
  explicit BestK(int k) : k_(static_cast<std::size_t>(k)) { heap_.reserve(k_); }

  double bound() const {
    return heap_.size() == k_ ? heap_.front().first : std::numeric_limits<double>::infinity();
  }

  void push(double d2, int idx) {
    const std::pair<double, int> cand{d2, idx};
    if (heap_.size() < k_) {
      heap_.push_back(cand);
      std::push_heap(heap_.begin(), heap_.end());
      return;
    }
    if (cand < heap_.front()) {
      std::pop_heap(heap_.begin(), heap_.end());
      heap_.back() = cand;
      std::push_heap(heap_.begin(), heap_.end());
    }
  }

  // Ascending squared distances.
  std::vector<std::pair<double, int>> sorted() {
    std::sort(heap_.begin(), heap_.end());
    return heap_;
  }

private:
  std::size_t k_;
  std::vector<std::pair<double, int>> heap_;
};

struct Flattened {
  int n = 0;
  int d = 0;
  std::vector<double> rows;  // row-major copy for contiguous kernel access

  const double* row(int i) const { return rows.data() + static_cast<std::size_t>(i) * d; }
};

Flattened validate_and_flatten(const Eigen::MatrixXd& points, int k) {
  const int n = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());
  if (n < 2 || d < 1) {
    throw InvalidInput("knn_distances requires at least 2 points and dimension >= 1");
  }
  if (k < 1 || k > n - 1) {
    throw InvalidK("knn_distances requires 1 <= k <= n-1, got k=" + std::to_string(k) +
                   " with n=" + std::to_string(n));
  }
  if (!points.allFinite()) {
    throw InvalidInput("knn_distances requires finite coordinates");
  }
  Flattened f;
  f.n = n;
  f.d = d;
  f.rows.resize(static_cast<std::size_t>(n) * d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      f.rows[static_cast<std::size_t>(i) * d + j] = points(i, j);
    }
  }
  return f;
}

// A zero nearest-neighbor distance means exact duplicates; the log-distance
// terms downstream would be -inf, so fail with the offending pairs.
void check_duplicates(const Flattened& f, const NeighborDistances& result) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < result.n; ++i) {
    if (result(i, 0) != 0.0) {
      continue;
    }
    for (int j = 0; j < f.n && pairs.size() < 8; ++j) {
      if (j != i && squared_distance(f.row(i), f.row(j), f.d) == 0.0) {
        if (i < j) {
          pairs.emplace_back(i, j);
        }
        break;
      }
    }
  }
  bool any_zero = false;
  for (int i = 0; i < result.n; ++i) {
    if (result(i, 0) == 0.0) {
      any_zero = true;
      break;
    }
  }
  if (!any_zero) {
    return;
  }
  std::string msg = "duplicate points make nearest-neighbor distance zero; offending row pairs:";
  for (const auto& [a, b] : pairs) {
    msg += " (" + std::to_string(a) + "," + std::to_string(b) + ")";
  }
  throw DuplicatePoints(msg, std::move(pairs));
}

NeighborDistances finalize(const Flattened& f, int k,
                           const std::vector<std::vector<std::pair<double, int>>>& best) {
  NeighborDistances out;
  out.n = f.n;
  out.k = k;
  out.dist.resize(static_cast<std::size_t>(f.n) * k);
  for (int i = 0; i < f.n; ++i) {
    for (int j = 0; j < k; ++j) {
      out.dist[static_cast<std::size_t>(i) * k + j] = std::sqrt(best[i][j].first);
    }
  }
  check_duplicates(f, out);
  return out;
}

NeighborDistances brute_impl(const Flattened& f, int k) {
  std::vector<std::vector<std::pair<double, int>>> best(static_cast<std::size_t>(f.n));
  for (int i = 0; i < f.n; ++i) {
    BestK collector(k);
    const double* xi = f.row(i);
    for (int j = 0; j < f.n; ++j) {
      if (j == i) {
        continue;
      }
      collector.push(squared_distance(xi, f.row(j), f.d), j);
    }
    best[static_cast<std::size_t>(i)] = collector.sorted();
  }
  return finalize(f, k, best);
}

// Sorted two-pointer sweep for d == 1: neighbors of a value in sorted order
// are a contiguous window around it.
NeighborDistances sweep_1d_impl(const Flattened& f, int k) {
  const int n = f.n;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&f](int a, int b) {
    const double va = f.rows[static_cast<std::size_t>(a)];
    const double vb = f.rows[static_cast<std::size_t>(b)];
    return va < vb || (va == vb && a < b);
  });

  std::vector<std::vector<std::pair<double, int>>> best(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    const int self = order[static_cast<std::size_t>(q)];
    const double* xq = f.row(self);
    BestK collector(k);
    int l = q - 1;
    int r = q + 1;
    for (int taken = 0; taken < k; ++taken) {
      const bool has_l = l >= 0;
      const bool has_r = r < n;
      double dl = has_l ? squared_distance(xq, f.row(order[static_cast<std::size_t>(l)]), 1)
                        : std::numeric_limits<double>::infinity();
      double dr = has_r ? squared_distance(xq, f.row(order[static_cast<std::size_t>(r)]), 1)
                        : std::numeric_limits<double>::infinity();
      if (dl <= dr) {
        collector.push(dl, order[static_cast<std::size_t>(l)]);
        --l;
      } else {
        collector.push(dr, order[static_cast<std::size_t>(r)]);
        ++r;
      }
    }
    best[static_cast<std::size_t>(self)] = collector.sorted();
  }
  return finalize(f, k, best);
}

struct KdNode {
  int axis = -1;         // -1 marks a leaf
  double split = 0.0;
  int left = -1;
  int right = -1;
  int begin = 0;         // leaf range into the index permutation
  int end = 0;
};

class KdTree {
public:
  KdTree(const Flattened& f) : f_(f), idx_(static_cast<std::size_t>(f.n)) {
    std::iota(idx_.begin(), idx_.end(), 0);
    nodes_.reserve(static_cast<std::size_t>(2 * f.n / kLeafSize + 2));
    root_ = build(0, f.n);
  }

  void query(int self, BestK& collector) const { search(root_, self, collector); }

private:
  static constexpr int kLeafSize = 16;

  int build(int begin, int end) {
    KdNode node;
    node.begin = begin;
    node.end = end;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin <= kLeafSize) {
      return id;
    }
    // Split on the widest axis at the median point.
    int axis = 0;
    double best_extent = -1.0;
    for (int a = 0; a < f_.d; ++a) {
      double lo = f_.row(idx_[static_cast<std::size_t>(begin)])[a];
      double hi = lo;
      for (int t = begin + 1; t < end; ++t) {
        const double v = f_.row(idx_[static_cast<std::size_t>(t)])[a];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > best_extent) {
        best_extent = hi - lo;
        axis = a;
      }
    }
    const int mid = begin + (end - begin) / 2;
    std::nth_element(idx_.begin() + begin, idx_.begin() + mid, idx_.begin() + end,
                     [this, axis](int a, int b) {
                       const double va = f_.row(a)[axis];
                       const double vb = f_.row(b)[axis];
                       return va < vb || (va == vb && a < b);
                     });
    nodes_[static_cast<std::size_t>(id)].axis = axis;
    nodes_[static_cast<std::size_t>(id)].split = f_.row(idx_[static_cast<std::size_t>(mid)])[axis];
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    return id;
  }

  void search(int node_id, int self, BestK& collector) const {
    const KdNode& node = nodes_[static_cast<std::size_t>(node_id)];
    const double* xq = f_.row(self);
    if (node.axis < 0) {
      for (int t = node.begin; t < node.end; ++t) {
        const int j = idx_[static_cast<std::size_t>(t)];
        if (j != self) {
          collector.push(squared_distance(xq, f_.row(j), f_.d), j);
        }
      }
      return;
    }
    const double diff = xq[node.axis] - node.split;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    search(near, self, collector);
    if (diff * diff < collector.bound()) {
      search(far, self, collector);
    }
  }

  const Flattened& f_;
  std::vector<int> idx_;
  std::vector<KdNode> nodes_;
  int root_ = 0;
};

NeighborDistances tree_impl(const Flattened& f, int k) {
  if (f.d == 1) {
    return sweep_1d_impl(f, k);
  }
  KdTree tree(f);
  std::vector<std::vector<std::pair<double, int>>> best(static_cast<std::size_t>(f.n));
  for (int i = 0; i < f.n; ++i) {
    BestK collector(k);
    tree.query(i, collector);
    best[static_cast<std::size_t>(i)] = collector.sorted();
  }
  return finalize(f, k, best);
}

}  // namespace

NeighborDistances knn_distances_brute(const Eigen::MatrixXd& points, int k) {
  return brute_impl(validate_and_flatten(points, k), k);
}

NeighborDistances knn_distances_tree(const Eigen::MatrixXd& points, int k) {
  return tree_impl(validate_and_flatten(points, k), k);
}

NeighborDistances knn_distances(const Eigen::MatrixXd& points, int k) {
  const Flattened f = validate_and_flatten(points, k);
  if (f.n < 64 || f.d > 15) {
    return brute_impl(f, k);
  }
  return tree_impl(f, k);
}

}  // namespace elliptest
