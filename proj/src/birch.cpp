#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "algo_detail.hpp"

namespace clubench::detail {

namespace {

struct CFNode;

// clustering feature: count, linear sum, squared-norm sum
struct CFEntry {
  double n = 0.0;
  Eigen::VectorXd ls;
  double ss = 0.0;
  std::unique_ptr<CFNode> child;  // null in leaf nodes

  Eigen::VectorXd centroid() const { return ls / n; }

  void absorb(const CFEntry& other) {
    n += other.n;
    ls += other.ls;
    ss += other.ss;
  }

  double radius_if_merged(const CFEntry& other) const {
    double nn = n + other.n;
    Eigen::VectorXd nls = ls + other.ls;
    double nss = ss + other.ss;
    double r2 = nss / nn - (nls / nn).squaredNorm();
    return std::sqrt(std::max(0.0, r2));
  }
};

struct CFNode {
  bool is_leaf = true;
  std::vector<CFEntry> entries;
};

CFEntry point_entry(const Eigen::RowVectorXd& x) {
  CFEntry e;
  e.n = 1.0;
  e.ls = x.transpose();
  e.ss = x.squaredNorm();
  return e;
}

int closest_entry(const CFNode& node, const Eigen::VectorXd& c) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < node.entries.size(); ++i) {
    double d = (node.entries[i].centroid() - c).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

// farthest-pair seeding; returns the sibling created to the right
std::unique_ptr<CFNode> split_node(CFNode& node) {
  int sa = 0, sb = 1;
  double worst = -1.0;
  for (std::size_t i = 0; i < node.entries.size(); ++i) {
    for (std::size_t j = i + 1; j < node.entries.size(); ++j) {
      double d = (node.entries[i].centroid() - node.entries[j].centroid()).squaredNorm();
      if (d > worst) {
        worst = d;
        sa = static_cast<int>(i);
        sb = static_cast<int>(j);
      }
    }
  }
  auto right = std::make_unique<CFNode>();
  right->is_leaf = node.is_leaf;
  std::vector<CFEntry> keep;
  Eigen::VectorXd ca = node.entries[static_cast<std::size_t>(sa)].centroid();
  Eigen::VectorXd cb = node.entries[static_cast<std::size_t>(sb)].centroid();
  for (std::size_t i = 0; i < node.entries.size(); ++i) {
    auto& e = node.entries[i];
    double da = (e.centroid() - ca).squaredNorm();
    double db = (e.centroid() - cb).squaredNorm();
    bool to_left = static_cast<int>(i) == sa || (static_cast<int>(i) != sb && da <= db);
    if (to_left)
      keep.push_back(std::move(e));
    else
      right->entries.push_back(std::move(e));
  }
  node.entries = std::move(keep);
  return right;
}

CFEntry summarize(std::unique_ptr<CFNode> node) {
  CFEntry e;
  e.n = 0.0;
  e.ss = 0.0;
  for (const auto& sub : node->entries) {
    if (e.ls.size() == 0) e.ls = Eigen::VectorXd::Zero(sub.ls.size());
    e.n += sub.n;
    e.ls += sub.ls;
    e.ss += sub.ss;
  }
  e.child = std::move(node);
  return e;
}

// returns a sibling entry when the child had to split
std::unique_ptr<CFNode> insert(CFNode& node, const CFEntry& point, double threshold,
                               int branching) {
  if (node.is_leaf) {
    if (!node.entries.empty()) {
      int best = closest_entry(node, point.centroid());
      if (node.entries[static_cast<std::size_t>(best)].radius_if_merged(point) <= threshold) {
        node.entries[static_cast<std::size_t>(best)].absorb(point);
        return nullptr;
      }
    }
    CFEntry e;
    e.n = point.n;
    e.ls = point.ls;
    e.ss = point.ss;
    node.entries.push_back(std::move(e));
  } else {
    int best = closest_entry(node, point.centroid());
    auto& chosen = node.entries[static_cast<std::size_t>(best)];
    auto sibling = insert(*chosen.child, point, threshold, branching);
    chosen.n += point.n;
    chosen.ls += point.ls;
    chosen.ss += point.ss;
    if (sibling) {
      // the split child keeps its slot; recompute both summaries
      auto left_child = std::move(chosen.child);
      CFEntry left = summarize(std::move(left_child));
      CFEntry right = summarize(std::move(sibling));
      node.entries[static_cast<std::size_t>(best)] = std::move(left);
      node.entries.push_back(std::move(right));
    }
  }
  if (static_cast<int>(node.entries.size()) > branching) return split_node(node);
  return nullptr;
}

void collect_leaf_centroids(const CFNode& node, std::vector<Eigen::VectorXd>& out) {
  if (node.is_leaf) {
    for (const auto& e : node.entries) out.push_back(e.centroid());
  } else {
    for (const auto& e : node.entries) collect_leaf_centroids(*e.child, out);
  }
}

}  // namespace

std::vector<int> birch(const Eigen::MatrixXd& X, double threshold_abs, int branching_factor,
                       int k) {
  const int n = static_cast<int>(X.rows());
  if (branching_factor < 2) throw std::invalid_argument("birch: branching_factor must be >= 2");
  if (threshold_abs <= 0.0) throw std::invalid_argument("birch: threshold must be positive");

  auto root = std::make_unique<CFNode>();
  for (int i = 0; i < n; ++i) {
    auto sibling = insert(*root, point_entry(X.row(i)), threshold_abs, branching_factor);
    if (sibling) {
      auto new_root = std::make_unique<CFNode>();
      new_root->is_leaf = false;
      new_root->entries.push_back(summarize(std::move(root)));
      new_root->entries.push_back(summarize(std::move(sibling)));
      root = std::move(new_root);
    }
  }

  std::vector<Eigen::VectorXd> centroids;
  collect_leaf_centroids(*root, centroids);
  const int c = static_cast<int>(centroids.size());

  // global step: average-linkage agglomeration of the leaf centroids
  std::vector<int> centroid_cluster(static_cast<std::size_t>(c));
  if (c <= k) {
    for (int i = 0; i < c; ++i) centroid_cluster[static_cast<std::size_t>(i)] = i;
  } else {
    Eigen::MatrixXd C(c, X.cols());
    for (int i = 0; i < c; ++i) C.row(i) = centroids[static_cast<std::size_t>(i)].transpose();
    centroid_cluster = agglomerative(C, Metric::euclidean, Linkage::average, k);
  }

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < c; ++j) {
      double d = (X.row(i).transpose() - centroids[static_cast<std::size_t>(j)]).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    labels[static_cast<std::size_t>(i)] = centroid_cluster[static_cast<std::size_t>(best)];
  }
  return compress_labels(std::move(labels));
}

}  // namespace clubench::detail
