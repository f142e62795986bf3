#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "algo_detail.hpp"

namespace clubench::detail {

Linkage linkage_from_string(const std::string& s) {
  if (s == "average") return Linkage::average;
  if (s == "complete") return Linkage::complete;
  if (s == "single") return Linkage::single;
  throw std::invalid_argument("unknown linkage: " + s);
}

std::vector<MergeStep> agglomerate(Eigen::MatrixXd dist, Linkage linkage) {
  const int n = static_cast<int>(dist.rows());
  if (n < 1) throw std::invalid_argument("agglomerate: empty input");

  // active[i]: i currently represents a live cluster; id[i]: its public id
  // (0..n-1 for leaves, n+step for merged clusters)
  std::vector<bool> active(static_cast<std::size_t>(n), true);
  std::vector<int> id(static_cast<std::size_t>(n));
  std::vector<double> size(static_cast<std::size_t>(n), 1.0);
  std::iota(id.begin(), id.end(), 0);

  std::vector<MergeStep> merges;
  merges.reserve(static_cast<std::size_t>(n > 0 ? n - 1 : 0));

  std::vector<int> chain;
  chain.reserve(static_cast<std::size_t>(n));

  auto nearest = [&](int a) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int b = 0; b < n; ++b) {
      if (!active[static_cast<std::size_t>(b)] || b == a) continue;
      if (dist(a, b) < best_d) {
        best_d = dist(a, b);
        best = b;
      }
    }
    return std::pair<int, double>(best, best_d);
  };

  int remaining = n;
  while (remaining > 1) {
    if (chain.empty()) {
      for (int i = 0; i < n; ++i)
        if (active[static_cast<std::size_t>(i)]) {
          chain.push_back(i);
          break;
        }
    }
    for (;;) {
      int a = chain.back();
      auto [b, d] = nearest(a);
      if (chain.size() >= 2 && b == chain[chain.size() - 2]) {
        // reciprocal nearest neighbors: merge a and b
        chain.pop_back();
        chain.pop_back();
        int lo = std::min(a, b), hi = std::max(a, b);
        merges.push_back({id[static_cast<std::size_t>(lo)], id[static_cast<std::size_t>(hi)], d});

        // Lance-Williams update into slot lo
        double na = size[static_cast<std::size_t>(lo)], nb = size[static_cast<std::size_t>(hi)];
        for (int c = 0; c < n; ++c) {
          if (!active[static_cast<std::size_t>(c)] || c == lo || c == hi) continue;
          double dac = dist(lo, c), dbc = dist(hi, c);
          double nd = 0.0;
          switch (linkage) {
            case Linkage::single: nd = std::min(dac, dbc); break;
            case Linkage::complete: nd = std::max(dac, dbc); break;
            case Linkage::average: nd = (na * dac + nb * dbc) / (na + nb); break;
          }
          dist(lo, c) = nd;
          dist(c, lo) = nd;
        }
        active[static_cast<std::size_t>(hi)] = false;
        size[static_cast<std::size_t>(lo)] = na + nb;
        id[static_cast<std::size_t>(lo)] = n + static_cast<int>(merges.size()) - 1;
        --remaining;
        break;
      }
      chain.push_back(b);
    }
  }
  return merges;
}

std::vector<int> cut_merges(const std::vector<MergeStep>& merges, int n, int k) {
  if (k < 1 || k > n) throw std::invalid_argument("cut_merges: k out of range");

  // replay the n-k cheapest merges; heights from NN-chain are monotone per
  // linkage theory, but sort anyway to make the cut well-defined
  std::vector<int> order(merges.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&merges](int a, int b) {
    return merges[static_cast<std::size_t>(a)].height < merges[static_cast<std::size_t>(b)].height;
  });

  std::vector<int> parent(static_cast<std::size_t>(n + merges.size()));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };

  // map public merge ids to union-find roots as we replay in sorted order
  std::vector<int> taken;
  for (int step = 0; step < n - k; ++step) {
    const MergeStep& mrg = merges[static_cast<std::size_t>(order[static_cast<std::size_t>(step)])];
    int ra = find(mrg.a), rb = find(mrg.b);
    int merged_id = n + order[static_cast<std::size_t>(step)];
    parent[static_cast<std::size_t>(ra)] = merged_id;
    parent[static_cast<std::size_t>(rb)] = merged_id;
  }

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = find(i);
  return compress_labels(std::move(labels));
}

std::vector<int> agglomerative(const Eigen::MatrixXd& X, Metric metric, Linkage linkage, int k) {
  Eigen::MatrixXd dist = pairwise_distance(X, metric);
  auto merges = agglomerate(std::move(dist), linkage);
  return cut_merges(merges, static_cast<int>(X.rows()), k);
}

}  // namespace clubench::detail
