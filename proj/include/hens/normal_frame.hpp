#pragma once

// Normal frames: bracket completion of a generating set in lexicographic word
// order, with the product-rule extension of a leaf metric.

#include "hens/algebra.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace hens {

struct FrameNode {
  Vec vector;
  /// Leaf index sequence a1 ... aq of the multi-bracket [X_a1, [..., X_aq]].
  std::vector<int> word;
  int degree = 1;
  /// Branches (node indices); -1 for leaves. `left` is always a leaf.
  int left = -1;
  int right = -1;

  bool is_leaf() const { return left < 0; }
};

struct FrameTree {
  std::vector<FrameNode> nodes;
  int leaf_count = 0;

  int size() const { return static_cast<int>(nodes.size()); }

  /// Node vectors as columns.
  Mat basis() const {
    if (nodes.empty()) return Mat();
    Mat b(nodes.front().vector.size(), size());
    for (int k = 0; k < size(); ++k) b.col(k) = nodes[static_cast<std::size_t>(k)].vector;
    return b;
  }

  std::vector<int> degrees() const {
    std::vector<int> d;
    for (const auto& n : nodes) d.push_back(n.degree);
    return d;
  }

  std::string word_string(int k) const {
    const auto& w = nodes.at(static_cast<std::size_t>(k)).word;
    std::string s;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) s += "[X" + std::to_string(w[i] + 1) + ",";
    s += "X" + std::to_string(w.back() + 1);
    s += std::string(w.size() - 1, ']');
    return s;
  }
};

inline FrameTree build_normal_frame(const GradedAlgebra& alg, const std::vector<Vec>& generators,
                                    double rank_threshold = 1e-10) {
  const int n = alg.dim();
  if (generators.empty()) throw DomainError("build_normal_frame: no generators");
  FrameTree tree;
  tree.leaf_count = static_cast<int>(generators.size());
  Mat span(n, 0);
  for (std::size_t i = 0; i < generators.size(); ++i) {
    require_dim(generators[i], n, "build_normal_frame");
    FrameNode node;
    node.vector = generators[i];
    node.word = {static_cast<int>(i)};
    tree.nodes.push_back(node);
    span = hcat(span, generators[i]);
  }
  auto rank = numeric_rank(span, rank_threshold);
  if (rank != static_cast<Eigen::Index>(generators.size())) {
    throw DomainError("build_normal_frame: generators are linearly dependent");
  }
  for (int degree = 2; rank < n; ++degree) {
    struct Candidate {
      std::vector<int> word;
      int leaf;
      int right;
    };
    std::vector<Candidate> cands;
    for (int r = 0; r < tree.size(); ++r) {
      if (tree.nodes[static_cast<std::size_t>(r)].degree != degree - 1) continue;
      for (int l = 0; l < tree.leaf_count; ++l) {
        Candidate c{{l}, l, r};
        const auto& w = tree.nodes[static_cast<std::size_t>(r)].word;
        c.word.insert(c.word.end(), w.begin(), w.end());
        cands.push_back(std::move(c));
      }
    }
    if (cands.empty()) {
      throw ValidationError("build_normal_frame: generators do not bracket-generate the algebra (rank " +
                            std::to_string(rank) + " of " + std::to_string(n) + ")");
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.word < b.word; });
    for (const auto& c : cands) {
      Vec v = bracket(alg, tree.nodes[static_cast<std::size_t>(c.leaf)].vector,
                      tree.nodes[static_cast<std::size_t>(c.right)].vector);
      Mat trial = hcat(span, v);
      auto r = numeric_rank(trial, rank_threshold);
      if (r <= rank) continue;
      FrameNode node;
      node.vector = v;
      node.word = c.word;
      node.degree = degree;
      node.left = c.leaf;
      node.right = c.right;
      tree.nodes.push_back(node);
      span = trial;
      rank = r;
      if (rank == n) break;
    }
    if (degree > n + 1) {
      throw ValidationError("build_normal_frame: generators do not bracket-generate the algebra");
    }
  }
  return tree;
}

/// Metric on the frame: leaf block g, diagonal product rule on brackets,
/// every other entry zero (distinct nodes of a common degree are orthogonal).
inline Mat extend_metric(const FrameTree& tree, const Mat& g) {
  require_square(g, tree.leaf_count, "extend_metric");
  if (max_abs(Mat(g - g.transpose())) > 1e-12 * std::max(1.0, max_abs(g)) || !(min_eigenvalue(g) > 0.0)) {
    throw DomainError("extend_metric: leaf metric must be symmetric positive definite");
  }
  const int n = tree.size();
  Mat out = Mat::Zero(n, n);
  out.topLeftCorner(tree.leaf_count, tree.leaf_count) = g;
  for (int k = tree.leaf_count; k < n; ++k) {
    const auto& node = tree.nodes[static_cast<std::size_t>(k)];
    out(k, k) = out(node.left, node.left) * out(node.right, node.right);
  }
  return out;
}

/// Frame metric expressed in ambient coordinates: B^{-T} G B^{-1}.
inline Mat frame_metric_in_ambient(const FrameTree& tree, const Mat& frame_metric) {
  Mat b = tree.basis();
  require_square(frame_metric, b.cols(), "frame_metric_in_ambient");
  if (b.rows() != b.cols()) throw DimensionError("frame_metric_in_ambient: frame is not a basis");
  Mat binv = b.fullPivLu().inverse();
  Mat out = binv.transpose() * frame_metric * binv;
  return 0.5 * (out + out.transpose());
}

}  // namespace hens
