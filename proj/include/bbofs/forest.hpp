#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bbofs/data.hpp"
#include "bbofs/rng.hpp"

namespace bbofs {

struct TreeNode {
  static constexpr std::uint32_t kNone = 0xffffffffu;

  std::uint32_t gene = kNone;  // kNone marks a leaf
  double threshold = 0.0;      // x[gene] <= threshold goes left
  std::uint32_t left = kNone;
  std::uint32_t right = kNone;
  Label label = -1;            // majority class of the node's samples

  bool is_leaf() const noexcept { return gene == kNone; }
};

/// CART classification tree (Gini impurity, unpruned). nodes[0] is the root.
class DecisionTree {
 public:
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t leaf_of(std::span<const double> x) const noexcept;
  Label predict(std::span<const double> x) const noexcept { return nodes_[leaf_of(x)].label; }

 private:
  std::vector<TreeNode> nodes_;
};

/// Grows a tree on train rows `samples` (repeats allowed, as in a bootstrap).
/// At each node `mtry` genes are drawn without replacement and the best Gini
/// split among them is taken; ties go to the lower gene index, then the lower
/// threshold. A node becomes a leaf when pure, when fewer than 2 samples
/// remain, or when no sampled split lowers impurity. Leaf ties go to -1.
DecisionTree tree_grow(const Dataset& train, std::span<const std::size_t> samples,
                       std::size_t mtry, Rng& rng);
/// Grows on every row of `train`.
DecisionTree tree_grow(const Dataset& train, std::size_t mtry, Rng& rng);

struct ForestModel {
  std::vector<DecisionTree> trees;
  /// inbag[t][i]: how many times sample i was drawn into tree t's bootstrap.
  std::vector<std::vector<std::uint32_t>> inbag;
  std::size_t mtry = 1;
  std::size_t n_genes = 0;

  std::size_t n_trees() const noexcept { return trees.size(); }
};

/// floor(sqrt(n_genes)), at least 1.
std::size_t default_mtry(std::size_t n_genes) noexcept;

/// Bagged CART forest. Tree t draws from its own stream derive_seed(seed, t),
/// so the result does not depend on `threads`.
ForestModel forest_train(const Dataset& train, std::size_t n_trees, std::size_t mtry,
                         std::uint64_t seed, unsigned threads = 1);

/// Majority vote over all trees; an exact tie gives -1.
Label forest_predict(const ForestModel& model, std::span<const double> x);

struct OobResult {
  double error = 0.0;       // misvoted / voted (0 when nothing was voted)
  std::size_t voted = 0;    // samples with at least one out-of-bag tree
  std::size_t misvoted = 0;
  std::size_t skipped = 0;  // samples that were in every tree's bootstrap
};

/// Out-of-bag error: each sample is voted only by trees that did not draw it.
OobResult oob_error(const ForestModel& model, const Dataset& train);

}  // namespace bbofs
