#include "bbofs/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bbofs/error.hpp"
#include "bbofs/parallel.hpp"

namespace bbofs {

std::size_t DecisionTree::leaf_of(std::span<const double> x) const noexcept {
  std::size_t node = 0;
  while (!nodes_[node].is_leaf())
    node = x[nodes_[node].gene] <= nodes_[node].threshold ? nodes_[node].left : nodes_[node].right;
  return node;
}

namespace {

struct Split {
  std::uint32_t gene = TreeNode::kNone;
  double threshold = 0.0;
  double score = 0.0;  // sum over children of sum_c n_c^2 / n_child; larger is purer
};

// Better score wins; scores within `tie` of each other go to the lower gene,
// then the lower threshold.
bool better(const Split& a, const Split& b, double tie) {
  if (std::abs(a.score - b.score) > tie) return a.score > b.score;
  if (a.gene != b.gene) return a.gene < b.gene;
  return a.threshold < b.threshold;
}

double purity(double pos, double neg) {
  const double n = pos + neg;
  return n > 0.0 ? (pos * pos + neg * neg) / n : 0.0;
}

class Grower {
 public:
  Grower(const Dataset& train, std::size_t mtry, Rng& rng)
      : train_(train), mtry_(mtry), rng_(rng), genes_(train.n_genes()) {
    std::iota(genes_.begin(), genes_.end(), 0u);
  }

  DecisionTree grow(std::vector<std::size_t> samples) {
    samples_ = std::move(samples);
    column_.resize(samples_.size());
    build(0, samples_.size());
    return DecisionTree(std::move(nodes_));
  }

 private:
  // Grows the subtree for samples_[begin, end); children reorder that range
  // in place.
  std::uint32_t build(std::size_t begin, std::size_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    const std::size_t count = end - begin;
    std::size_t pos = 0;
    for (std::size_t i = begin; i < end; ++i) pos += train_.label(samples_[i]) == 1;
    const std::size_t neg = count - pos;
    nodes_[id].label = pos > neg ? Label{1} : Label{-1};
    if (pos == 0 || neg == 0 || count < 2) return id;

    const auto split = best_split(begin, end, static_cast<double>(pos), static_cast<double>(neg));
    if (split.gene == TreeNode::kNone) return id;

    const auto first = samples_.begin() + static_cast<std::ptrdiff_t>(begin);
    const auto last = samples_.begin() + static_cast<std::ptrdiff_t>(end);
    const auto mid = std::stable_partition(first, last, [&](std::size_t s) {
      return train_.value(s, split.gene) <= split.threshold;
    });
    const auto cut = static_cast<std::size_t>(mid - samples_.begin());
    nodes_[id].gene = split.gene;
    nodes_[id].threshold = split.threshold;
    const auto l = build(begin, cut);
    nodes_[id].left = l;
    const auto r = build(cut, end);
    nodes_[id].right = r;
    return id;
  }

  Split best_split(std::size_t begin, std::size_t end, double pos, double neg) {
    // Partial Fisher-Yates: the first mtry entries of genes_ are the sample.
    for (std::size_t k = 0; k < mtry_; ++k)
      std::swap(genes_[k], genes_[k + uniform_index(rng_, genes_.size() - k)]);

    const double parent = purity(pos, neg);
    const std::size_t count = end - begin;
    const double min_gain = 1e-12 * static_cast<double>(count);
    Split best;
    const auto column = std::span(column_).first(count);
    for (std::size_t k = 0; k < mtry_; ++k) {
      const auto g = genes_[k];
      for (std::size_t i = 0; i < count; ++i)
        column[i] = {train_.value(samples_[begin + i], g), train_.label(samples_[begin + i])};
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      double left_pos = 0.0;
      double left_neg = 0.0;
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        (column[i].second == 1 ? left_pos : left_neg) += 1.0;
        const double lo = column[i].first;
        const double hi = column[i + 1].first;
        if (lo == hi) continue;
        Split cand;
        cand.gene = g;
        cand.threshold = lo + (hi - lo) / 2.0;
        if (!(cand.threshold < hi)) cand.threshold = lo;
        cand.score = purity(left_pos, left_neg) + purity(pos - left_pos, neg - left_neg);
        if (cand.score <= parent + min_gain) continue;
        if (best.gene == TreeNode::kNone || better(cand, best, min_gain)) best = cand;
      }
    }
    return best;
  }

  const Dataset& train_;
  std::size_t mtry_;
  Rng& rng_;
  std::vector<std::uint32_t> genes_;
  std::vector<TreeNode> nodes_;
  std::vector<std::size_t> samples_;
  std::vector<std::pair<double, Label>> column_;
};

}  // namespace

DecisionTree tree_grow(const Dataset& train, std::span<const std::size_t> samples,
                       std::size_t mtry, Rng& rng) {
  if (samples.empty()) throw DataError("cannot grow a tree on zero samples");
  if (mtry < 1 || mtry > train.n_genes())
    throw ConfigError("mtry must lie in [1, " + std::to_string(train.n_genes()) + "]");
  return Grower(train, mtry, rng).grow({samples.begin(), samples.end()});
}

DecisionTree tree_grow(const Dataset& train, std::size_t mtry, Rng& rng) {
  std::vector<std::size_t> all(train.n_samples());
  std::iota(all.begin(), all.end(), 0);
  return tree_grow(train, all, mtry, rng);
}

std::size_t default_mtry(std::size_t n_genes) noexcept {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n_genes)));
  while (r * r > n_genes) --r;
  while ((r + 1) * (r + 1) <= n_genes) ++r;
  return std::max<std::size_t>(r, 1);
}

ForestModel forest_train(const Dataset& train, std::size_t n_trees, std::size_t mtry,
                         std::uint64_t seed, unsigned threads) {
  if (n_trees < 1) throw ConfigError("forest needs at least one tree");
  const std::size_t n = train.n_samples();
  ForestModel model;
  model.mtry = mtry;
  model.n_genes = train.n_genes();
  model.inbag.assign(n_trees, std::vector<std::uint32_t>(n, 0));
  std::vector<DecisionTree> trees(n_trees, DecisionTree({}));
  parallel_for(n_trees, threads, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<std::size_t> bag(n);
    for (auto& s : bag) {
      s = uniform_index(rng, n);
      ++model.inbag[t][s];
    }
    trees[t] = tree_grow(train, bag, mtry, rng);
  });
  model.trees = std::move(trees);
  return model;
}

Label forest_predict(const ForestModel& model, std::span<const double> x) {
  if (x.size() != model.n_genes)
    throw DataError("sample has " + std::to_string(x.size()) + " genes, forest expects " +
                    std::to_string(model.n_genes));
  long votes = 0;
  for (const auto& tree : model.trees) votes += tree.predict(x);
  return votes > 0 ? Label{1} : Label{-1};
}

OobResult oob_error(const ForestModel& model, const Dataset& train) {
  OobResult r;
  for (std::size_t i = 0; i < train.n_samples(); ++i) {
    long votes = 0;
    std::size_t voters = 0;
    for (std::size_t t = 0; t < model.n_trees(); ++t) {
      if (model.inbag[t][i] != 0) continue;
      votes += model.trees[t].predict(train.row(i));
      ++voters;
    }
    if (voters == 0) {
      ++r.skipped;
      continue;
    }
    ++r.voted;
    const Label vote = votes > 0 ? Label{1} : Label{-1};
    if (vote != train.label(i)) ++r.misvoted;
  }
  r.error = r.voted ? static_cast<double>(r.misvoted) / static_cast<double>(r.voted) : 0.0;
  return r;
}

}  // namespace bbofs
