#pragma once

// Exhaustive CART checks: for every node of a grown tree, recompute the set of
// training samples that reach it and search all genes and all midpoint
// thresholds for the minimum weighted Gini impurity.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bbofs/data.hpp"
#include "bbofs/forest.hpp"

namespace bbofs::oracle {

struct OracleSplit {
  std::size_t gene = 0;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();  // weighted Gini
};

inline double gini(double pos, double neg) {
  const double n = pos + neg;
  if (n == 0.0) return 0.0;
  const double p = pos / n, q = neg / n;
  return 1.0 - p * p - q * q;
}

inline double node_gini(const Dataset& ds, const std::vector<std::size_t>& samples) {
  double pos = 0.0, neg = 0.0;
  for (auto s : samples) (ds.label(s) == 1 ? pos : neg) += 1.0;
  return gini(pos, neg);
}

/// All splits within `tie_tol` of the best impurity; the first entry is the
/// lowest (gene, threshold) among them.
inline std::vector<OracleSplit> best_splits(const Dataset& ds,
                                            const std::vector<std::size_t>& samples,
                                            double tie_tol = 1e-12) {
  std::vector<OracleSplit> all;
  const double n = static_cast<double>(samples.size());
  for (std::size_t g = 0; g < ds.n_genes(); ++g) {
    std::vector<double> v;
    for (auto s : samples) v.push_back(ds.value(s, g));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      double t = v[k] + (v[k + 1] - v[k]) / 2.0;
      if (!(t < v[k + 1])) t = v[k];
      double lp = 0, ln = 0, rp = 0, rn = 0;
      for (auto s : samples) {
        const bool left = ds.value(s, g) <= t;
        const bool pos = ds.label(s) == 1;
        (left ? (pos ? lp : ln) : (pos ? rp : rn)) += 1.0;
      }
      all.push_back({g, t, (lp + ln) / n * gini(lp, ln) + (rp + rn) / n * gini(rp, rn)});
    }
  }
  if (all.empty()) return {};
  double best = all.front().impurity;
  for (const auto& s : all) best = std::min(best, s.impurity);
  std::vector<OracleSplit> ties;
  for (const auto& s : all)
    if (s.impurity <= best + tie_tol) ties.push_back(s);
  std::sort(ties.begin(), ties.end(), [](const auto& a, const auto& b) {
    return a.gene != b.gene ? a.gene < b.gene : a.threshold < b.threshold;
  });
  return ties;
}

/// Empty string if every node of `tree` (grown with mtry = n_genes on
/// `samples`) agrees with exhaustive search; otherwise a description of the
/// first disagreement.
inline std::string check_tree_against_exhaustive(const Dataset& ds, const DecisionTree& tree,
                                                 const std::vector<std::size_t>& samples) {
  struct Item {
    std::uint32_t node;
    std::vector<std::size_t> samples;
  };
  std::vector<Item> stack{{0, samples}};
  while (!stack.empty()) {
    auto [id, here] = std::move(stack.back());
    stack.pop_back();
    const auto& node = tree.nodes()[id];
    const double parent = node_gini(ds, here);
    const auto ties = best_splits(ds, here);
    const bool splittable = here.size() >= 2 && parent > 0.0 && !ties.empty() &&
                            parent - ties.front().impurity > 1e-12;
    if (node.is_leaf()) {
      // Allow a near-zero decrease below the solver's gain threshold.
      if (splittable && parent - ties.front().impurity > 1e-9)
        return "node " + std::to_string(id) + " is a leaf but a split lowers impurity";
      continue;
    }
    if (!splittable) return "node " + std::to_string(id) + " split although no split helps";
    const auto& want = ties.front();
    if (node.gene != want.gene || node.threshold != want.threshold)
      return "node " + std::to_string(id) + " split on gene " + std::to_string(node.gene) + " at " +
             std::to_string(node.threshold) + ", exhaustive best is gene " +
             std::to_string(want.gene) + " at " + std::to_string(want.threshold);
    std::vector<std::size_t> left, right;
    for (auto s : here) (ds.value(s, node.gene) <= node.threshold ? left : right).push_back(s);
    stack.push_back({node.left, std::move(left)});
    stack.push_back({node.right, std::move(right)});
  }
  return {};
}

/// Straightforward double-loop OOB recount.
inline double recount_oob_error(const ForestModel& forest, const Dataset& ds,
                                std::size_t* voted_out = nullptr) {
  std::vector<int> plus(ds.n_samples(), 0), minus(ds.n_samples(), 0);
  for (std::size_t t = 0; t < forest.trees.size(); ++t)
    for (std::size_t i = 0; i < ds.n_samples(); ++i) {
      if (forest.inbag[t][i] > 0) continue;
      if (forest.trees[t].predict(ds.row(i)) == 1) ++plus[i]; else ++minus[i];
    }
  std::size_t voted = 0, wrong = 0;
  for (std::size_t i = 0; i < ds.n_samples(); ++i) {
    if (plus[i] + minus[i] == 0) continue;
    ++voted;
    const int vote = plus[i] > minus[i] ? 1 : -1;
    if (vote != ds.label(i)) ++wrong;
  }
  if (voted_out) *voted_out = voted;
  return voted ? static_cast<double>(wrong) / static_cast<double>(voted) : 0.0;
}

}  // namespace bbofs::oracle
