#include "bbofs/infogain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bbofs/parallel.hpp"

namespace bbofs {

namespace {

// Entropy (bits) of a two-class count pair.
double entropy2(std::size_t a, std::size_t b) {
  const double n = static_cast<double>(a + b);
  if (a == 0 || b == 0) return 0.0;
  const double pa = static_cast<double>(a) / n;
  const double pb = static_cast<double>(b) / n;
  return -(pa * std::log2(pa) + pb * std::log2(pb));
}

}  // namespace

double label_entropy(std::span<const Label> labels) {
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label{1}));
  return entropy2(pos, labels.size() - pos);
}

double label_entropy(const Dataset& ds) { return label_entropy(ds.labels()); }

double gene_information_gain(const Dataset& ds, GeneIndex g) {
  const std::size_t n = ds.n_samples();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ds.value(a, g) < ds.value(b, g);
  });
  const std::size_t total_pos = ds.count(1);
  const std::size_t total_neg = n - total_pos;
  const double h = entropy2(total_pos, total_neg);

  double best_conditional = h;
  std::size_t left_pos = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (ds.label(order[i]) == 1) ++left_pos;
    // Only cut between distinct values.
    if (ds.value(order[i], g) == ds.value(order[i + 1], g)) continue;
    const std::size_t left = i + 1;
    const std::size_t right = n - left;
    const double cond = (static_cast<double>(left) * entropy2(left_pos, left - left_pos) +
                         static_cast<double>(right) *
                             entropy2(total_pos - left_pos, right - (total_pos - left_pos))) /
                        static_cast<double>(n);
    best_conditional = std::min(best_conditional, cond);
  }
  return std::clamp(h - best_conditional, 0.0, h);
}

GeneRanking rank_genes(const Dataset& ds, unsigned threads) {
  GeneRanking r;
  r.ig.resize(ds.n_genes());
  parallel_for(ds.n_genes(), threads, [&](std::size_t g) { r.ig[g] = gene_information_gain(ds, g); });
  for (GeneIndex g = 0; g < ds.n_genes(); ++g)
    if (r.ig[g] > kInformativeTolerance) r.informative.push_back(g);
  std::stable_sort(r.informative.begin(), r.informative.end(),
                   [&](GeneIndex a, GeneIndex b) { return r.ig[a] > r.ig[b]; });
  for (const auto g : r.informative) r.total_informative_ig += r.ig[g];
  return r;
}

std::optional<GeneIndex> sample_informative(const GeneRanking& ranking,
                                            std::span<const GeneIndex> exclude, Rng& rng) {
  auto excluded = [&](GeneIndex g) {
    return std::find(exclude.begin(), exclude.end(), g) != exclude.end();
  };
  double total = 0.0;
  for (const auto g : ranking.informative)
    if (!excluded(g)) total += ranking.ig[g];
  if (total <= 0.0) return std::nullopt;
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  std::optional<GeneIndex> last;
  for (const auto g : ranking.informative) {
    if (excluded(g)) continue;
    acc += ranking.ig[g];
    last = g;
    if (target < acc) return g;
  }
  return last;  // rounding at the top end
}

}  // namespace bbofs
