#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bbofs/data.hpp"
#include "bbofs/rng.hpp"

namespace bbofs {

/// IG above this counts as informative.
inline constexpr double kInformativeTolerance = 1e-9;

struct GeneRanking {
  std::vector<double> ig;                 // bits, one per gene
  std::vector<GeneIndex> informative;     // ig > tolerance, ig descending, index ascending on ties
  double total_informative_ig = 0.0;
};

/// Binary label entropy in bits.
double label_entropy(std::span<const Label> labels);
double label_entropy(const Dataset& ds);

/// Information gain of the best single threshold split on gene g. Thresholds
/// are midpoints between consecutive distinct values, so the result depends
/// only on the ordering of the gene's values. Clamped to [0, H(class)].
double gene_information_gain(const Dataset& ds, GeneIndex g);

/// Scores every gene; `threads` workers share the columns.
GeneRanking rank_genes(const Dataset& ds, unsigned threads = 1);

/// Draws one informative gene outside `exclude` with probability proportional
/// to its IG. Returns nullopt when every informative gene is excluded; the
/// caller then falls back to uniform exploration.
std::optional<GeneIndex> sample_informative(const GeneRanking& ranking,
                                            std::span<const GeneIndex> exclude, Rng& rng);

}  // namespace bbofs
