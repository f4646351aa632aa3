#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "bbofs/data.hpp"

namespace bbofs {

enum class ClassifierKind { Svm, RandomForest };

std::string to_string(ClassifierKind kind);
ClassifierKind parse_classifier(const std::string& name);

struct FitnessConfig {
  ClassifierKind classifier = ClassifierKind::Svm;
  double svm_cost = 50.0;
  double svm_gamma = 0.02;
  double svm_tol = 1e-3;
  std::size_t folds = 10;
  std::size_t rf_trees = 500;
  std::optional<std::size_t> rf_mtry;  // nullopt: floor(sqrt(subset size))
  std::uint64_t seed = 1;
  unsigned threads = 1;  // habitats evaluated concurrently

  void validate() const;
};

struct HsiResult {
  double hsi = 0.0;
  std::vector<std::size_t> fold_correct;
  std::vector<std::size_t> fold_size;
  std::optional<std::string> diagnostic;  // set when a fold failed to train
};

/// Cross-validated accuracy of a gene subset, with the fold assignment fixed
/// at construction and a memo of subsets already scored.
///
/// HSI is a function of the gene *set*: genes are sorted before the dataset is
/// restricted, so any ordering of a habitat scores identically and the memo
/// (keyed by the sorted subset) never changes a returned value.
class FitnessEvaluator {
 public:
  FitnessEvaluator(const Dataset& ds, FitnessConfig cfg);
  FitnessEvaluator(const Dataset& ds, FitnessConfig cfg, FoldAssignment folds);

  const Dataset& dataset() const noexcept { return ds_; }
  const FitnessConfig& config() const noexcept { return cfg_; }
  const FoldAssignment& folds() const noexcept { return folds_; }

  /// Uncached evaluation with per-fold detail. Training failures give HSI 0
  /// and a diagnostic instead of throwing.
  HsiResult evaluate_detailed(std::span<const GeneIndex> genes) const;

  /// Memoized HSI.
  double evaluate(std::span<const GeneIndex> genes);

  /// HSI of each habitat. Distinct uncached subsets are scored on
  /// cfg.threads workers; the result does not depend on the thread count.
  std::vector<double> evaluate_population(const std::vector<std::vector<GeneIndex>>& habitats);

  struct Stats {
    std::size_t evaluations = 0;  // subsets actually scored
    std::size_t cache_hits = 0;
    std::size_t failures = 0;
  };
  Stats stats() const;

 private:
  using Key = std::vector<GeneIndex>;
  static Key key_of(std::span<const GeneIndex> genes);
  double score(const Key& sorted_genes);

  const Dataset& ds_;
  FitnessConfig cfg_;
  FoldAssignment folds_;
  mutable std::shared_mutex mutex_;
  std::map<Key, double> cache_;
  Stats stats_;
};

/// One-off HSI: folds drawn from cfg.seed, no memo.
double evaluate_hsi(const Dataset& ds, std::span<const GeneIndex> genes, const FitnessConfig& cfg);

/// One-off population evaluation sharing one fold assignment.
std::vector<double> evaluate_population(const Dataset& ds,
                                        const std::vector<std::vector<GeneIndex>>& habitats,
                                        const FitnessConfig& cfg);

}  // namespace bbofs
