#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bbofs {

using Label = std::int8_t;  // +1 or -1
using GeneIndex = std::size_t;

/// Dense expression matrix (samples x genes, row-major) with binary labels.
///
/// Immutable after construction. The constructor enforces shape, finite
/// values, labels in {+1, -1} and unique gene identifiers. Class balance is
/// checked where it matters: loaders require both classes to be present and
/// fold construction requires at least two samples per class.
class Dataset {
 public:
  Dataset(std::size_t n_samples, std::size_t n_genes, std::vector<double> values,
          std::vector<Label> labels, std::vector<std::string> gene_ids = {});

  std::size_t n_samples() const noexcept { return n_samples_; }
  std::size_t n_genes() const noexcept { return n_genes_; }

  std::span<const double> row(std::size_t sample) const noexcept {
    return {values_.data() + sample * n_genes_, n_genes_};
  }
  double value(std::size_t sample, GeneIndex gene) const noexcept {
    return values_[sample * n_genes_ + gene];
  }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const Label> labels() const noexcept { return labels_; }
  Label label(std::size_t sample) const noexcept { return labels_[sample]; }
  const std::vector<std::string>& gene_ids() const noexcept { return gene_ids_; }

  /// Number of samples labelled +1 / -1.
  std::size_t count(Label cls) const noexcept;

  /// Copy of the samples at the given row indices, in that order.
  Dataset rows(std::span<const std::size_t> samples) const;

 private:

  std::size_t n_samples_;
  std::size_t n_genes_;
  std::vector<double> values_;
  std::vector<Label> labels_;
  std::vector<std::string> gene_ids_;
};

/// Reads libsvm text (`label idx:val ...`, 1-based increasing indices).
/// Missing entries are 0.0. The numerically smaller label maps to -1.
/// `n_genes_hint` widens the matrix past the largest index observed.
/// Gene ids are the 1-based feature indices as text.
Dataset load_libsvm(const std::filesystem::path& path,
                    std::optional<std::size_t> n_genes_hint = std::nullopt);

/// Reads a CSV with a header row. The lexicographically smaller class string
/// maps to -1. Gene ids come from the header.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column);

/// Writes libsvm text with full double precision; zero entries are omitted.
void write_libsvm(const Dataset& ds, const std::filesystem::path& path);

/// Stacks two datasets with identical gene columns (e.g. a train/test split
/// of the same source).
Dataset concat(const Dataset& a, const Dataset& b);

/// Projects the dataset onto the given columns, in the given order.
Dataset restrict(const Dataset& ds, std::span<const GeneIndex> genes);

struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> fold_of;

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Stratified k-fold assignment. If a class has fewer than k samples, k drops
/// to the smallest class count (a warning is written to stderr).
FoldAssignment stratified_folds(const Dataset& ds, std::size_t k, std::uint64_t seed);

}  // namespace bbofs
