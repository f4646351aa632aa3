#pragma once

// Seeded synthetic datasets for tests.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "bbofs/data.hpp"

namespace bbofs::testing {

/// Balanced labels (+1 for even rows). Every gene is N(0, 1); planted genes
/// get `shift` added for the +1 class.
inline Dataset planted_dataset(std::size_t n_samples, std::size_t n_genes,
                               std::span<const GeneIndex> planted, double shift,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> values(n_samples * n_genes);
  std::vector<Label> labels(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    labels[s] = s % 2 == 0 ? Label{1} : Label{-1};
    for (std::size_t g = 0; g < n_genes; ++g) values[s * n_genes + g] = noise(rng);
    if (labels[s] == 1)
      for (const auto g : planted) values[s * n_genes + g] += shift;
  }
  return Dataset(n_samples, n_genes, std::move(values), std::move(labels));
}

/// Pure noise with a given class split (first n_pos rows are +1).
inline Dataset noise_dataset(std::size_t n_pos, std::size_t n_neg, std::size_t n_genes,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t n = n_pos + n_neg;
  std::vector<double> values(n * n_genes);
  for (auto& v : values) v = noise(rng);
  std::vector<Label> labels(n);
  for (std::size_t s = 0; s < n; ++s) labels[s] = s < n_pos ? Label{1} : Label{-1};
  return Dataset(n, n_genes, std::move(values), std::move(labels));
}

/// Subset-search benchmark: 60 samples (30/30), 40 genes, genes {5, 18, 31}
/// carry the class signal. Each planted gene is 0.3 y + N(0, 1) and samples
/// are redrawn until y * (sum of planted genes) >= 1, so the three together
/// separate the classes while each alone or in pairs is weak. Remaining genes
/// are N(0, 1) noise. With the default SVM fitness the trio is the only
/// 3-subset with cross-validated accuracy 1 (the runner-up scores 58/60).
inline constexpr std::uint64_t kPlantedTrioSeed = 20240601;
inline constexpr GeneIndex kPlantedTrio[3] = {5, 18, 31};

inline Dataset planted_trio_dataset(std::uint64_t seed = kPlantedTrioSeed) {
  constexpr std::size_t n = 60;
  constexpr std::size_t d = 40;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::normal_distribution<double> signal_noise(0.0, 1.0);
  std::vector<double> values(n * d);
  std::vector<Label> labels(n);
  for (std::size_t s = 0; s < n; ++s) {
    const Label y = s % 2 == 0 ? Label{1} : Label{-1};
    labels[s] = y;
    for (std::size_t g = 0; g < d; ++g) values[s * d + g] = noise(rng);
    for (;;) {
      double sum = 0.0;
      for (const auto g : kPlantedTrio) {
        values[s * d + g] = 0.3 * y + signal_noise(rng);
        sum += values[s * d + g];
      }
      if (y * sum >= 1.0) break;
    }
  }
  return Dataset(n, d, std::move(values), std::move(labels));
}

}  // namespace bbofs::testing
