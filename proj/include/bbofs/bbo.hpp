#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bbofs/data.hpp"
#include "bbofs/fitness.hpp"
#include "bbofs/infogain.hpp"
#include "bbofs/rng.hpp"

namespace bbofs {

struct BboConfig {
  std::size_t population = 50;
  std::size_t generations = 25;
  std::size_t subset_size = 9;
  double mutation_prob = 0.70;              // per-SIV, scaled down for fitter habitats
  double habitat_modification_prob = 1.00;
  double q0 = 0.55;                         // exploitation probability
  double max_emigration = 1.0;              // E
  double max_immigration = 1.0;             // I
  std::size_t elite_count = 2;
  bool use_heuristic = true;
  std::uint64_t seed = 1;

  void validate(std::size_t n_genes) const;
};

/// A candidate gene subset. `hsi` is empty while stale.
struct Habitat {
  std::vector<GeneIndex> sivs;
  std::optional<double> hsi;

  bool contains(GeneIndex g) const noexcept;
};

struct Elite {
  std::vector<GeneIndex> sivs;
  double hsi = 0.0;
};

struct Ecosystem {
  std::vector<Habitat> habitats;
  std::size_t generation = 0;
  std::vector<Elite> elites;  // best distinct subsets seen so far, HSI non-increasing
  Rng rng;

  // Set by update_rates() from the HSIs at the start of a generation.
  std::vector<std::size_t> ranks;  // 0 = worst, n-1 = best
  std::vector<double> immigration;
  std::vector<double> emigration;
};

struct MigrationRates {
  double immigration;  // lambda
  double emigration;   // mu
};

/// Linear migration model: lambda = I (1 - k/n), mu = E k / n, for 0 <= k <= n.
MigrationRates rates(std::size_t k, std::size_t n, double max_emigration, double max_immigration);

/// Fitness ranks (0 = worst). Equal HSIs rank the lower habitat index higher.
/// Every habitat must have an HSI.
std::vector<std::size_t> fitness_ranks(std::span<const Habitat> habitats);

/// n random habitats of subset_size distinct genes each, HSIs unset. The
/// ecosystem's generator is seeded from cfg.seed.
Ecosystem init_ecosystem(const BboConfig& cfg, std::size_t n_genes);

/// Ranks habitats by HSI and stores per-habitat lambda/mu. The best habitat
/// gets k = n (lambda = 0) and the worst k = 0 (lambda = I), with the formula's
/// n taken as population - 1.
void update_rates(Ecosystem& eco, const BboConfig& cfg);

/// SIV sharing. Each habitat is a receiver with probability hmp * lambda_i;
/// a receiver scans every other habitat as a donor, accepting donor j with
/// probability mu_j. An accepted donor contributes one random SIV that
/// replaces a random SIV of the receiver; if it is already present the donor
/// is rescanned in random order for one that is not, and skipped if none is.
/// Donors are read from a snapshot taken before any replacement.
void migrate_with_rates(std::vector<Habitat>& habitats, std::span<const double> immigration,
                        std::span<const double> emigration, double habitat_modification_prob,
                        Rng& rng);
void migrate(Ecosystem& eco, const BboConfig& cfg);

/// Per-position mutation. Position j of habitat i mutates with probability
/// per_habitat_prob[i]. With the heuristic on, a mutation exploits (draws an
/// informative gene proportionally to IG) with probability q0 and otherwise
/// explores (uniform gene not in the habitat). Exploitation falls back to
/// exploration when the habitat already holds every informative gene.
void mutate_with_probabilities(std::vector<Habitat>& habitats,
                               std::span<const double> per_habitat_prob, double q0,
                               const GeneRanking* ranking, std::size_t n_genes, Rng& rng);
/// Uses mutation_prob * (1 - rank / (n - 1)) for each habitat.
void mutate(Ecosystem& eco, const BboConfig& cfg, const GeneRanking* ranking, std::size_t n_genes);

/// Folds the current habitats into the elite archive, then overwrites the
/// worst habitats with archived elites that are missing from the population.
void elitism(Ecosystem& eco, const BboConfig& cfg);

struct GenerationStats {
  double best_hsi = 0.0;
  double avg_hsi = 0.0;
};

struct RunReport {
  BboConfig bbo;
  FitnessConfig fitness;
  std::vector<GenerationStats> trace;  // initial population + one row per generation
  std::vector<GeneIndex> selected;
  std::vector<std::string> selected_ids;
  double final_hsi = 0.0;
  std::size_t evaluations = 0;
  std::size_t cache_hits = 0;
  std::size_t failures = 0;
  std::vector<std::string> notes;
  double wall_time_seconds = 0.0;  // metadata, excluded from the deterministic output
};

/// The full search loop. `ranking` must be non-null when cfg.use_heuristic.
RunReport run(const Dataset& ds, const BboConfig& cfg, const FitnessConfig& fit_cfg,
              const GeneRanking* ranking);
/// Same, reusing an evaluator (and its memo and folds).
RunReport run(FitnessEvaluator& evaluator, const BboConfig& cfg, const GeneRanking* ranking);

}  // namespace bbofs
