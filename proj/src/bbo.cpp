#include "bbofs/bbo.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <unordered_set>

#include "bbofs/error.hpp"

namespace bbofs {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::vector<GeneIndex> sorted(std::vector<GeneIndex> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Uniform gene in [0, n_genes) that the habitat does not contain.
std::optional<GeneIndex> uniform_non_member(const Habitat& h, std::size_t n_genes, Rng& rng) {
  const std::size_t m = h.sivs.size();
  if (m >= n_genes) return std::nullopt;
  if (2 * m <= n_genes) {
    for (;;) {
      const auto g = uniform_index(rng, n_genes);
      if (!h.contains(g)) return g;
    }
  }
  std::vector<bool> member(n_genes, false);
  for (const auto g : h.sivs) member[g] = true;
  std::vector<GeneIndex> rest;
  rest.reserve(n_genes - m);
  for (GeneIndex g = 0; g < n_genes; ++g)
    if (!member[g]) rest.push_back(g);
  return rest[uniform_index(rng, rest.size())];
}

}  // namespace

void BboConfig::validate(std::size_t n_genes) const {
  if (population < 2) throw ConfigError("population must be at least 2");
  if (subset_size < 1) throw ConfigError("subset size must be at least 1");
  if (subset_size > n_genes)
    throw ConfigError("subset size " + std::to_string(subset_size) + " exceeds gene count " +
                      std::to_string(n_genes));
  if (elite_count < 1 || elite_count >= population)
    throw ConfigError("elite count must lie in [1, population)");
  if (!is_probability(mutation_prob) || !is_probability(habitat_modification_prob) ||
      !is_probability(q0))
    throw ConfigError("probabilities must lie in [0, 1]");
  if (!is_probability(max_emigration) || !is_probability(max_immigration))
    throw ConfigError("maximum migration rates must lie in [0, 1]");
}

bool Habitat::contains(GeneIndex g) const noexcept {
  return std::find(sivs.begin(), sivs.end(), g) != sivs.end();
}

MigrationRates rates(std::size_t k, std::size_t n, double max_emigration, double max_immigration) {
  const double frac = static_cast<double>(k) / static_cast<double>(n);
  return {max_immigration * (1.0 - frac), max_emigration * frac};
}

std::vector<std::size_t> fitness_ranks(std::span<const Habitat> habitats) {
  const std::size_t n = habitats.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Worst first; among equals the higher index comes first.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ha = habitats[a].hsi.value();
    const double hb = habitats[b].hsi.value();
    if (ha != hb) return ha < hb;
    return a > b;
  });
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;
  return rank;
}

Ecosystem init_ecosystem(const BboConfig& cfg, std::size_t n_genes) {
  cfg.validate(n_genes);
  Ecosystem eco;
  eco.rng.seed(derive_seed(cfg.seed, 0xB0));
  std::vector<GeneIndex> pool(n_genes);
  std::iota(pool.begin(), pool.end(), 0);
  eco.habitats.reserve(cfg.population);
  for (std::size_t i = 0; i < cfg.population; ++i) {
    // Partial Fisher-Yates over a persistent pool: uniform m-subset.
    for (std::size_t k = 0; k < cfg.subset_size; ++k)
      std::swap(pool[k], pool[k + uniform_index(eco.rng, n_genes - k)]);
    eco.habitats.push_back({{pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(cfg.subset_size)}, {}});
  }
  return eco;
}

void update_rates(Ecosystem& eco, const BboConfig& cfg) {
  const std::size_t n = eco.habitats.size();
  eco.ranks = fitness_ranks(eco.habitats);
  eco.immigration.resize(n);
  eco.emigration.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = rates(eco.ranks[i], n - 1, cfg.max_emigration, cfg.max_immigration);
    eco.immigration[i] = r.immigration;
    eco.emigration[i] = r.emigration;
  }
}

void migrate_with_rates(std::vector<Habitat>& habitats, std::span<const double> immigration,
                        std::span<const double> emigration, double habitat_modification_prob,
                        Rng& rng) {
  std::vector<std::vector<GeneIndex>> donors;
  donors.reserve(habitats.size());
  for (const auto& h : habitats) donors.push_back(h.sivs);

  std::vector<std::size_t> scan;
  for (std::size_t i = 0; i < habitats.size(); ++i) {
    Habitat& receiver = habitats[i];
    if (!(uniform01(rng) < habitat_modification_prob)) continue;
    if (!(uniform01(rng) < immigration[i])) continue;
    for (std::size_t j = 0; j < donors.size(); ++j) {
      if (j == i) continue;
      if (!(uniform01(rng) < emigration[j])) continue;
      const auto& donor = donors[j];
      GeneIndex sigma = donor[uniform_index(rng, donor.size())];
      if (receiver.contains(sigma)) {
        scan.resize(donor.size());
        std::iota(scan.begin(), scan.end(), 0);
        std::shuffle(scan.begin(), scan.end(), rng);
        const auto it = std::find_if(scan.begin(), scan.end(),
                                     [&](std::size_t p) { return !receiver.contains(donor[p]); });
        if (it == scan.end()) continue;
        sigma = donor[*it];
      }
      receiver.sivs[uniform_index(rng, receiver.sivs.size())] = sigma;
      receiver.hsi.reset();
    }
  }
}

void migrate(Ecosystem& eco, const BboConfig& cfg) {
  if (eco.immigration.size() != eco.habitats.size()) update_rates(eco, cfg);
  migrate_with_rates(eco.habitats, eco.immigration, eco.emigration, cfg.habitat_modification_prob,
                     eco.rng);
}

void mutate_with_probabilities(std::vector<Habitat>& habitats,
                               std::span<const double> per_habitat_prob, double q0,
                               const GeneRanking* ranking, std::size_t n_genes, Rng& rng) {
  for (std::size_t i = 0; i < habitats.size(); ++i) {
    Habitat& h = habitats[i];
    for (std::size_t j = 0; j < h.sivs.size(); ++j) {
      if (!(uniform01(rng) < per_habitat_prob[i])) continue;
      std::optional<GeneIndex> replacement;
      if (ranking && uniform01(rng) < q0) replacement = sample_informative(*ranking, h.sivs, rng);
      if (!replacement) replacement = uniform_non_member(h, n_genes, rng);
      if (!replacement) continue;
      h.sivs[j] = *replacement;
      h.hsi.reset();
    }
  }
}

void mutate(Ecosystem& eco, const BboConfig& cfg, const GeneRanking* ranking, std::size_t n_genes) {
  if (eco.ranks.size() != eco.habitats.size()) update_rates(eco, cfg);
  const std::size_t n = eco.habitats.size();
  std::vector<double> prob(n);
  for (std::size_t i = 0; i < n; ++i)
    prob[i] = cfg.mutation_prob *
              (1.0 - static_cast<double>(eco.ranks[i]) / static_cast<double>(n - 1));
  mutate_with_probabilities(eco.habitats, prob, cfg.q0, cfg.use_heuristic ? ranking : nullptr,
                            n_genes, eco.rng);
}

void elitism(Ecosystem& eco, const BboConfig& cfg) {
  auto& archive = eco.elites;
  for (const auto& h : eco.habitats) {
    const double hsi = h.hsi.value();
    const auto key = sorted(h.sivs);
    const bool known = std::any_of(archive.begin(), archive.end(),
                                   [&](const Elite& e) { return sorted(e.sivs) == key; });
    if (known) continue;
    if (archive.size() >= cfg.elite_count && !(hsi > archive.back().hsi)) continue;
    // Insert after every elite at least as good: earlier finds keep priority.
    const auto pos = std::find_if(archive.begin(), archive.end(),
                                  [&](const Elite& e) { return e.hsi < hsi; });
    archive.insert(pos, Elite{h.sivs, hsi});
    if (archive.size() > cfg.elite_count) archive.pop_back();
  }

  // Habitats already holding an elite subset are never overwritten.
  std::vector<std::vector<GeneIndex>> elite_keys;
  for (const auto& e : archive) elite_keys.push_back(sorted(e.sivs));
  std::vector<bool> is_elite(eco.habitats.size());
  std::vector<bool> present(archive.size(), false);
  for (std::size_t i = 0; i < eco.habitats.size(); ++i) {
    const auto key = sorted(eco.habitats[i].sivs);
    for (std::size_t e = 0; e < elite_keys.size(); ++e) {
      if (elite_keys[e] != key) continue;
      is_elite[i] = true;
      present[e] = true;
    }
  }
  const auto ranks = fitness_ranks(eco.habitats);
  std::vector<std::size_t> worst_first(eco.habitats.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) worst_first[ranks[i]] = i;
  std::size_t next = 0;
  for (std::size_t e = 0; e < archive.size(); ++e) {
    if (present[e]) continue;
    while (is_elite[worst_first[next]]) ++next;
    auto& victim = eco.habitats[worst_first[next]];
    is_elite[worst_first[next]] = true;
    victim.sivs = archive[e].sivs;
    victim.hsi = archive[e].hsi;
  }
}

namespace {

void evaluate_stale(Ecosystem& eco, FitnessEvaluator& evaluator) {
  std::vector<std::size_t> stale;
  std::vector<std::vector<GeneIndex>> subsets;
  for (std::size_t i = 0; i < eco.habitats.size(); ++i) {
    if (eco.habitats[i].hsi) continue;
    stale.push_back(i);
    subsets.push_back(eco.habitats[i].sivs);
  }
  const auto hsi = evaluator.evaluate_population(subsets);
  for (std::size_t k = 0; k < stale.size(); ++k) eco.habitats[stale[k]].hsi = hsi[k];
}

GenerationStats population_stats(const Ecosystem& eco) {
  GenerationStats s;
  double sum = 0.0;
  for (const auto& h : eco.habitats) {
    s.best_hsi = std::max(s.best_hsi, *h.hsi);
    sum += *h.hsi;
  }
  s.avg_hsi = sum / static_cast<double>(eco.habitats.size());
  return s;
}

}  // namespace

RunReport run(FitnessEvaluator& evaluator, const BboConfig& cfg, const GeneRanking* ranking) {
  const auto start = std::chrono::steady_clock::now();
  const Dataset& ds = evaluator.dataset();
  cfg.validate(ds.n_genes());
  if (cfg.use_heuristic && !ranking)
    throw ConfigError("heuristic mutation needs a gene ranking");
  const auto before = evaluator.stats();

  Ecosystem eco = init_ecosystem(cfg, ds.n_genes());
  RunReport report;
  report.bbo = cfg;
  report.fitness = evaluator.config();

  evaluate_stale(eco, evaluator);
  elitism(eco, cfg);
  report.trace.push_back(population_stats(eco));
  for (std::size_t g = 0; g < cfg.generations; ++g) {
    update_rates(eco, cfg);
    migrate(eco, cfg);
    mutate(eco, cfg, ranking, ds.n_genes());
    evaluate_stale(eco, evaluator);
    elitism(eco, cfg);
    ++eco.generation;
    report.trace.push_back(population_stats(eco));
  }

  const Elite& best = eco.elites.front();
  report.selected = best.sivs;
  for (const auto g : best.sivs) report.selected_ids.push_back(ds.gene_ids()[g]);
  report.final_hsi = best.hsi;
  const auto after = evaluator.stats();
  report.evaluations = after.evaluations - before.evaluations;
  report.cache_hits = after.cache_hits - before.cache_hits;
  report.failures = after.failures - before.failures;
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

RunReport run(const Dataset& ds, const BboConfig& cfg, const FitnessConfig& fit_cfg,
              const GeneRanking* ranking) {
  FitnessEvaluator evaluator(ds, fit_cfg);
  return run(evaluator, cfg, ranking);
}

}  // namespace bbofs
