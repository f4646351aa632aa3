#include "bbofs/fitness.hpp"

#include <algorithm>
#include <iostream>
#include <mutex>

#include "bbofs/error.hpp"
#include "bbofs/forest.hpp"
#include "bbofs/parallel.hpp"
#include "bbofs/rng.hpp"
#include "bbofs/svm.hpp"

namespace bbofs {

std::string to_string(ClassifierKind kind) {
  return kind == ClassifierKind::Svm ? "svm" : "rf";
}

ClassifierKind parse_classifier(const std::string& name) {
  if (name == "svm") return ClassifierKind::Svm;
  if (name == "rf") return ClassifierKind::RandomForest;
  throw ConfigError("unknown classifier '" + name + "' (expected svm or rf)");
}

void FitnessConfig::validate() const {
  if (folds < 2) throw ConfigError("folds must be at least 2");
  if (!(svm_cost > 0.0)) throw ConfigError("svm cost must be positive");
  if (!(svm_gamma > 0.0)) throw ConfigError("svm gamma must be positive");
  if (!(svm_tol > 0.0)) throw ConfigError("svm tolerance must be positive");
  if (rf_trees < 1) throw ConfigError("forest needs at least one tree");
  if (rf_mtry && *rf_mtry < 1) throw ConfigError("mtry must be at least 1");
}

FitnessEvaluator::FitnessEvaluator(const Dataset& ds, FitnessConfig cfg)
    : FitnessEvaluator(ds, cfg, stratified_folds(ds, cfg.folds, cfg.seed)) {}

FitnessEvaluator::FitnessEvaluator(const Dataset& ds, FitnessConfig cfg, FoldAssignment folds)
    : ds_(ds), cfg_(std::move(cfg)), folds_(std::move(folds)) {
  cfg_.validate();
  if (folds_.fold_of.size() != ds_.n_samples())
    throw ConfigError("fold assignment does not cover the dataset");
}

FitnessEvaluator::Key FitnessEvaluator::key_of(std::span<const GeneIndex> genes) {
  Key k(genes.begin(), genes.end());
  std::sort(k.begin(), k.end());
  return k;
}

HsiResult FitnessEvaluator::evaluate_detailed(std::span<const GeneIndex> genes) const {
  if (genes.empty()) throw DataError("cannot evaluate an empty gene subset");
  const auto sorted = key_of(genes);
  const Dataset sub = restrict(ds_, sorted);
  HsiResult result;
  result.fold_correct.assign(folds_.k, 0);
  result.fold_size.assign(folds_.k, 0);
  std::size_t correct = 0;
  try {
    for (std::size_t f = 0; f < folds_.k; ++f) {
      const auto train_idx = folds_.train_indices(f);
      const auto test_idx = folds_.test_indices(f);
      const Dataset train = sub.rows(train_idx);
      std::size_t fold_correct = 0;
      if (cfg_.classifier == ClassifierKind::Svm) {
        const auto model = svm_train(
            train, SvmParams{.cost = cfg_.svm_cost, .gamma = cfg_.svm_gamma, .tol = cfg_.svm_tol});
        for (const auto s : test_idx) fold_correct += svm_predict(model, sub.row(s)) == sub.label(s);
      } else {
        const auto mtry = std::min(cfg_.rf_mtry.value_or(default_mtry(sub.n_genes())), sub.n_genes());
        const auto model = forest_train(train, cfg_.rf_trees, mtry, derive_seed(cfg_.seed, 1000 + f));
        for (const auto s : test_idx)
          fold_correct += forest_predict(model, sub.row(s)) == sub.label(s);
      }
      result.fold_correct[f] = fold_correct;
      result.fold_size[f] = test_idx.size();
      correct += fold_correct;
    }
  } catch (const ConvergenceError& e) {
    result.hsi = 0.0;
    result.diagnostic = e.what();
    return result;
  }
  result.hsi = static_cast<double>(correct) / static_cast<double>(ds_.n_samples());
  return result;
}

double FitnessEvaluator::score(const Key& sorted_genes) {
  const auto r = evaluate_detailed(sorted_genes);
  if (r.diagnostic) {
    std::cerr << "warning: HSI set to 0 for a habitat: " << *r.diagnostic << "\n";
    std::unique_lock lock(mutex_);
    ++stats_.failures;
  }
  return r.hsi;
}

double FitnessEvaluator::evaluate(std::span<const GeneIndex> genes) {
  auto key = key_of(genes);
  {
    std::shared_lock lock(mutex_);
    if (const auto it = cache_.find(key); it != cache_.end()) {
      lock.unlock();
      std::unique_lock w(mutex_);
      ++stats_.cache_hits;
      return it->second;
    }
  }
  const double hsi = score(key);
  std::unique_lock lock(mutex_);
  ++stats_.evaluations;
  cache_.emplace(std::move(key), hsi);
  return hsi;
}

std::vector<double> FitnessEvaluator::evaluate_population(
    const std::vector<std::vector<GeneIndex>>& habitats) {
  std::vector<Key> keys;
  keys.reserve(habitats.size());
  for (const auto& h : habitats) keys.push_back(key_of(h));

  // Distinct subsets not yet cached, in first-appearance order.
  std::vector<Key> todo;
  {
    std::shared_lock lock(mutex_);
    std::map<Key, bool> pending;
    for (const auto& k : keys)
      if (!cache_.contains(k) && pending.emplace(k, true).second) todo.push_back(k);
  }
  std::vector<double> scored(todo.size());
  parallel_for(todo.size(), cfg_.threads, [&](std::size_t i) { scored[i] = score(todo[i]); });

  std::unique_lock lock(mutex_);
  for (std::size_t i = 0; i < todo.size(); ++i) cache_.emplace(todo[i], scored[i]);
  stats_.evaluations += todo.size();
  stats_.cache_hits += keys.size() - todo.size();
  std::vector<double> out;
  out.reserve(keys.size());
  for (const auto& k : keys) out.push_back(cache_.at(k));
  return out;
}

FitnessEvaluator::Stats FitnessEvaluator::stats() const {
  std::shared_lock lock(mutex_);
  return stats_;
}

double evaluate_hsi(const Dataset& ds, std::span<const GeneIndex> genes, const FitnessConfig& cfg) {
  return FitnessEvaluator(ds, cfg).evaluate_detailed(genes).hsi;
}

std::vector<double> evaluate_population(const Dataset& ds,
                                        const std::vector<std::vector<GeneIndex>>& habitats,
                                        const FitnessConfig& cfg) {
  return FitnessEvaluator(ds, cfg).evaluate_population(habitats);
}

}  // namespace bbofs
