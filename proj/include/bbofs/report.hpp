#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bbofs/bbo.hpp"
#include "bbofs/infogain.hpp"

namespace bbofs {

using Json = nlohmann::ordered_json;

Json config_to_json(const BboConfig& bbo, const FitnessConfig& fit);

/// Deterministic part of a run: config echo, trace, final subset, counters.
/// Wall time is left out so identical runs serialize identically.
Json to_json(const RunReport& report);
/// Timing and environment details that vary between identical runs.
Json metadata_json(const RunReport& report);
RunReport run_report_from_json(const Json& j);

/// generation,best_hsi,avg_hsi
void write_trace_csv(const RunReport& report, std::ostream& out);

struct RunAggregate {
  std::size_t runs = 0;
  double mean_hsi = 0.0;
  double median_hsi = 0.0;
  double max_hsi = 0.0;
  double min_hsi = 0.0;
  double mean_subset_size = 0.0;
  std::vector<std::pair<std::string, std::size_t>> gene_frequency;  // count desc, id asc
  std::vector<double> mean_avg_trace;   // per generation, mean over runs of avg_hsi
  std::vector<double> mean_best_trace;
};

RunAggregate aggregate(std::span<const RunReport> runs);
Json to_json(const RunAggregate& agg);

/// One row per generation, a best/avg column pair per run.
void write_merged_trace_csv(std::span<const RunReport> runs, std::span<const std::string> names,
                            std::ostream& out);

/// First generation whose population-average HSI reaches `threshold`;
/// trace.size() if it never does.
std::size_t generations_to_reach(const RunReport& run, double threshold);

struct PairedConvergence {
  std::size_t pairs = 0;
  std::size_t heuristic_faster = 0;  // strictly fewer generations
  std::size_t simple_faster = 0;
  std::size_t ties = 0;
  double p_value = 1.0;              // one-sided sign test, ties counted against
};

/// For each (heuristic, simple) pair: the threshold is the simple run's final
/// population-average HSI; compares generations needed to reach it.
PairedConvergence compare_convergence(std::span<const RunReport> heuristic,
                                      std::span<const RunReport> simple);

/// P(X >= successes) for X ~ Binomial(n, 1/2).
double sign_test_p_value(std::size_t successes, std::size_t n);

/// gene_id,ig,rank sorted by IG descending (ties by gene index), rank 1-based.
void write_ranking_csv(const GeneRanking& ranking, const Dataset& ds, std::ostream& out);
/// Reads a ranking written by write_ranking_csv, matching gene ids to `ds`.
GeneRanking read_ranking_csv(const std::filesystem::path& path, const Dataset& ds);

}  // namespace bbofs
