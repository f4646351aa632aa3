#include "bbofs/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "bbofs/error.hpp"
#include "bbofs/simd/kernels.hpp"

namespace bbofs {

Json config_to_json(const BboConfig& bbo, const FitnessConfig& fit) {
  Json j;
  j["population"] = bbo.population;
  j["generations"] = bbo.generations;
  j["subset_size"] = bbo.subset_size;
  j["mutation_prob"] = bbo.mutation_prob;
  j["habitat_modification_prob"] = bbo.habitat_modification_prob;
  j["q0"] = bbo.q0;
  j["max_emigration"] = bbo.max_emigration;
  j["max_immigration"] = bbo.max_immigration;
  j["elite_count"] = bbo.elite_count;
  j["heuristic"] = bbo.use_heuristic;
  j["seed"] = bbo.seed;
  j["classifier"] = to_string(fit.classifier);
  j["folds"] = fit.folds;
  j["svm_cost"] = fit.svm_cost;
  j["svm_gamma"] = fit.svm_gamma;
  j["svm_tol"] = fit.svm_tol;
  j["rf_trees"] = fit.rf_trees;
  if (fit.rf_mtry) j["rf_mtry"] = *fit.rf_mtry; else j["rf_mtry"] = "auto-sqrt";
  j["fitness_seed"] = fit.seed;
  return j;
}

Json to_json(const RunReport& r) {
  Json j;
  j["config"] = config_to_json(r.bbo, r.fitness);
  Json trace = Json::array();
  for (std::size_t g = 0; g < r.trace.size(); ++g)
    trace.push_back({{"generation", g}, {"best_hsi", r.trace[g].best_hsi}, {"avg_hsi", r.trace[g].avg_hsi}});
  j["trace"] = std::move(trace);
  j["final"] = {{"genes", r.selected_ids}, {"gene_indices", r.selected}, {"hsi", r.final_hsi}};
  j["cache"] = {{"evaluations", r.evaluations}, {"hits", r.cache_hits}, {"failures", r.failures}};
  j["notes"] = r.notes;
  return j;
}

Json metadata_json(const RunReport& r) {
  return {{"wall_time_seconds", r.wall_time_seconds},
          {"simd", std::string(simd::isa_name(simd::active_isa()))},
          {"threads", r.fitness.threads}};
}

RunReport run_report_from_json(const Json& j) {
  RunReport r;
  try {
    const auto& c = j.at("config");
    r.bbo.population = c.at("population").get<std::size_t>();
    r.bbo.generations = c.at("generations").get<std::size_t>();
    r.bbo.subset_size = c.at("subset_size").get<std::size_t>();
    r.bbo.mutation_prob = c.at("mutation_prob").get<double>();
    r.bbo.habitat_modification_prob = c.at("habitat_modification_prob").get<double>();
    r.bbo.q0 = c.at("q0").get<double>();
    r.bbo.max_emigration = c.at("max_emigration").get<double>();
    r.bbo.max_immigration = c.at("max_immigration").get<double>();
    r.bbo.elite_count = c.at("elite_count").get<std::size_t>();
    r.bbo.use_heuristic = c.at("heuristic").get<bool>();
    r.bbo.seed = c.at("seed").get<std::uint64_t>();
    r.fitness.classifier = parse_classifier(c.at("classifier").get<std::string>());
    r.fitness.folds = c.at("folds").get<std::size_t>();
    r.fitness.svm_cost = c.at("svm_cost").get<double>();
    r.fitness.svm_gamma = c.at("svm_gamma").get<double>();
    r.fitness.svm_tol = c.at("svm_tol").get<double>();
    r.fitness.rf_trees = c.at("rf_trees").get<std::size_t>();
    if (c.at("rf_mtry").is_number()) r.fitness.rf_mtry = c.at("rf_mtry").get<std::size_t>();
    r.fitness.seed = c.at("fitness_seed").get<std::uint64_t>();
    for (const auto& t : j.at("trace"))
      r.trace.push_back({t.at("best_hsi").get<double>(), t.at("avg_hsi").get<double>()});
    const auto& f = j.at("final");
    r.selected_ids = f.at("genes").get<std::vector<std::string>>();
    r.selected = f.at("gene_indices").get<std::vector<GeneIndex>>();
    r.final_hsi = f.at("hsi").get<double>();
    if (j.contains("cache")) {
      r.evaluations = j["cache"].value("evaluations", std::size_t{0});
      r.cache_hits = j["cache"].value("hits", std::size_t{0});
      r.failures = j["cache"].value("failures", std::size_t{0});
    }
    if (j.contains("notes")) r.notes = j["notes"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed run report: ") + e.what());
  }
  return r;
}

void write_trace_csv(const RunReport& r, std::ostream& out) {
  out << "generation,best_hsi,avg_hsi\n";
  out.precision(17);
  for (std::size_t g = 0; g < r.trace.size(); ++g)
    out << g << ',' << r.trace[g].best_hsi << ',' << r.trace[g].avg_hsi << '\n';
}

RunAggregate aggregate(std::span<const RunReport> runs) {
  RunAggregate a;
  a.runs = runs.size();
  if (runs.empty()) return a;
  std::vector<double> hsi;
  std::map<std::string, std::size_t> freq;
  double size_sum = 0.0;
  std::size_t trace_len = runs.front().trace.size();
  for (const auto& r : runs) {
    hsi.push_back(r.final_hsi);
    size_sum += static_cast<double>(r.selected_ids.size());
    for (const auto& id : r.selected_ids) ++freq[id];
    trace_len = std::min(trace_len, r.trace.size());
  }
  a.mean_hsi = std::accumulate(hsi.begin(), hsi.end(), 0.0) / static_cast<double>(hsi.size());
  std::sort(hsi.begin(), hsi.end());
  const std::size_t mid = hsi.size() / 2;
  a.median_hsi = hsi.size() % 2 ? hsi[mid] : (hsi[mid - 1] + hsi[mid]) / 2.0;
  a.min_hsi = hsi.front();
  a.max_hsi = hsi.back();
  a.mean_subset_size = size_sum / static_cast<double>(runs.size());
  a.gene_frequency.assign(freq.begin(), freq.end());
  std::stable_sort(a.gene_frequency.begin(), a.gene_frequency.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  a.mean_avg_trace.assign(trace_len, 0.0);
  a.mean_best_trace.assign(trace_len, 0.0);
  for (const auto& r : runs) {
    for (std::size_t g = 0; g < trace_len; ++g) {
      a.mean_avg_trace[g] += r.trace[g].avg_hsi / static_cast<double>(runs.size());
      a.mean_best_trace[g] += r.trace[g].best_hsi / static_cast<double>(runs.size());
    }
  }
  return a;
}

Json to_json(const RunAggregate& a) {
  Json freq = Json::array();
  for (const auto& [id, n] : a.gene_frequency) freq.push_back({{"gene", id}, {"count", n}});
  return {{"runs", a.runs},
          {"mean_hsi", a.mean_hsi},
          {"median_hsi", a.median_hsi},
          {"max_hsi", a.max_hsi},
          {"min_hsi", a.min_hsi},
          {"mean_subset_size", a.mean_subset_size},
          {"gene_frequency", std::move(freq)},
          {"mean_avg_trace", a.mean_avg_trace},
          {"mean_best_trace", a.mean_best_trace}};
}

void write_merged_trace_csv(std::span<const RunReport> runs, std::span<const std::string> names,
                            std::ostream& out) {
  std::size_t len = 0;
  out << "generation";
  for (std::size_t k = 0; k < runs.size(); ++k) {
    out << ',' << names[k] << "_best," << names[k] << "_avg";
    len = std::max(len, runs[k].trace.size());
  }
  out << '\n';
  out.precision(17);
  for (std::size_t g = 0; g < len; ++g) {
    out << g;
    for (const auto& r : runs) {
      if (g < r.trace.size())
        out << ',' << r.trace[g].best_hsi << ',' << r.trace[g].avg_hsi;
      else
        out << ",,";
    }
    out << '\n';
  }
}

std::size_t generations_to_reach(const RunReport& run, double threshold) {
  for (std::size_t g = 0; g < run.trace.size(); ++g)
    if (run.trace[g].avg_hsi >= threshold) return g;
  return run.trace.size();
}

double sign_test_p_value(std::size_t successes, std::size_t n) {
  // Sum of C(n, k) / 2^n for k >= successes, in log space.
  double p = 0.0;
  for (std::size_t k = successes; k <= n; ++k) {
    const double log_term = std::lgamma(static_cast<double>(n) + 1.0) -
                            std::lgamma(static_cast<double>(k) + 1.0) -
                            std::lgamma(static_cast<double>(n - k) + 1.0) -
                            static_cast<double>(n) * std::log(2.0);
    p += std::exp(log_term);
  }
  return std::min(p, 1.0);
}

PairedConvergence compare_convergence(std::span<const RunReport> heuristic,
                                      std::span<const RunReport> simple) {
  PairedConvergence c;
  c.pairs = std::min(heuristic.size(), simple.size());
  for (std::size_t k = 0; k < c.pairs; ++k) {
    const double target = simple[k].trace.back().avg_hsi;
    const auto h = generations_to_reach(heuristic[k], target);
    const auto s = generations_to_reach(simple[k], target);
    if (h < s) ++c.heuristic_faster;
    else if (s < h) ++c.simple_faster;
    else ++c.ties;
  }
  c.p_value = sign_test_p_value(c.heuristic_faster, c.pairs);
  return c;
}

void write_ranking_csv(const GeneRanking& ranking, const Dataset& ds, std::ostream& out) {
  std::vector<GeneIndex> order(ranking.ig.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](GeneIndex a, GeneIndex b) { return ranking.ig[a] > ranking.ig[b]; });
  out << "gene_id,ig,rank\n";
  out.precision(17);
  for (std::size_t r = 0; r < order.size(); ++r)
    out << ds.gene_ids()[order[r]] << ',' << ranking.ig[order[r]] << ',' << (r + 1) << '\n';
}

GeneRanking read_ranking_csv(const std::filesystem::path& path, const Dataset& ds) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::unordered_map<std::string, GeneIndex> index;
  for (GeneIndex g = 0; g < ds.n_genes(); ++g) index.emplace(ds.gene_ids()[g], g);
  GeneRanking r;
  r.ig.assign(ds.n_genes(), 0.0);
  std::string line;
  std::getline(in, line);
  if (line.rfind("gene_id,ig", 0) != 0) throw DataError(path.string() + ": not a ranking CSV");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string id, ig;
    std::getline(fields, id, ',');
    std::getline(fields, ig, ',');
    const auto it = index.find(id);
    if (it == index.end())
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": unknown gene id '" + id + "'");
    try {
      r.ig[it->second] = std::stod(ig);
    } catch (const std::exception&) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad ig value '" + ig + "'");
    }
  }
  for (GeneIndex g = 0; g < ds.n_genes(); ++g)
    if (r.ig[g] > kInformativeTolerance) r.informative.push_back(g);
  std::stable_sort(r.informative.begin(), r.informative.end(),
                   [&](GeneIndex a, GeneIndex b) { return r.ig[a] > r.ig[b]; });
  for (const auto g : r.informative) r.total_informative_ig += r.ig[g];
  return r;
}

}  // namespace bbofs
