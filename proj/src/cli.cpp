#include "bbofs/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "bbofs/bbo.hpp"
#include "bbofs/error.hpp"
#include "bbofs/forest.hpp"
#include "bbofs/infogain.hpp"
#include "bbofs/report.hpp"

namespace bbofs::cli {

namespace fs = std::filesystem;

namespace {

struct DataOptions {
  std::vector<std::string> paths;
  std::string format = "auto";
  std::string label_column = "label";
  std::optional<std::size_t> n_genes;

  void add_to(CLI::App& app, const std::string& width_flag) {
    app.add_option("--data", paths, "Dataset file(s); several files are stacked row-wise")
        ->required();
    app.add_option("--format", format, "auto, libsvm or csv")
        ->check(CLI::IsMember({"auto", "libsvm", "csv"}));
    app.add_option("--label-column", label_column, "Label column name for CSV input");
    app.add_option(width_flag, n_genes, "Gene count for libsvm input whose trailing genes are all zero");
  }
};

// Relative paths that do not exist are retried under $BBOFS_DATA_DIR.
fs::path resolve(const std::string& name) {
  fs::path p(name);
  if (fs::exists(p) || p.is_absolute()) return p;
  if (const char* dir = std::getenv("BBOFS_DATA_DIR")) {
    const auto alt = fs::path(dir) / p;
    if (fs::exists(alt)) return alt;
  }
  return p;
}

Dataset load_one(const DataOptions& opt, const std::string& name) {
  const auto path = resolve(name);
  if (!fs::exists(path)) throw DataError("no such file: " + name);
  const bool csv = opt.format == "csv" || (opt.format == "auto" && path.extension() == ".csv");
  return csv ? load_csv(path, opt.label_column) : load_libsvm(path, opt.n_genes);
}

Dataset load(const DataOptions& opt) {
  Dataset ds = load_one(opt, opt.paths.front());
  for (std::size_t k = 1; k < opt.paths.size(); ++k) ds = concat(ds, load_one(opt, opt.paths[k]));
  return ds;
}

struct FitnessOptions {
  std::string classifier = "svm";
  FitnessConfig cfg;
  std::optional<std::size_t> mtry;

  void add_to(CLI::App& app) {
    app.add_option("--classifier", classifier, "svm or rf")->check(CLI::IsMember({"svm", "rf"}));
    app.add_option("--folds", cfg.folds, "Cross-validation folds")->capture_default_str();
    app.add_option("--cost", cfg.svm_cost, "SVM box constraint C")->capture_default_str();
    app.add_option("--gamma", cfg.svm_gamma, "RBF kernel width")->capture_default_str();
    app.add_option("--svm-tol", cfg.svm_tol, "SMO stopping tolerance")->capture_default_str();
    app.add_option("--trees", cfg.rf_trees, "Trees per forest")->capture_default_str();
    app.add_option("--mtry", mtry, "Genes tried per split (default floor(sqrt(m)))");
    app.add_option("--threads", cfg.threads, "Concurrent fitness evaluations (0 = all cores)")
        ->capture_default_str();
  }

  FitnessConfig build(std::uint64_t seed) const {
    FitnessConfig c = cfg;
    c.classifier = parse_classifier(classifier);
    c.rf_mtry = mtry;
    c.seed = seed;
    c.validate();
    return c;
  }
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
  auto stem = out;
  stem.replace_extension();
  return fs::path(stem.string() + suffix);
}

// ---------------------------------------------------------------- rank

struct RankCommand {
  DataOptions data;
  std::string out_path;
  unsigned threads = 1;

  int operator()(std::ostream& out, std::ostream& err) const {
    const Dataset ds = load(data);
    const auto ranking = rank_genes(ds, threads);
    if (ranking.informative.empty())
      err << "warning: no gene has non-zero information gain; heuristic mutation will only explore\n";
    std::ostringstream csv;
    write_ranking_csv(ranking, ds, csv);
    if (out_path.empty()) {
      out << csv.str();
    } else {
      write_file(out_path, csv.str());
      err << "ranked " << ds.n_genes() << " genes (" << ranking.informative.size()
          << " informative) -> " << out_path << "\n";
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------- select

struct SelectCommand {
  DataOptions data;
  FitnessOptions fitness;
  BboConfig bbo;
  std::string heuristic = "on";
  std::string rank_file;
  std::string out_path;
  std::string trace_path;
  std::size_t repeat = 1;

  int operator()(std::ostream& out, std::ostream& err) {
    const Dataset ds = load(data);
    bbo.use_heuristic = heuristic == "on";
    bbo.validate(ds.n_genes());
    if (repeat < 1) throw ConfigError("--repeat must be at least 1");

    std::optional<GeneRanking> ranking;
    std::vector<std::string> notes;
    if (bbo.use_heuristic) {
      if (!rank_file.empty()) {
        ranking = read_ranking_csv(resolve(rank_file), ds);
      } else {
        ranking = rank_genes(ds, fitness.cfg.threads == 0 ? 0 : fitness.cfg.threads);
        notes.push_back("gene ranking computed internally (no --rank-file given)");
      }
      if (ranking->informative.empty())
        notes.push_back("no informative genes: heuristic mutation reduces to exploration");
    }

    std::vector<RunReport> runs;
    for (std::size_t r = 0; r < repeat; ++r) {
      BboConfig cfg = bbo;
      cfg.seed = bbo.seed + r;
      const auto fit = fitness.build(cfg.seed);
      auto report = run(ds, cfg, fit, ranking ? &*ranking : nullptr);
      report.notes.insert(report.notes.begin(), notes.begin(), notes.end());
      err << "run " << (r + 1) << "/" << repeat << " seed " << cfg.seed << ": hsi "
          << report.final_hsi << " in " << report.wall_time_seconds << " s\n";
      runs.push_back(std::move(report));
    }

    if (repeat == 1) {
      const auto& r = runs.front();
      if (!out_path.empty()) {
        write_file(out_path, to_json(r).dump(2) + "\n");
        write_file(sibling(out_path, ".meta.json"), metadata_json(r).dump(2) + "\n");
      }
      const auto trace = trace_path.empty() && !out_path.empty()
                             ? sibling(out_path, ".trace.csv").string()
                             : trace_path;
      if (!trace.empty()) {
        std::ostringstream csv;
        write_trace_csv(r, csv);
        write_file(trace, csv.str());
      }
    } else if (!out_path.empty()) {
      Json all;
      Json meta = Json::array();
      all["config"] = config_to_json(bbo, fitness.build(bbo.seed));
      all["config"].erase("seed");
      all["config"]["base_seed"] = bbo.seed;
      all["config"]["repeat"] = repeat;
      all["runs"] = Json::array();
      std::vector<std::string> names;
      for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto run_path = sibling(out_path, ".run" + std::to_string(r + 1) + ".json");
        write_file(run_path, to_json(runs[r]).dump(2) + "\n");
        all["runs"].push_back({{"file", run_path.filename().string()},
                               {"seed", runs[r].bbo.seed},
                               {"hsi", runs[r].final_hsi},
                               {"genes", runs[r].selected_ids}});
        meta.push_back(metadata_json(runs[r]));
        names.push_back("run" + std::to_string(r + 1));
      }
      all["aggregate"] = to_json(aggregate(runs));
      write_file(out_path, all.dump(2) + "\n");
      write_file(sibling(out_path, ".meta.json"), meta.dump(2) + "\n");
      std::ostringstream csv;
      write_merged_trace_csv(runs, names, csv);
      write_file(trace_path.empty() ? sibling(out_path, ".trace.csv") : fs::path(trace_path),
                 csv.str());
    }

    for (const auto& r : runs) {
      out << "seed " << r.bbo.seed << " hsi " << r.final_hsi << " genes";
      for (const auto& id : r.selected_ids) out << ' ' << id;
      out << '\n';
    }
    if (runs.size() > 1) {
      const auto agg = aggregate(runs);
      out << "aggregate runs " << agg.runs << " mean " << agg.mean_hsi << " median "
          << agg.median_hsi << " max " << agg.max_hsi << '\n';
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------- eval

struct EvalCommand {
  DataOptions data;
  FitnessOptions fitness;
  std::string genes;
  std::uint64_t seed = 1;

  static std::vector<GeneIndex> parse_genes(const std::string& text, std::size_t n_genes) {
    std::vector<GeneIndex> out;
    if (text == "all") {
      for (GeneIndex g = 0; g < n_genes; ++g) out.push_back(g);
      return out;
    }
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      std::size_t pos = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(tok, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos == 0 || pos != tok.size()) throw ConfigError("bad gene index '" + tok + "'");
      out.push_back(static_cast<GeneIndex>(v));
    }
    if (out.empty()) throw ConfigError("--genes is empty");
    return out;
  }

  int operator()(std::ostream& out, std::ostream&) const {
    const Dataset ds = load(data);
    const auto subset = parse_genes(genes, ds.n_genes());
    // Validates range and duplicates before any training.
    const Dataset sub = restrict(ds, subset);
    const auto cfg = fitness.build(seed);
    FitnessEvaluator evaluator(ds, cfg);
    const auto result = evaluator.evaluate_detailed(subset);
    out.precision(10);
    out << "classifier " << to_string(cfg.classifier) << "\n";
    out << "genes " << subset.size() << "\n";
    out << "hsi " << result.hsi << "\n";
    for (std::size_t f = 0; f < result.fold_correct.size(); ++f) {
      const double acc = result.fold_size[f]
                             ? static_cast<double>(result.fold_correct[f]) / result.fold_size[f]
                             : 0.0;
      out << "fold " << f << " correct " << result.fold_correct[f] << "/" << result.fold_size[f]
          << " accuracy " << acc << "\n";
    }
    if (result.diagnostic) out << "diagnostic " << *result.diagnostic << "\n";
    if (cfg.classifier == ClassifierKind::RandomForest) {
      const auto mtry = std::min(cfg.rf_mtry.value_or(default_mtry(sub.n_genes())), sub.n_genes());
      const auto forest = forest_train(sub, cfg.rf_trees, mtry, derive_seed(seed, 0x00b),
                                       cfg.threads);
      const auto oob = oob_error(forest, sub);
      out << "oob_error " << oob.error << " voted " << oob.voted << " skipped " << oob.skipped
          << "\n";
    }
    return result.diagnostic ? kExitRuntime : kExitOk;
  }
};

// ---------------------------------------------------------------- report

struct ReportCommand {
  std::vector<std::string> inputs;
  std::string csv_path;
  std::string summary_path;

  static void expand(const fs::path& path, std::vector<RunReport>& runs,
                     std::vector<std::string>& names) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": " + e.what());
    }
    if (j.contains("runs") && j["runs"].is_array()) {
      // Aggregate file from --repeat: load the per-run files next to it.
      for (const auto& r : j["runs"]) expand(path.parent_path() / r.at("file").get<std::string>(), runs, names);
      return;
    }
    runs.push_back(run_report_from_json(j));
    names.push_back(path.stem().string());
  }

  int operator()(std::ostream& out, std::ostream&) const {
    std::vector<RunReport> runs;
    std::vector<std::string> names;
    for (const auto& in : inputs) expand(resolve(in), runs, names);
    if (runs.empty()) throw DataError("no runs to report");

    if (!csv_path.empty()) {
      std::ostringstream csv;
      write_merged_trace_csv(runs, names, csv);
      write_file(csv_path, csv.str());
    }

    std::vector<RunReport> heuristic;
    std::vector<RunReport> simple;
    for (const auto& r : runs) (r.bbo.use_heuristic ? heuristic : simple).push_back(r);
    std::ostringstream s;
    s.precision(6);
    s << "group,classifier,runs,mean_hsi,median_hsi,max_hsi,mean_subset_size\n";
    for (const auto* group : {&heuristic, &simple}) {
      if (group->empty()) continue;
      const auto a = aggregate(*group);
      s << (group == &heuristic ? "heuristic" : "simple") << ','
        << to_string(group->front().fitness.classifier) << ',' << a.runs << ',' << a.mean_hsi
        << ',' << a.median_hsi << ',' << a.max_hsi << ',' << a.mean_subset_size << '\n';
    }
    if (!heuristic.empty() && !simple.empty()) {
      // Pair runs by seed.
      std::vector<RunReport> h_paired;
      std::vector<RunReport> s_paired;
      for (const auto& h : heuristic)
        for (const auto& sr : simple)
          if (sr.bbo.seed == h.bbo.seed) {
            h_paired.push_back(h);
            s_paired.push_back(sr);
            break;
          }
      const auto ha = aggregate(heuristic);
      const auto sa = aggregate(simple);
      s << "\ngeneration,heuristic_mean_avg_hsi,simple_mean_avg_hsi\n";
      for (std::size_t g = 0; g < std::min(ha.mean_avg_trace.size(), sa.mean_avg_trace.size()); ++g)
        s << g << ',' << ha.mean_avg_trace[g] << ',' << sa.mean_avg_trace[g] << '\n';
      if (!h_paired.empty()) {
        const auto c = compare_convergence(h_paired, s_paired);
        s << "\npairs,heuristic_faster,simple_faster,ties,sign_test_p\n"
          << c.pairs << ',' << c.heuristic_faster << ',' << c.simple_faster << ',' << c.ties << ','
          << c.p_value << '\n';
      }
    }
    if (summary_path.empty()) out << s.str(); else write_file(summary_path, s.str());
    return kExitOk;
  }
};

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gene subset selection by biogeography-based optimization", "bbofs"};
  app.require_subcommand(1);

  RankCommand rank;
  auto* rank_cmd = app.add_subcommand("rank", "Information-gain ranking of every gene");
  rank.data.add_to(*rank_cmd, "--genes");
  rank_cmd->add_option("--out", rank.out_path, "Ranking CSV (default: standard output)");
  rank_cmd->add_option("--threads", rank.threads, "Worker threads (0 = all cores)");

  SelectCommand select;
  auto* select_cmd = app.add_subcommand("select", "Run the BBO gene-subset search");
  select.data.add_to(*select_cmd, "--genes");
  select.fitness.add_to(*select_cmd);
  select_cmd->add_option("--subset-size", select.bbo.subset_size, "Genes per habitat")->required();
  select_cmd->add_option("--pop", select.bbo.population, "Population size")->capture_default_str();
  select_cmd->add_option("--gens", select.bbo.generations, "Generations")->capture_default_str();
  select_cmd->add_option("--mutation", select.bbo.mutation_prob, "Mutation probability")
      ->capture_default_str();
  select_cmd->add_option("--hmp", select.bbo.habitat_modification_prob,
                         "Habitat modification probability")
      ->capture_default_str();
  select_cmd->add_option("--q0", select.bbo.q0, "Exploitation probability")->capture_default_str();
  select_cmd->add_option("--heuristic", select.heuristic, "on or off")
      ->check(CLI::IsMember({"on", "off"}));
  select_cmd->add_option("--elite", select.bbo.elite_count, "Elite archive size")
      ->capture_default_str();
  select_cmd->add_option("--seed", select.bbo.seed, "Random seed")->capture_default_str();
  select_cmd->add_option("--rank-file", select.rank_file, "Ranking CSV from the rank command");
  select_cmd->add_option("--out", select.out_path, "Report JSON");
  select_cmd->add_option("--trace-csv", select.trace_path, "Convergence trace CSV");
  select_cmd->add_option("--repeat", select.repeat, "Independent runs with seeds seed..seed+R-1")
      ->capture_default_str();

  EvalCommand eval;
  auto* eval_cmd = app.add_subcommand("eval", "Cross-validated accuracy of one gene subset");
  eval.data.add_to(*eval_cmd, "--n-genes");
  eval.fitness.add_to(*eval_cmd);
  eval_cmd->add_option("--genes", eval.genes, "Comma-separated 0-based gene indices, or 'all'")
      ->required();
  eval_cmd->add_option("--seed", eval.seed, "Random seed")->capture_default_str();

  ReportCommand report;
  auto* report_cmd = app.add_subcommand("report", "Merge run reports into CSV and summary tables");
  report_cmd->add_option("inputs", report.inputs, "Run report JSON files")->required();
  report_cmd->add_option("--csv", report.csv_path, "Merged convergence CSV");
  report_cmd->add_option("--summary", report.summary_path, "Summary (default: standard output)");

  std::vector<std::string> argv_storage{"bbofs"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (rank_cmd->parsed()) return rank(out, err);
    if (select_cmd->parsed()) return select(out, err);
    if (eval_cmd->parsed()) return eval(out, err);
    if (report_cmd->parsed()) return report(out, err);
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace bbofs::cli
