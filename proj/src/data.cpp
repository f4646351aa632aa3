#include "bbofs/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "bbofs/error.hpp"
#include "bbofs/rng.hpp"

namespace bbofs {

namespace {

std::vector<std::string> ordinal_ids(std::size_t n) {
  std::vector<std::string> ids(n);
  for (std::size_t g = 0; g < n; ++g) ids[g] = std::to_string(g + 1);
  return ids;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

Dataset::Dataset(std::size_t n_samples, std::size_t n_genes, std::vector<double> values,
                 std::vector<Label> labels, std::vector<std::string> gene_ids)
    : n_samples_(n_samples),
      n_genes_(n_genes),
      values_(std::move(values)),
      labels_(std::move(labels)),
      gene_ids_(gene_ids.empty() ? ordinal_ids(n_genes) : std::move(gene_ids)) {
  if (values_.size() != n_samples_ * n_genes_)
    throw DataError("value matrix size does not match " + std::to_string(n_samples_) + "x" +
                    std::to_string(n_genes_));
  if (labels_.size() != n_samples_) throw DataError("label count does not match sample count");
  if (gene_ids_.size() != n_genes_) throw DataError("gene id count does not match gene count");
  for (const Label y : labels_)
    if (y != 1 && y != -1) throw DataError("labels must be +1 or -1");
  if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }))
    throw DataError("non-finite expression value");
  std::unordered_set<std::string_view> seen;
  seen.reserve(gene_ids_.size());
  for (const auto& id : gene_ids_)
    if (!seen.insert(id).second) throw DataError("duplicate gene id '" + id + "'");
}

std::size_t Dataset::count(Label cls) const noexcept {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), cls));
}

Dataset Dataset::rows(std::span<const std::size_t> samples) const {
  std::vector<double> values;
  values.reserve(samples.size() * n_genes_);
  std::vector<Label> labels;
  labels.reserve(samples.size());
  for (const auto s : samples) {
    if (s >= n_samples_) throw DataError("sample index out of range");
    const auto r = row(s);
    values.insert(values.end(), r.begin(), r.end());
    labels.push_back(labels_[s]);
  }
  return Dataset(samples.size(), n_genes_, std::move(values), std::move(labels), gene_ids_);
}

Dataset load_libsvm(const std::filesystem::path& path, std::optional<std::size_t> n_genes_hint) {
  auto in = open_or_throw(path);
  struct Row {
    double label;
    std::vector<std::pair<std::size_t, double>> entries;
  };
  std::vector<Row> rows;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = trim(line);
    if (const auto hash = rest.find('#'); hash != std::string_view::npos)
      rest = trim(rest.substr(0, hash));
    if (rest.empty()) continue;
    std::istringstream tokens{std::string(rest)};
    std::string tok;
    tokens >> tok;
    const auto label = parse_double(tok);
    if (!label) fail("bad label '" + tok + "'");
    Row r{*label, {}};
    std::size_t prev = 0;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) fail("expected idx:val, got '" + tok + "'");
      std::size_t idx = 0;
      const auto [p, ec] = std::from_chars(tok.data(), tok.data() + colon, idx);
      if (ec != std::errc() || p != tok.data() + colon || idx == 0)
        fail("bad feature index in '" + tok + "'");
      if (idx <= prev) fail("feature indices must be strictly increasing");
      const auto val = parse_double(std::string_view(tok).substr(colon + 1));
      if (!val) fail("bad feature value in '" + tok + "'");
      r.entries.emplace_back(idx, *val);
      prev = idx;
    }
    max_index = std::max(max_index, prev);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw DataError(path.string() + ": empty file");

  std::map<double, Label> classes;
  for (const auto& r : rows) classes.emplace(r.label, 0);
  if (classes.size() > 2)
    throw DataError(path.string() + ": more than two distinct labels (" +
                    std::to_string(classes.size()) + ")");
  if (classes.size() < 2) throw DataError(path.string() + ": only one class present");
  classes.begin()->second = -1;
  std::next(classes.begin())->second = 1;

  std::size_t n_genes = max_index;
  if (n_genes_hint) {
    if (*n_genes_hint < max_index)
      throw DataError(path.string() + ": gene count hint " + std::to_string(*n_genes_hint) +
                      " is below the largest index " + std::to_string(max_index));
    n_genes = *n_genes_hint;
  }
  std::vector<double> values(rows.size() * n_genes, 0.0);
  std::vector<Label> labels(rows.size());
  for (std::size_t s = 0; s < rows.size(); ++s) {
    labels[s] = classes.at(rows[s].label);
    for (const auto& [idx, val] : rows[s].entries) values[s * n_genes + idx - 1] = val;
  }
  return Dataset(rows.size(), n_genes, std::move(values), std::move(labels));
}

namespace {

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (const char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  for (auto& f : out) f = std::string(trim(f));
  return out;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
  auto in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  const auto header = split_csv(line);
  {
    std::unordered_set<std::string> seen;
    for (const auto& h : header)
      if (!seen.insert(h).second) throw DataError(path.string() + ": duplicate header '" + h + "'");
  }
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end())
    throw DataError(path.string() + ": label column '" + label_column + "' not found");
  const auto label_col = static_cast<std::size_t>(label_it - header.begin());

  std::vector<std::string> gene_ids;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != label_col) gene_ids.push_back(header[c]);
  const std::size_t n_genes = gene_ids.size();

  std::vector<double> values;
  std::vector<std::string> raw_labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    const auto where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != header.size())
      throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_col) {
        if (fields[c].empty()) throw DataError(where + ": missing label");
        raw_labels.push_back(fields[c]);
        continue;
      }
      const auto v = parse_double(fields[c]);
      if (!v)
        throw DataError(where + ": non-numeric value '" + fields[c] + "' in column '" +
                        header[c] + "'");
      values.push_back(*v);
    }
  }
  if (raw_labels.empty()) throw DataError(path.string() + ": no data rows");

  std::map<std::string, Label> classes;
  for (const auto& l : raw_labels) classes.emplace(l, 0);
  if (classes.size() > 2)
    throw DataError(path.string() + ": more than two distinct labels (" +
                    std::to_string(classes.size()) + ")");
  if (classes.size() < 2) throw DataError(path.string() + ": only one class present");
  classes.begin()->second = -1;
  std::next(classes.begin())->second = 1;
  std::vector<Label> labels;
  labels.reserve(raw_labels.size());
  for (const auto& l : raw_labels) labels.push_back(classes.at(l));
  const std::size_t n_samples = labels.size();
  return Dataset(n_samples, n_genes, std::move(values), std::move(labels), std::move(gene_ids));
}

void write_libsvm(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  char buf[64];
  for (std::size_t s = 0; s < ds.n_samples(); ++s) {
    out << (ds.label(s) > 0 ? "+1" : "-1");
    const auto r = ds.row(s);
    for (std::size_t g = 0; g < r.size(); ++g) {
      if (r[g] == 0.0) continue;
      const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, r[g]);
      out << ' ' << (g + 1) << ':' << std::string_view(buf, static_cast<std::size_t>(end - buf));
    }
    out << '\n';
  }
}

Dataset concat(const Dataset& a, const Dataset& b) {
  if (a.n_genes() != b.n_genes()) throw DataError("cannot concatenate: gene counts differ");
  std::vector<double> values(a.values().begin(), a.values().end());
  values.insert(values.end(), b.values().begin(), b.values().end());
  std::vector<Label> labels(a.labels().begin(), a.labels().end());
  labels.insert(labels.end(), b.labels().begin(), b.labels().end());
  return Dataset(a.n_samples() + b.n_samples(), a.n_genes(), std::move(values), std::move(labels),
                 a.gene_ids());
}

Dataset restrict(const Dataset& ds, std::span<const GeneIndex> genes) {
  std::vector<bool> used(ds.n_genes(), false);
  for (const auto g : genes) {
    if (g >= ds.n_genes())
      throw DataError("gene index " + std::to_string(g) + " out of range (" +
                      std::to_string(ds.n_genes()) + " genes)");
    if (used[g]) throw DataError("duplicate gene index " + std::to_string(g));
    used[g] = true;
  }
  const std::size_t m = genes.size();
  std::vector<double> values(ds.n_samples() * m);
  for (std::size_t s = 0; s < ds.n_samples(); ++s) {
    const auto r = ds.row(s);
    for (std::size_t j = 0; j < m; ++j) values[s * m + j] = r[genes[j]];
  }
  std::vector<std::string> ids;
  ids.reserve(m);
  for (const auto g : genes) ids.push_back(ds.gene_ids()[g]);
  return Dataset(ds.n_samples(), m, std::move(values),
                 std::vector<Label>(ds.labels().begin(), ds.labels().end()), std::move(ids));
}

std::vector<std::size_t> FoldAssignment::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < fold_of.size(); ++s)
    if (fold_of[s] == fold) out.push_back(s);
  return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < fold_of.size(); ++s)
    if (fold_of[s] != fold) out.push_back(s);
  return out;
}

FoldAssignment stratified_folds(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be at least 2");
  const std::size_t smallest = std::min(ds.count(-1), ds.count(1));
  if (smallest < 2)
    throw DataError("each class needs at least 2 samples for cross-validation");
  if (smallest < k) {
    std::cerr << "warning: smallest class has " << smallest << " samples; using " << smallest
              << " folds instead of " << k << "\n";
    k = smallest;
  }
  Rng rng(derive_seed(seed, 0xf01d));
  // Shuffle each class, then deal the concatenation round-robin. Dealing one
  // continuous sequence keeps fold sizes within 1 of each other and each
  // fold's class count within 1 of n_c / k.
  std::vector<std::size_t> order;
  order.reserve(ds.n_samples());
  for (const Label cls : {Label{-1}, Label{1}}) {
    std::vector<std::size_t> members;
    for (std::size_t s = 0; s < ds.n_samples(); ++s)
      if (ds.label(s) == cls) members.push_back(s);
    std::shuffle(members.begin(), members.end(), rng);
    order.insert(order.end(), members.begin(), members.end());
  }
  FoldAssignment folds{k, std::vector<std::size_t>(ds.n_samples())};
  for (std::size_t pos = 0; pos < order.size(); ++pos) folds.fold_of[order[pos]] = pos % k;
  return folds;
}

}  // namespace bbofs
