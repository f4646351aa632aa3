#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "bbofs/cli.hpp"
#include "bbofs/data.hpp"
#include "doctest.h"
#include "synthetic.hpp"
#include "tmpdir.hpp"

using namespace bbofs;
using bbofs::testing::read_file;
using bbofs::testing::scratch_dir;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string dataset_file() {
  static const std::string path = [] {
    const auto ds = bbofs::testing::planted_dataset(30, 12, std::vector<GeneIndex>{4}, 50.0, 8);
    const auto p = scratch_dir() / "planted.libsvm";
    write_libsvm(ds, p);
    return p.string();
  }();
  return path;
}

std::string in_scratch(const std::string& name) { return (scratch_dir() / name).string(); }

}  // namespace

TEST_CASE("rank writes one row per gene sorted by IG") {
  const auto r = invoke({"rank", "--data", dataset_file(), "--genes", "12", "--out", in_scratch("rank.csv")});
  REQUIRE(r.code == 0);
  const auto csv = read_file(in_scratch("rank.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
  CHECK(csv.rfind("gene_id,ig,rank\n5,", 0) == 0);
}

TEST_CASE("rank on constant genes warns") {
  const auto p = bbofs::testing::write_file("const.csv", "a,b,y\n1,2,x\n1,2,z\n1,2,x\n1,2,z\n");
  const auto r = invoke({"rank", "--data", p.string(), "--label-column", "y"});
  CHECK(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
  CHECK(r.out.find("a,0,1") != std::string::npos);
}

TEST_CASE("ingestion and usage errors exit with 2") {
  const auto missing = invoke({"rank", "--data", in_scratch("nope.libsvm"), "--out", in_scratch("partial.csv")});
  CHECK(missing.code == 2);
  CHECK_FALSE(std::filesystem::exists(in_scratch("partial.csv")));
  CHECK(invoke({"eval", "--data", dataset_file(), "--genes", "1,1"}).code == 2);
  CHECK(invoke({"eval", "--data", dataset_file(), "--genes", "99"}).code == 2);
  CHECK(invoke({"report"}).code == 2);
  CHECK(invoke({"select", "--data", dataset_file()}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"select", "--data", dataset_file(), "--subset-size", "3", "--classifier", "knn"}).code == 2);
}

TEST_CASE("eval prints HSI and folds") {
  const auto r = invoke({"eval", "--data", dataset_file(), "--genes", "4", "--folds", "5"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("hsi 1\n") != std::string::npos);
  CHECK(r.out.find("fold 4 correct") != std::string::npos);
  const auto rf = invoke({"eval", "--data", dataset_file(), "--genes", "all", "--classifier", "rf",
                          "--trees", "50", "--folds", "5"});
  REQUIRE(rf.code == 0);
  CHECK(rf.out.find("oob_error") != std::string::npos);
}

TEST_CASE("select output is byte-identical across identical runs") {
  const std::vector<std::string> base{"select", "--data", dataset_file(), "--subset-size", "2",
                                      "--pop", "6", "--gens", "3", "--folds", "5", "--seed", "3"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", in_scratch("a.json")});
  b.insert(b.end(), {"--out", in_scratch("b.json"), "--threads", "2"});
  REQUIRE(invoke(a).code == 0);
  REQUIRE(invoke(b).code == 0);
  CHECK(read_file(in_scratch("a.json")) == read_file(in_scratch("b.json")));
  CHECK(read_file(in_scratch("a.trace.csv")) == read_file(in_scratch("b.trace.csv")));
  CHECK(std::filesystem::exists(in_scratch("a.meta.json")));
  CHECK(read_file(in_scratch("a.json")).find("gene ranking computed internally") != std::string::npos);

  auto zero = base;
  zero[8] = "0";
  zero.insert(zero.end(), {"--out", in_scratch("zero.json")});
  REQUIRE(invoke(zero).code == 0);
  const auto z = read_file(in_scratch("zero.trace.csv"));
  CHECK(std::count(z.begin(), z.end(), '\n') == 2);
}

TEST_CASE("repeat and report") {
  std::vector<std::string> args{"select", "--data", dataset_file(), "--subset-size", "2",
                                "--pop", "6", "--gens", "3", "--folds", "5", "--seed", "10",
                                "--repeat", "3", "--out", in_scratch("h.json")};
  REQUIRE(invoke(args).code == 0);
  CHECK(std::filesystem::exists(in_scratch("h.run3.json")));
  CHECK(read_file(in_scratch("h.json")).find("\"aggregate\"") != std::string::npos);

  args.back() = in_scratch("s.json");
  args.insert(args.end(), {"--heuristic", "off"});
  REQUIRE(invoke(args).code == 0);

  const auto r = invoke({"report", in_scratch("h.json"), in_scratch("s.json"), "--csv", in_scratch("merged.csv")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("heuristic,svm,3") != std::string::npos);
  CHECK(r.out.find("simple,svm,3") != std::string::npos);
  CHECK(r.out.find("pairs,heuristic_faster") != std::string::npos);
  const auto merged = read_file(in_scratch("merged.csv"));
  CHECK(merged.rfind("generation,h.run1_best,h.run1_avg", 0) == 0);

  const auto two = invoke({"report", in_scratch("h.run1.json"), in_scratch("h.run2.json"),
                           "--csv", in_scratch("two.csv")});
  REQUIRE(two.code == 0);
  const auto first = read_file(in_scratch("two.csv")).substr(0, read_file(in_scratch("two.csv")).find('\n'));
  CHECK(first == "generation,h.run1_best,h.run1_avg,h.run2_best,h.run2_avg");

  CHECK(invoke({"report", in_scratch("missing.json")}).code == 2);
}
