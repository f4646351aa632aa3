#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "bbofs/data.hpp"
#include "bbofs/error.hpp"
#include "doctest.h"
#include "synthetic.hpp"
#include "tmpdir.hpp"

using namespace bbofs;
using bbofs::testing::scratch_dir;
using bbofs::testing::write_file;

namespace {

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("load_libsvm two-line file") {
  const auto ds = load_libsvm(write_file("two.libsvm", "+1 1:0.5\n-1 2:1.0\n"));
  CHECK(ds.n_samples() == 2);
  CHECK(ds.n_genes() == 2);
  CHECK(ds.value(0, 0) == 0.5);
  CHECK(ds.value(0, 1) == 0.0);
  CHECK(ds.value(1, 0) == 0.0);
  CHECK(ds.value(1, 1) == 1.0);
  CHECK(ds.label(0) == 1);
  CHECK(ds.label(1) == -1);
  CHECK(ds.gene_ids() == std::vector<std::string>{"1", "2"});
}

TEST_CASE("load_libsvm maps the smaller label to -1 and honours the width hint") {
  const auto ds = load_libsvm(write_file("zero_one.libsvm", "0 1:1\n1 3:2\n0 2:3\n"), 5);
  CHECK(ds.n_genes() == 5);
  CHECK(ds.label(0) == -1);
  CHECK(ds.label(1) == 1);
  CHECK(ds.label(2) == -1);
  CHECK(ds.value(1, 2) == 2.0);
}

TEST_CASE("load_libsvm errors") {
  CHECK_THROWS_AS(load_libsvm(write_file("empty.libsvm", "")), DataError);
  CHECK_THROWS_AS(load_libsvm(write_file("three.libsvm", "1 1:1\n2 1:2\n3 1:3\n")), DataError);
  CHECK_THROWS_AS(load_libsvm(write_file("one_class.libsvm", "1 1:1\n1 1:2\n")), DataError);
  CHECK_THROWS_AS(load_libsvm(scratch_dir() / "does_not_exist.libsvm"), DataError);
  const auto msg = error_of([] {
    load_libsvm(write_file("bad.libsvm", "+1 1:0.5\n-1 2:1.0\n+1 1:abc\n"));
  });
  CHECK(msg.find(":3:") != std::string::npos);
}

TEST_CASE("load_csv maps class strings lexicographically") {
  const auto ds = load_csv(write_file("abc.csv", "g1,g2,class\n1,2,A\n3,4,B\n5,6,A\n"), "class");
  CHECK(ds.n_samples() == 3);
  CHECK(ds.n_genes() == 2);
  CHECK(std::vector<Label>(ds.labels().begin(), ds.labels().end()) ==
        std::vector<Label>{-1, 1, -1});
  CHECK(ds.gene_ids() == std::vector<std::string>{"g1", "g2"});
  CHECK(ds.value(2, 1) == 6.0);
}

TEST_CASE("load_csv errors") {
  const auto msg = error_of([] {
    load_csv(write_file("text.csv", "g1,g2,class\n1,2,A\n3,oops,B\n"), "class");
  });
  CHECK(msg.find(":3") != std::string::npos);
  CHECK(msg.find("g2") != std::string::npos);
  CHECK_THROWS_AS(load_csv(write_file("dup.csv", "g1,g1,class\n1,2,A\n3,4,B\n"), "class"),
                  DataError);
  CHECK_THROWS_AS(load_csv(write_file("nolabel.csv", "g1,g2,class\n1,2,A\n3,4,\n"), "class"),
                  DataError);
  CHECK_THROWS_AS(load_csv(write_file("nocol.csv", "g1,g2\n1,2\n3,4\n"), "class"), DataError);
}

TEST_CASE("Dataset constructor validation") {
  CHECK_THROWS_AS(Dataset(2, 2, {1, 2, 3}, {1, -1}), DataError);
  CHECK_THROWS_AS(Dataset(2, 1, {1, 2}, {1, 0}), DataError);
  CHECK_THROWS_AS(Dataset(2, 1, {1, std::nan("")}, {1, -1}), DataError);
  CHECK_THROWS_AS(Dataset(2, 2, {1, 2, 3, 4}, {1, -1}, {"a", "a"}), DataError);
}

TEST_CASE("libsvm round trip is exact") {
  const auto ds = bbofs::testing::planted_dataset(17, 6, std::vector<GeneIndex>{1}, 1.5, 9);
  const auto path = scratch_dir() / "rt.libsvm";
  write_libsvm(ds, path);
  const auto back = load_libsvm(path, ds.n_genes());
  REQUIRE(back.n_samples() == ds.n_samples());
  REQUIRE(back.n_genes() == ds.n_genes());
  CHECK(std::equal(ds.values().begin(), ds.values().end(), back.values().begin()));
  CHECK(std::equal(ds.labels().begin(), ds.labels().end(), back.labels().begin()));
}

TEST_CASE("stratified folds on a 5/5 set give one sample of each class per fold") {
  const auto ds = bbofs::testing::noise_dataset(5, 5, 3, 1);
  const auto folds = stratified_folds(ds, 5, 42);
  CHECK(folds.k == 5);
  for (std::size_t f = 0; f < 5; ++f) {
    const auto test = folds.test_indices(f);
    REQUIRE(test.size() == 2);
    CHECK(ds.label(test[0]) != ds.label(test[1]));
  }
}

TEST_CASE("stratified folds on a 40/22 set") {
  const auto ds = bbofs::testing::noise_dataset(22, 40, 2, 3);
  const auto folds = stratified_folds(ds, 10, 7);
  std::vector<std::size_t> seen(ds.n_samples(), 0);
  for (std::size_t f = 0; f < 10; ++f) {
    std::size_t neg = 0, pos = 0;
    for (auto s : folds.test_indices(f)) {
      ++seen[s];
      (ds.label(s) == -1 ? neg : pos) += 1;
    }
    CHECK(neg == 4);
    CHECK(pos >= 2);
    CHECK(pos <= 3);
    const auto train = folds.train_indices(f);
    CHECK(train.size() + folds.test_indices(f).size() == ds.n_samples());
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](auto c) { return c == 1; }));
  CHECK(stratified_folds(ds, 10, 7).fold_of == folds.fold_of);
  CHECK(stratified_folds(ds, 10, 8).fold_of != folds.fold_of);
}

TEST_CASE("stratified folds fall back to the smallest class count") {
  const auto ds = bbofs::testing::noise_dataset(3, 8, 2, 3);
  CHECK(stratified_folds(ds, 10, 1).k == 3);
  CHECK_THROWS_AS(stratified_folds(ds, 1, 1), ConfigError);
  const auto tiny = bbofs::testing::noise_dataset(1, 4, 2, 3);
  CHECK_THROWS_AS(stratified_folds(tiny, 2, 1), DataError);
}

TEST_CASE("restrict") {
  const auto ds = bbofs::testing::noise_dataset(4, 4, 6, 5);
  std::vector<GeneIndex> all(6);
  std::iota(all.begin(), all.end(), 0);
  const auto same = restrict(ds, all);
  CHECK(std::equal(ds.values().begin(), ds.values().end(), same.values().begin()));
  CHECK(same.gene_ids() == ds.gene_ids());

  const std::vector<GeneIndex> perm{4, 0, 5, 2, 1, 3};
  std::vector<GeneIndex> inverse(6);
  for (std::size_t i = 0; i < 6; ++i) inverse[perm[i]] = i;
  const auto back = restrict(restrict(ds, perm), inverse);
  CHECK(std::equal(ds.values().begin(), ds.values().end(), back.values().begin()));
  CHECK(back.gene_ids() == ds.gene_ids());

  const auto two = restrict(ds, std::vector<GeneIndex>{3, 1});
  CHECK(two.n_genes() == 2);
  CHECK(two.value(2, 0) == ds.value(2, 3));
  CHECK(std::equal(ds.labels().begin(), ds.labels().end(), two.labels().begin()));

  CHECK_THROWS_AS(restrict(ds, std::vector<GeneIndex>{5, 5}), DataError);
  CHECK_THROWS_AS(restrict(ds, std::vector<GeneIndex>{6}), DataError);
}

TEST_CASE("concat stacks rows") {
  const auto a = bbofs::testing::noise_dataset(2, 2, 3, 1);
  const auto b = bbofs::testing::noise_dataset(3, 1, 3, 2);
  const auto c = concat(a, b);
  CHECK(c.n_samples() == 8);
  CHECK(c.count(1) == 5);
  CHECK(c.value(5, 2) == b.value(1, 2));
}
