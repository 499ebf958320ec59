#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "hte/csv.hpp"
#include "hte/dataset.hpp"
#include "hte/errors.hpp"
#include "hte/rng.hpp"
#include "hte/split.hpp"
#include "hte/standardize.hpp"

using namespace hte;

namespace {

CausalDataset tiny_dataset() {
  CausalDataset d;
  d.covariates.resize(4, 2);
  d.covariates << 1.0, 0.0,
                  2.0, 1.0,
                  3.0, 1.0,
                  4.0, 0.0;
  d.treatment.resize(4);
  d.treatment << 0, 1, 0, 1;
  d.outcome.resize(4);
  d.outcome << 0.5, 1.5, 2.5, 3.5;
  d.column_kinds = {ColumnKind::kContinuous, ColumnKind::kBinary};
  d.column_names = {"x", "b"};
  return d;
}

}  // namespace

TEST_CASE("derived streams: same path identical, sibling paths differ") {
  SeedTree tree(1);
  Rng a = derive_stream(tree, "rep", 0);
  Rng b = derive_stream(tree, "rep", 0);
  Rng c = derive_stream(tree, "rep", 1);
  bool any_differ = false;
  for (int i = 0; i < 4; ++i) {
    const double va = a.uniform();
    const double vb = b.uniform();
    const double vc = c.uniform();
    CHECK(va == vb);
    any_differ = any_differ || (va != vc);
  }
  CHECK(any_differ);
}

TEST_CASE("derived streams: labels distinguish children") {
  SeedTree tree(7);
  Rng a = derive_stream(tree, "noise", 3);
  Rng b = derive_stream(tree, "split", 3);
  CHECK(a.next_u64() != b.next_u64());
}

TEST_CASE("uniform draws have the right first moment") {
  Rng rng = SeedTree(42).child("mc").stream();
  double sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) sum += rng.uniform();
  const double mean = sum / n;
  CHECK(mean > 0.49);
  CHECK(mean < 0.51);
}

TEST_CASE("normal draws match moments") {
  Rng rng = SeedTree(9).child("norm").stream();
  double sum = 0.0, ss = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal();
    sum += v;
    ss += v * v;
  }
  const double mean = sum / n;
  const double var = ss / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("seed tree paths are recorded") {
  SeedTree tree(5);
  CHECK(tree.child("rep", 3).path() == "rep/3");
  CHECK(tree.child("rep", 3).child("noise").path() == "rep/3/noise/0");
}

TEST_CASE("dataset validation catches violations") {
  CausalDataset d = tiny_dataset();
  CHECK_NOTHROW(d.validate());

  CausalDataset all_treated = d;
  all_treated.treatment.setOnes();
  CHECK_THROWS_AS(all_treated.validate(), InvalidArgumentError);

  CausalDataset bad_binary = d;
  bad_binary.covariates(0, 1) = 0.5;
  CHECK_THROWS_AS(bad_binary.validate(), InvalidArgumentError);

  CausalDataset non_finite = d;
  non_finite.outcome[2] = std::nan("");
  CHECK_THROWS_AS(non_finite.validate(), InvalidArgumentError);

  CausalDataset frac_treatment = d;
  frac_treatment.treatment[0] = 0.3;
  CHECK_THROWS_AS(frac_treatment.validate(), InvalidArgumentError);
}

TEST_CASE("column append and drop round-trip") {
  const CausalDataset d = tiny_dataset();
  Vector extra(4);
  extra << 0.1, 0.2, 0.3, 0.4;
  const CausalDataset aug = d.with_column("ps_hat", extra);
  CHECK(aug.dim() == 3);
  CHECK(aug.covariates.col(2).isApprox(extra));
  CHECK_THROWS_AS(aug.with_column("ps_hat", extra), SchemaError);

  const CausalDataset back = aug.without_column("ps_hat");
  CHECK(back.covariates.isApprox(d.covariates));
  CHECK(back.column_names == d.column_names);
}

TEST_CASE("sim truth consistency checks") {
  SimTruth t;
  t.mu0 = Vector::Constant(3, 1.0);
  t.mu1 = Vector::Constant(3, 5.0);
  t.tau = t.mu1 - t.mu0;
  t.y0 = t.mu0;
  t.y1 = t.mu1;
  CHECK_NOTHROW(t.validate());

  Vector z(3);
  z << 1, 0, 1;
  const Vector y = t.observed_outcome(z);
  CHECK(y[0] == 5.0);
  CHECK(y[1] == 1.0);
  CHECK_NOTHROW(t.validate_against(z, y));

  SimTruth broken = t;
  broken.tau[1] += 1e-9;
  CHECK_THROWS_AS(broken.validate(), InvalidArgumentError);
}

TEST_CASE("standardize: symmetric three-point column") {
  CausalDataset d = tiny_dataset();
  d.covariates.resize(3, 1);
  d.covariates << 1, 2, 3;
  d.treatment.resize(3);
  d.treatment << 0, 1, 0;
  d.outcome = Vector::Zero(3);
  d.column_kinds = {ColumnKind::kContinuous};
  d.column_names = {"x"};

  const auto std_data = standardize_covariates(d);
  Vector expected(3);
  expected << -1, 0, 1;
  CHECK(std_data.data.covariates.col(0).isApprox(expected, 1e-12));
  CHECK(std_data.transform.columns()[0].mean == doctest::Approx(2.0));
  CHECK(std_data.transform.columns()[0].sd == doctest::Approx(1.0));
}

TEST_CASE("standardize: binary pass-through and moment contract") {
  Rng rng = SeedTree(11).child("std").stream();
  CausalDataset d;
  const Index n = 200;
  d.covariates.resize(n, 3);
  for (Index i = 0; i < n; ++i) {
    d.covariates(i, 0) = rng.normal(3.0, 2.5);
    d.covariates(i, 1) = rng.bernoulli(0.4) ? 1.0 : 0.0;
    d.covariates(i, 2) = rng.uniform(-5.0, 9.0);
  }
  d.treatment.resize(n);
  for (Index i = 0; i < n; ++i) d.treatment[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
  d.treatment[0] = 0.0;
  d.treatment[1] = 1.0;
  d.outcome = Vector::Zero(n);
  d.column_kinds = {ColumnKind::kContinuous, ColumnKind::kBinary,
                    ColumnKind::kContinuous};
  d.column_names = {"a", "b", "c"};

  const auto result = standardize_covariates(d);
  CHECK(result.data.covariates.col(1).isApprox(d.covariates.col(1)));
  for (Index j : {Index(0), Index(2)}) {
    const auto col = result.data.covariates.col(j);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().sum() /
                                static_cast<double>(n - 1));
    CHECK(std::abs(mean) < 1e-12);
    CHECK(std::abs(sd - 1.0) < 1e-12);
  }

  // Round-trip within 1e-10.
  const Matrix restored = result.transform.inverse(result.data.covariates);
  CHECK((restored - d.covariates).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("standardize: zero-variance column is rejected by name") {
  CausalDataset d = tiny_dataset();
  d.covariates.col(0).setConstant(7.0);
  try {
    standardize_covariates(d);
    FAIL("expected DegenerateColumnError");
  } catch (const DegenerateColumnError& e) {
    CHECK(std::string(e.what()).find("'x'") != std::string::npos);
  }
}

TEST_CASE("split sizes and determinism") {
  {
    Rng rng = SeedTree(3).child("split").stream();
    const auto s = split_train_test(10, 0.7, rng);
    CHECK(s.train.size() == 7);
    CHECK(s.test.size() == 3);
  }
  {
    Rng rng = SeedTree(3).child("split").stream();
    const auto s = split_train_test(747, 0.7, rng);
    CHECK(s.train.size() == 523);
    CHECK(s.test.size() == 224);
  }
  {
    Rng a = SeedTree(17).child("split").stream();
    Rng b = SeedTree(17).child("split").stream();
    const auto sa = split_train_test(50, 0.7, a);
    const auto sb = split_train_test(50, 0.7, b);
    CHECK(sa.train == sb.train);
    CHECK(sa.test == sb.test);
  }
  {
    Rng rng = SeedTree(3).child("split").stream();
    CHECK_THROWS_AS(split_train_test(10, 1.2, rng), InvalidArgumentError);
    CHECK_THROWS_AS(split_train_test(3, 0.7, rng), InvalidArgumentError);
  }
}

TEST_CASE("split partition covers every index exactly once") {
  Rng rng = SeedTree(23).child("split").stream();
  const Index n = 101;
  const auto s = split_train_test(n, 0.7, rng);
  std::set<Index> seen(s.train.begin(), s.train.end());
  seen.insert(s.test.begin(), s.test.end());
  CHECK(seen.size() == static_cast<std::size_t>(n));
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == n - 1);
}

TEST_CASE("split test-membership frequency over 1000 seeds") {
  const Index n = 20;
  std::vector<int> test_count(static_cast<std::size_t>(n), 0);
  for (int seed = 0; seed < 1000; ++seed) {
    Rng rng =
        SeedTree(2300000ULL + static_cast<std::uint64_t>(seed)).child("split").stream();
    const auto s = split_train_test(n, 0.7, rng);
    for (const Index i : s.test) ++test_count[static_cast<std::size_t>(i)];
  }
  for (const int count : test_count) {
    const double freq = count / 1000.0;
    CHECK(freq >= 0.27);
    CHECK(freq <= 0.33);
  }
}

TEST_CASE("csv parse, auto-tagging, and dataset extraction") {
  const std::string text =
      "# generated fixture\n"
      "age,dose,treat,bmi\n"
      "1.5,0,1,22.5\n"
      "2.5,1,0,27.0\n"
      "3.5,1,1,21.0\n"
      "4.5,0,0,24.0\n";
  const CsvTable table = parse_csv(text, "inline");
  CHECK(table.rows() == 4);
  CHECK(table.cols() == 4);

  const CausalDataset d = dataset_from_csv(table, "treat", "bmi");
  CHECK(d.dim() == 2);
  CHECK(d.column_names[0] == "age");
  CHECK(d.column_kinds[0] == ColumnKind::kContinuous);
  CHECK(d.column_kinds[1] == ColumnKind::kBinary);
  CHECK(d.outcome[1] == 27.0);
  CHECK(d.treatment[2] == 1.0);
}

TEST_CASE("csv rejects malformed input") {
  CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n", "inline"), SchemaError);
  CHECK_THROWS_AS(parse_csv("a,b\n1,zzz\n", "inline"), SchemaError);
  const CsvTable table = parse_csv("a,b\n1,2\n", "inline");
  CHECK_THROWS_AS(table.column_index("missing"), SchemaError);
}

TEST_CASE("format_double round-trips") {
  for (const double v : {0.1, -3.25, 1e-17, 747.0, 0.0}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}
