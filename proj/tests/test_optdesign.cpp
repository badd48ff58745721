#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "subsample/errors.hpp"
#include "subsample/optdesign.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

using namespace subsample;
using namespace subsample::testing;

namespace {

Dataset column_data(std::vector<double> values) {
  const auto n = static_cast<Eigen::Index>(values.size());
  return Dataset(Matrix(Eigen::Map<Vector>(values.data(), n)), Vector::Zero(n));
}

}  // namespace

TEST_CASE("criterion names") {
  for (const Criterion c : {Criterion::kA, Criterion::kD, Criterion::kE}) {
    CHECK(parse_criterion(criterion_name(c)) == c);
  }
  CHECK(parse_criterion("d") == Criterion::kD);
  CHECK_THROWS_AS(parse_criterion("V"), InputError);
}

TEST_CASE("criterion examples") {
  const std::vector<RowIndex> both{0, 1};
  const Dataset identity(Matrix::Identity(2, 2), Vector::Zero(2));
  CHECK(criterion_value(identity, both, Criterion::kA) == doctest::Approx(2.0));
  CHECK(criterion_value(identity, both, Criterion::kD) == doctest::Approx(1.0));
  CHECK(criterion_value(identity, both, Criterion::kE) == doctest::Approx(1.0));

  const Dataset diag(Vector{{2.0, 1.0}}.asDiagonal().toDenseMatrix(), Vector::Zero(2));
  CHECK(criterion_value(diag, both, Criterion::kA) == doctest::Approx(1.25));
  CHECK(criterion_value(diag, both, Criterion::kD) == doctest::Approx(0.25));
  CHECK(criterion_value(diag, both, Criterion::kE) == doctest::Approx(1.0));
}

TEST_CASE("criterion matches direct inverses and is homogeneous") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = static_cast<Eigen::Index>(1 + rng.below(4));
    const Dataset d = gaussian_dataset(rng, 20, p);
    std::vector<RowIndex> s(10);
    std::iota(s.begin(), s.end(), RowIndex{3});
    const double c = 0.5 + 3.0 * rng.uniform();
    const Dataset scaled(c * d.design(), d.response());
    for (const Criterion crit : {Criterion::kA, Criterion::kD, Criterion::kE}) {
      const double v = criterion_value(d, s, crit);
      const double direct = direct_criterion(d.design(), s, crit);
      CHECK(std::abs(v - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
      CHECK(std::log(v) == doctest::Approx(log_criterion_value(d.design(), s, crit)).epsilon(1e-10));
      const double power = crit == Criterion::kD ? 2.0 * static_cast<double>(p) : 2.0;
      CHECK(criterion_value(scaled, s, crit) == doctest::Approx(v * std::pow(c, -power)).epsilon(1e-10));
    }
  }
}

TEST_CASE("rank-deficient subsets and overflow are distinct") {
  Matrix x(4, 2);
  x << 1, 2, 2, 4, 0, 1, 1, 0;
  const Dataset d(x, Vector::Zero(4));
  const std::vector<RowIndex> collinear{0, 1};
  const std::vector<RowIndex> too_few{2};
  CHECK_THROWS_AS(criterion_value(d, collinear, Criterion::kD), RankError);
  CHECK_THROWS_AS(criterion_value(d, too_few, Criterion::kA), RankError);

  const Dataset tiny(1e-100 * Matrix::Identity(2, 2), Vector::Zero(2));
  const std::vector<RowIndex> both{0, 1};
  CHECK(std::isinf(criterion_value(tiny, both, Criterion::kD)));
  CHECK(log_criterion_value(tiny.design(), both, Criterion::kD) == doctest::Approx(400.0 * std::log(10.0)));
}

TEST_CASE("IBOSS examples") {
  const Dataset d = column_data({3, 1, 4, 1, 5, 9, 2, 6});
  const SubsetSelection s = iboss_select(d, 2);
  CHECK(s.indices == std::vector<RowIndex>{1, 5});
  CHECK(s.rule == SelectionRule::kIboss);
  CHECK(s.value == doctest::Approx(1.0 / 82.0));
  CHECK(iboss_select(d, 8).indices.size() == 8);

  // 3 x 3 grid; column 1 skips rows already taken for column 0.
  Matrix grid(9, 2);
  for (Eigen::Index i = 0; i < 9; ++i) grid.row(i) << static_cast<double>(i / 3), static_cast<double>(i % 3);
  const Dataset g(grid, Vector::Zero(9));
  CHECK(iboss_select(g, 4).indices == iboss_oracle(grid, 4));
  CHECK(iboss_select(g, 4).indices == std::vector<RowIndex>{0, 2, 3, 6});

  CHECK_THROWS_AS(iboss_select(d, 3), InputError);
  CHECK_THROWS_AS(iboss_select(d, 0), InputError);
  CHECK_THROWS_AS(iboss_select(d, 10), InputError);
}

TEST_CASE("IBOSS equals the literal oracle, ties included") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = static_cast<Eigen::Index>(1 + rng.below(3));
    const auto n = static_cast<Eigen::Index>(10 + rng.below(40));
    Matrix x(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) x(i, j) = static_cast<double>(rng.below(6));  // heavy ties
    }
    const std::size_t step = 2 * static_cast<std::size_t>(p);
    const std::size_t r = step * (1 + rng.below(static_cast<std::uint64_t>(n) / step));
    CHECK(iboss_select(Dataset(x, Vector::Zero(n)), r).indices == iboss_oracle(x, r));
  }
}

TEST_CASE("IBOSS ignores appended interior rows") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = gaussian_matrix(rng, 60, 2);
    Matrix extended(70, 2);
    extended.topRows(60) = x;
    for (Eigen::Index j = 0; j < 2; ++j) {
      std::vector<double> col(x.col(j).data(), x.col(j).data() + 60);
      std::nth_element(col.begin(), col.begin() + 30, col.end());
      extended.bottomRows(10).col(j).setConstant(col[30]);
    }
    CHECK(iboss_select(Dataset(x, Vector::Zero(60)), 8).indices ==
          iboss_select(Dataset(extended, Vector::Zero(70)), 8).indices);
  }
}

TEST_CASE("greedy examples") {
  const Dataset d = column_data({1, 2, 3});
  const SubsetSelection s = greedy_select(d, 2, Criterion::kD);
  CHECK(s.indices == std::vector<RowIndex>{1, 2});
  CHECK(s.value == doctest::Approx(1.0 / 13.0));

  Rng rng(4);
  const Dataset full = gaussian_dataset(rng, 12, 3);
  const SubsetSelection all = greedy_select(full, 12, Criterion::kA);
  CHECK(all.indices.size() == 12);
  CHECK(all.value == doctest::Approx(normal_inverse(full.design()).trace()));
  CHECK_THROWS_AS(greedy_select(full, 2, Criterion::kD), InputError);
  CHECK_THROWS_AS(greedy_select(full, 13, Criterion::kD), InputError);
}

TEST_CASE("exchange examples") {
  const Dataset d = column_data({1, 2, 3});
  SubsetSelection start;
  start.indices = {0, 1};
  start.rule = SelectionRule::kD;
  start.value = criterion_value(d, start.indices, Criterion::kD);
  const SubsetSelection end = exchange_improve(d, start);
  CHECK(end.indices == std::vector<RowIndex>{1, 2});
  CHECK(end.value == doctest::Approx(1.0 / 13.0));

  const SubsetSelection again = exchange_improve(d, end);
  CHECK(again.indices == end.indices);
  CHECK(again.value == end.value);

  SubsetSelection repeated = start;
  repeated.indices = {1, 1};
  CHECK_THROWS_AS(exchange_improve(d, repeated), InputError);
}

TEST_CASE("exchange never worsens the criterion") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Dataset d = gaussian_dataset(rng, 25, 3);
    const auto crit = static_cast<Criterion>(rng.below(3));
    SubsetSelection start;
    for (RowIndex i = 0; i < 25; i += 3) start.indices.push_back(i);
    start.rule = static_cast<SelectionRule>(crit);
    start.value = criterion_value(d, start.indices, crit);
    const SubsetSelection out = exchange_improve(d, start);
    CHECK(out.value <= start.value);
    CHECK(out.indices.size() == start.indices.size());
    CHECK(std::is_sorted(out.indices.begin(), out.indices.end()));
  }
}

TEST_CASE("greedy plus exchange against brute-force enumeration") {
  Rng rng(6);
  for (const Criterion crit : {Criterion::kA, Criterion::kD, Criterion::kE}) {
    int matched = 0;
    constexpr int kInstances = 200;
    for (int trial = 0; trial < kInstances; ++trial) {
      const auto p = static_cast<Eigen::Index>(1 + rng.below(2));
      const auto n = static_cast<Eigen::Index>(5 + rng.below(6));
      const std::size_t r = static_cast<std::size_t>(p) + rng.below(static_cast<std::uint64_t>(5 - p));
      const Dataset d = gaussian_dataset(rng, n, p);
      const SubsetSelection s = exchange_improve(d, greedy_select(d, r, crit));
      const double best = brute_force_optimum(d.design(), r, crit);
      CHECK(s.value >= best * (1.0 - 1e-10));
      if (s.value <= best * (1.0 + 1e-9)) ++matched;

      const double c = 3.7;
      const Dataset scaled(c * d.design(), d.response());
      CHECK(exchange_improve(scaled, greedy_select(scaled, r, crit)).indices == s.indices);
    }
    CHECK(matched >= kInstances * 6 / 10);
  }
}
