#include <doctest.h>

#include <cmath>
#include <vector>

#include "rashomon/errors.hpp"
#include "rashomon/rng.hpp"
#include "rashomon/shap.hpp"
#include "rashomon/similarity.hpp"

using namespace rashomon;

namespace {

GlobalImportance gi(std::vector<double> values, std::size_t sample_size = 64) {
  GlobalImportance g;
  g.per_feature = std::move(values);
  g.sample_size = sample_size;
  return g;
}

}  // namespace

TEST_CASE("rank_top_j orders by magnitude with index tie-breaks") {
  const GlobalImportance g = gi({0.5, 0.3, 0.1, 0.05});
  const FeatureRanking top2 = rank_top_j(g, 2);
  CHECK(top2.j == 2);
  CHECK(top2.ordered_indices == std::vector<std::size_t>{0, 1});

  const FeatureRanking all = rank_top_j(g, 4);
  CHECK(all.ordered_indices == std::vector<std::size_t>{0, 1, 2, 3});

  const GlobalImportance tied = gi({0.2, 0.2, 0.2, 0.2});
  CHECK(rank_top_j(tied, 2).ordered_indices == std::vector<std::size_t>{0, 1});

  const GlobalImportance mixed = gi({0.1, 0.9, 0.5});
  CHECK(rank_top_j(mixed, 2).ordered_indices == std::vector<std::size_t>{1, 2});

  CHECK_THROWS_AS(rank_top_j(g, 0), Error);
  try {
    rank_top_j(g, 5);
    FAIL("expected BadJ");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadJ);
  }
}

TEST_CASE("top_j_similarity counts shared top features") {
  const GlobalImportance a = gi({0.5, 0.3, 0.1, 0.05});
  for (std::size_t j = 1; j <= 4; ++j) {
    CHECK(top_j_similarity(a, a, j) == 1.0);
  }

  const GlobalImportance b = gi({0.1, 0.2, 0.5, 0.4});
  CHECK(top_j_similarity(a, b, 2) == 0.0);

  const GlobalImportance c = gi({0.4, 0.35, 0.2, 0.01});
  CHECK(top_j_similarity(a, c, 2) == 1.0);

  CHECK(top_j_similarity(a, b, 2) == top_j_similarity(b, a, 2));
  CHECK(top_j_similarity(a, b, 4) == 1.0);

  CHECK_THROWS_AS(top_j_similarity(a, gi({0.1, 0.2}), 2), Error);
}

TEST_CASE("top_j_pairwise averages over unordered pairs") {
  const std::vector<GlobalImportance> same = {gi({0.4, 0.3, 0.2}), gi({0.4, 0.3, 0.2}),
                                              gi({0.4, 0.3, 0.2})};
  CHECK(top_j_pairwise(same, 2) == 1.0);

  const std::vector<GlobalImportance> two = {gi({0.5, 0.3, 0.1, 0.05}),
                                             gi({0.1, 0.2, 0.5, 0.4})};
  CHECK(top_j_pairwise(two, 2) == top_j_similarity(two[0], two[1], 2));

  // pair overlaps at j=2: (a,b)=1, (a,c)=0.5, (b,c)=0.5
  const std::vector<GlobalImportance> three = {gi({4, 3, 0, 0}), gi({4, 3, 0, 0}),
                                               gi({4, 0, 3, 0})};
  CHECK(top_j_pairwise(three, 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const std::vector<GlobalImportance> one = {gi({1, 2})};
  try {
    top_j_pairwise(one, 1);
    FAIL("expected TooFewModels");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewModels);
  }
}

TEST_CASE("top_j_similarity_instances ranks each instance separately") {
  Attribution a;
  a.values = Matrix(2, 3);
  a.values(0, 0) = 0.9;
  a.values(0, 1) = 0.5;
  a.values(0, 2) = 0.1;
  a.values(1, 0) = 0.1;
  a.values(1, 1) = -0.5;
  a.values(1, 2) = 0.9;

  Attribution b;
  b.values = Matrix(2, 3);
  b.values(0, 0) = 0.8;  // instance 0 tops {0,1} on both sides -> 1.0
  b.values(0, 1) = 0.6;
  b.values(0, 2) = 0.0;
  b.values(1, 0) = 0.9;  // instance 1: a tops {1,2}, b tops {0,1} -> 0.5
  b.values(1, 1) = 0.5;
  b.values(1, 2) = 0.1;

  CHECK(top_j_similarity_instances(a, b, 2) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(top_j_similarity_instances(a, a, 2) == 1.0);

  Attribution short_rows;
  short_rows.values = Matrix(1, 3);
  CHECK_THROWS_AS(top_j_similarity_instances(a, short_rows, 2), Error);

  Attribution narrow;
  narrow.values = Matrix(2, 2);
  CHECK_THROWS_AS(top_j_similarity_instances(a, narrow, 2), Error);
}

TEST_CASE("weight_vectors under the group-mean mas") {
  const std::vector<GlobalImportance> single = {gi({0.4, 0.2, 0.0})};
  const auto w_single = weight_vectors(single);
  REQUIRE(w_single.size() == 1);
  REQUIRE(w_single[0].weights.size() == 3);
  CHECK(w_single[0].weights[0] == doctest::Approx(0.16).epsilon(1e-12));
  CHECK(w_single[0].weights[1] == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(w_single[0].weights[2] == 0.0);

  const std::vector<GlobalImportance> twins = {gi({0.3, 0.1}), gi({0.3, 0.1})};
  const auto w_twins = weight_vectors(twins);
  CHECK(w_twins[0].weights[0] == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(w_twins[0].weights[1] == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(w_twins[1].weights == w_twins[0].weights);

  const std::vector<GlobalImportance> axes = {gi({1.0, 0.0}), gi({0.0, 1.0})};
  const auto w_axes = weight_vectors(axes);
  CHECK(w_axes[0].weights == std::vector<double>{0.5, 0.0});
  CHECK(w_axes[1].weights == std::vector<double>{0.0, 0.5});

  CHECK_THROWS_AS(weight_vectors(std::vector<GlobalImportance>{gi({1.0}), gi({1.0, 2.0})}),
                  Error);
}

TEST_CASE("weight_vectors under the scalar mas") {
  const std::vector<GlobalImportance> models = {gi({0.4, 0.2}), gi({0.1, 0.3})};
  const auto w = weight_vectors(models, MasMode::scalar);
  // per-model scalar mas: (0.4+0.2)/2 = 0.3 and (0.1+0.3)/2 = 0.2
  CHECK(w[0].weights[0] == doctest::Approx(0.4 * 0.3).epsilon(1e-12));
  CHECK(w[0].weights[1] == doctest::Approx(0.2 * 0.3).epsilon(1e-12));
  CHECK(w[1].weights[0] == doctest::Approx(0.1 * 0.2).epsilon(1e-12));
  CHECK(w[1].weights[1] == doctest::Approx(0.3 * 0.2).epsilon(1e-12));
}

TEST_CASE("wcossim basics") {
  WeightedImportance a, b;
  a.weights = {3, 4, 0};
  b.weights = {4, 3, 0};
  CHECK(wcossim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(wcossim(a, b) == doctest::Approx(0.96).epsilon(1e-12));

  WeightedImportance left, right;
  left.weights = {1, 0};
  right.weights = {0, 2};
  CHECK(wcossim(left, right) == 0.0);

  WeightedImportance scaled;
  scaled.weights = {30, 40, 0};
  CHECK(wcossim(scaled, b) == doctest::Approx(0.96).epsilon(1e-12));

  WeightedImportance zero;
  zero.weights = {0, 0, 0};
  bool degenerate = false;
  CHECK(wcossim(zero, b, &degenerate) == 0.0);
  CHECK(degenerate);
  degenerate = true;
  CHECK(wcossim(a, b, &degenerate) == doctest::Approx(0.96));
  CHECK_FALSE(degenerate);

  WeightedImportance narrow;
  narrow.weights = {1, 2};
  CHECK_THROWS_AS(wcossim(a, narrow), Error);
}

TEST_CASE("wcossim_group averages the pairwise similarities") {
  const std::vector<GlobalImportance> same = {gi({0.2, 0.5, 0.1}), gi({0.2, 0.5, 0.1}),
                                              gi({0.2, 0.5, 0.1})};
  CHECK(wcossim_group(same) == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<GlobalImportance> two = {gi({3, 4, 0}), gi({4, 3, 0})};
  const auto w = weight_vectors(two);
  CHECK(wcossim_group(two) == doctest::Approx(wcossim(w[0], w[1])).epsilon(1e-12));

  const std::vector<GlobalImportance> ortho = {gi({1, 0, 0}), gi({0, 1, 0}),
                                               gi({0, 0, 1})};
  CHECK(wcossim_group(ortho) == 0.0);

  const std::vector<GlobalImportance> one = {gi({1, 2})};
  CHECK_THROWS_AS(wcossim_group(one), Error);
}

TEST_CASE("wcossim_group is scale invariant") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<GlobalImportance> models;
    for (int m = 0; m < 3; ++m) {
      std::vector<double> v(5);
      for (auto& x : v) x = rng.uniform();
      models.push_back(gi(v));
    }
    std::vector<GlobalImportance> scaled = models;
    for (auto& m : scaled) {
      for (auto& x : m.per_feature) x *= 17.0;
    }
    CHECK(wcossim_group(models) == doctest::Approx(wcossim_group(scaled)).epsilon(1e-9));
  }
}

TEST_CASE("consensus is the mean absolute importance") {
  const std::vector<GlobalImportance> same = {gi({0.3, 0.1}), gi({0.3, 0.1})};
  const ConsensusVector c1 = consensus(same);
  CHECK(c1.per_feature == std::vector<double>{0.3, 0.1});
  CHECK(c1.model_count == 2);
  CHECK(c1.sample_size == 64);

  const std::vector<GlobalImportance> axes = {gi({0.2, 0.0}), gi({0.0, 0.2})};
  const ConsensusVector c2 = consensus(axes);
  CHECK(c2.per_feature[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(c2.per_feature[1] == doctest::Approx(0.1).epsilon(1e-12));

  const std::vector<GlobalImportance> mixed_size = {gi({0.1}, 64), gi({0.2}, 32)};
  try {
    consensus(mixed_size);
    FAIL("expected SizeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SizeMismatch);
  }

  const std::vector<GlobalImportance> ragged = {gi({0.1, 0.2}), gi({0.3})};
  CHECK_THROWS_AS(consensus(ragged), Error);
}

TEST_CASE("consensus equals the importance of pooled attributions") {
  Rng rng(17);
  const std::size_t n = 6, k = 4;
  Attribution a, b;
  a.values = Matrix(n, k);
  b.values = Matrix(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      a.values(i, j) = rng.normal();
      b.values(i, j) = rng.normal();
    }
  }
  GlobalImportance ga = aggregate(a);
  GlobalImportance gb = aggregate(b);
  ga.sample_size = gb.sample_size = 128;
  const ConsensusVector c = consensus(std::vector<GlobalImportance>{ga, gb});

  // (1/MN) sum over both models and all instances of |phi|
  for (std::size_t j = 0; j < k; ++j) {
    double pooled = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pooled += std::abs(a.values(i, j)) + std::abs(b.values(i, j));
    }
    pooled /= static_cast<double>(2 * n);
    CHECK(c.per_feature[j] == doctest::Approx(pooled).epsilon(1e-12));
  }
}
