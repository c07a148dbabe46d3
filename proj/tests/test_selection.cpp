#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "rashomon/dataset.hpp"
#include "rashomon/errors.hpp"
#include "rashomon/models.hpp"
#include "rashomon/rng.hpp"
#include "rashomon/selection.hpp"
#include "rashomon/synth.hpp"

using namespace rashomon;

namespace {

SelectionResult fake_selection(const std::vector<double>& kappas) {
  SelectionResult sel;
  const Family fams[] = {Family::lr, Family::ridge, Family::dt, Family::nb,
                         Family::knn, Family::svm};
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    RankedCandidate c;
    c.spec.family = fams[i % 6];
    c.mean_kappa = kappas[i];
    sel.ranked.push_back(c);
    if (sel.top3.size() < 3) sel.top3.push_back(c.spec);
  }
  return sel;
}

}  // namespace

TEST_CASE("select ranks the linear family first on separable data") {
  const Dataset d = make_separable(120, 3, 0.4, 7);
  const FoldPlan folds = make_folds(d.n(), d.labels, 5, 19);
  const SelectionResult sel =
      select(d, {Family::lr, Family::ridge, Family::dt}, folds, 4, 23);

  REQUIRE(sel.ranked.size() == 3);
  CHECK(sel.top3.size() == 3);
  CHECK(sel.failed_families.empty());
  CHECK(sel.ranked.front().mean_kappa == doctest::Approx(1.0));
  CHECK(sel.ranked.front().spec.family == Family::lr);
  for (std::size_t i = 1; i < sel.ranked.size(); ++i) {
    CHECK(sel.ranked[i - 1].mean_kappa >= sel.ranked[i].mean_kappa - 1e-12);
  }
  for (const auto& c : sel.ranked) {
    CHECK(c.fold_kappas.size() == folds.k);
    const double mean =
        std::accumulate(c.fold_kappas.begin(), c.fold_kappas.end(), 0.0) /
        static_cast<double>(c.fold_kappas.size());
    CHECK(c.mean_kappa == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("select ranks the tree first on xor data") {
  const Dataset d = make_xor(160, 4, 0.02, 11);
  const FoldPlan folds = make_folds(d.n(), d.labels, 5, 29);
  const SelectionResult sel =
      select(d, {Family::lr, Family::ridge, Family::dt}, folds, 6, 31);
  CHECK(sel.ranked.front().spec.family == Family::dt);
  CHECK(sel.ranked.front().mean_kappa > 0.5);
}

TEST_CASE("the lr baseline is always evaluated and never tuned") {
  const Dataset d = make_planted(100, 4, 0.1, 13);
  const FoldPlan folds = make_folds(d.n(), d.labels, 5, 37);
  const SelectionResult sel =
      select(d, {Family::nb, Family::dt, Family::knn}, folds, 3, 41);
  CHECK(sel.baseline.spec.family == Family::lr);
  const std::map<std::string, double> untuned = {{"l2", 1.0}};
  CHECK(sel.baseline.spec.hyperparams == untuned);
  CHECK(std::isfinite(sel.baseline.mean_kappa));
  CHECK(sel.baseline.fold_kappas.size() == folds.k);

  const ModelSpec ref = baseline_lr_spec(41);
  CHECK(sel.baseline.spec.seed == ref.seed);
  CHECK(ref.hyperparams == untuned);
  CHECK(baseline_lr_spec(41).seed == ref.seed);
  CHECK(baseline_lr_spec(42).seed != ref.seed);
}

TEST_CASE("select is deterministic given a seed") {
  const Dataset d = make_planted(90, 3, 0.15, 17);
  const FoldPlan folds = make_folds(d.n(), d.labels, 4, 43);
  const std::vector<Family> fams = {Family::lr, Family::dt, Family::nb, Family::knn};
  const SelectionResult a = select(d, fams, folds, 3, 47);
  const SelectionResult b = select(d, fams, folds, 3, 47);
  REQUIRE(a.ranked.size() == b.ranked.size());
  for (std::size_t i = 0; i < a.ranked.size(); ++i) {
    CHECK(a.ranked[i].spec.family == b.ranked[i].spec.family);
    CHECK(a.ranked[i].spec.hyperparams == b.ranked[i].spec.hyperparams);
    CHECK(a.ranked[i].mean_kappa == b.ranked[i].mean_kappa);
    CHECK(a.ranked[i].fold_kappas == b.ranked[i].fold_kappas);
  }
}

TEST_CASE("select validates the family list") {
  const Dataset d = make_planted(60, 3, 0.1, 19);
  const FoldPlan folds = make_folds(d.n(), d.labels, 4, 53);
  try {
    select(d, {Family::lr, Family::dt}, folds, 2, 1);
    FAIL("expected TooFewModels");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewModels);
  }
  try {
    select(d, {Family::lr, Family::dt, Family::lr}, folds, 2, 1);
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
  const FoldPlan wrong = make_folds(40, std::vector<int>(d.labels.begin(), d.labels.begin() + 40), 4, 1);
  CHECK_THROWS_AS(select(d, {Family::lr, Family::dt, Family::nb}, wrong, 2, 1), Error);
}

TEST_CASE("rashomon membership keeps candidates within epsilon of the best loss") {
  const SelectionResult sel = fake_selection({0.60, 0.58, 0.55, 0.40});
  const RashomonSet set = rashomon_membership(sel, 0.05);
  CHECK(set.reference_loss == doctest::Approx(0.40).epsilon(1e-12));
  CHECK(set.epsilon == 0.05);
  CHECK(set.members.size() == 3);
  CHECK(set.top3_subset);

  const RashomonSet all = rashomon_membership(sel, 1.0);
  CHECK(all.members.size() == 4);

  std::size_t prev = 0;
  for (double eps : {0.0, 0.02, 0.05, 0.2, 1.0}) {
    const RashomonSet s = rashomon_membership(sel, eps);
    CHECK(s.members.size() >= prev);
    prev = s.members.size();
  }
}

TEST_CASE("a dominant model leaves the top-3 outside the set") {
  const SelectionResult sel = fake_selection({0.9, 0.2, 0.1});
  const RashomonSet set = rashomon_membership(sel, 0.05);
  CHECK(set.members.size() == 1);
  CHECK_FALSE(set.top3_subset);
}

TEST_CASE("rashomon membership input validation") {
  const SelectionResult sel = fake_selection({0.6, 0.5, 0.4});
  try {
    rashomon_membership(sel, -0.01);
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
  SelectionResult empty;
  try {
    rashomon_membership(empty, 0.05);
    FAIL("expected TooFewModels");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewModels);
  }
}
